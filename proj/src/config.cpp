#include "phasepush/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace phasepush {

using nlohmann::json;

const char* to_string(Scenario scenario) {
  return scenario == Scenario::kFloating ? "fb" : "bs";
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "fb") return Scenario::kFloating;
  if (name == "bs") return Scenario::kSolid;
  throw ConfigError("unknown scenario '" + name + "' (expected fb or bs)");
}

EstimatorConfig EstimatorSettings::build(double dt) const {
  EstimatorConfig c;
  c.delay = delay;
  c.process_noise = white_acceleration_noise(process_noise_density, dt);
  c.measurement_variance = measurement_std * measurement_std;
  c.initial_position_variance = initial_position_std * initial_position_std;
  c.initial_velocity_variance = initial_velocity_std * initial_velocity_std;
  return c;
}

LoopConfig LoopConfig::defaults(Scenario scenario) {
  LoopConfig c;
  c.scenario = scenario;
  if (scenario == Scenario::kFloating) {
    c.ball = BallParams::floating();
    c.pressure_limit = 2500.0;
    c.pid = PidGains{4.0e-3, 1.0e-3, 1.0e-3, 5.0e-6, 2.0};
    c.estimator.process_noise_density = 3e-5;
    c.initial_state.position = Vec2(0.010, 0.0);
    c.reference.kind = ReferenceKind::kSetpoint;
    c.duration = 15.0;
  } else {
    c.ball = BallParams::solid();
    c.pressure_limit = 2700.0;
    c.pid = PidGains{1.0e-2, 2.0e-3, 2.0e-3, 1.0e-5, 2.0};
    c.estimator.process_noise_density = 1e-4;
    c.reference.kind = ReferenceKind::kWaypoints;
    c.reference.waypoints = {Vec2(0.008, 0.0), Vec2(0.0, 0.008), Vec2(-0.008, 0.0),
                             Vec2(0.0, -0.008), Vec2(0.008, 0.0)};
    c.reference.speed = 0.005;
    c.reference.dwell = 3.0;
    c.initial_state.position = Vec2::Zero();
    c.duration = 30.0;
  }
  return c;
}

void LoopConfig::validate() const {
  try {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(duration > 0.0)) throw ConfigError("duration must be positive");
    if (!(pressure_limit >= ball.pressure_offset)) {
      throw ConfigError("pressure_limit must be at least the pressure offset");
    }
    if (!(point_distance > 0.0)) throw ConfigError("pressure_point_distance must be positive");
    if (!(quantization_step > 0.0)) throw ConfigError("quantization step must be positive");
    if (!(geometry.plane_height > 0.0)) throw ConfigError("plane_height must be positive");
    if (sensor.delay < 0) throw ConfigError("sensor delay must be >= 0");
    if (!(sensor.noise_std >= 0.0)) throw ConfigError("sensor noise_std must be >= 0");
    if (random_restart_period < 0) throw ConfigError("random_restart_period must be >= 0");
    if (solver.restarts < 1 || solver.memory < 1 || !(solver.gradient_tolerance > 0.0)) {
      throw ConfigError("solver settings invalid");
    }
    ball.validate();
    pid.validate();
    estimator.build(dt).validate();
    (void)geometry.build();
    if (initial_state.position.norm() > ball.area_radius) {
      throw ConfigError("initial position lies outside the manipulation area");
    }
    validate_reference(reference, ball.area_radius);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

namespace {

json vec(const Vec2& v) { return json::array({v.x(), v.y()}); }

Vec2 to_vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected a 2-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

// every key of `doc` must exist in `schema`; arrays are replaced wholesale
void reject_unknown_keys(const json& doc, const json& schema, const std::string& path) {
  if (!doc.is_object()) return;
  if (!schema.is_object()) throw ConfigError("'" + path + "' must not be an object");
  for (const auto& [key, value] : doc.items()) {
    if (!schema.contains(key)) throw ConfigError("unknown config key '" + path + key + "'");
    reject_unknown_keys(value, schema.at(key), path + key + ".");
  }
}

}  // namespace

json to_json(const LoopConfig& c) {
  json waypoints = json::array();
  for (const Vec2& w : c.reference.waypoints) waypoints.push_back(vec(w));
  return json{
      {"scenario", to_string(c.scenario)},
      {"dt", c.dt},
      {"duration", c.duration},
      {"seed", c.seed},
      {"geometry",
       {{"rows", c.geometry.rows},
        {"cols", c.geometry.cols},
        {"pitch", c.geometry.pitch},
        {"transducer_radius", c.geometry.constants.radius},
        {"transducer_power", c.geometry.constants.power},
        {"wavenumber", c.geometry.constants.wavenumber},
        {"plane_height", c.geometry.plane_height}}},
      {"ball",
       {{"mass", c.ball.mass},
        {"friction", c.ball.friction},
        {"pressure_to_force", c.ball.pressure_to_force},
        {"pressure_offset", c.ball.pressure_offset},
        {"ball_radius", c.ball.ball_radius},
        {"area_radius", c.ball.area_radius}}},
      {"initial_state",
       {{"position", vec(c.initial_state.position)}, {"velocity", vec(c.initial_state.velocity)}}},
      {"pressure_limit", c.pressure_limit},
      {"pressure_point_distance", c.point_distance},
      {"quantization_step_deg", c.quantization_step * 180.0 / kPi},
      {"solver",
       {{"memory", c.solver.memory},
        {"gradient_tolerance", c.solver.gradient_tolerance},
        {"max_iterations", c.solver.max_iterations},
        {"restarts", c.solver.restarts},
        {"local_max_restarts", c.solver.local_max_restarts},
        {"normalize", c.solver.normalize}}},
      {"warm_start", c.warm_start},
      {"random_restart_period", c.random_restart_period},
      {"pid",
       {{"kp", c.pid.kp},
        {"ki", c.pid.ki},
        {"kd", c.pid.kd},
        {"integrator_clamp", c.pid.integrator_clamp},
        {"derivative_filter", c.pid.derivative_filter}}},
      {"estimator",
       {{"delay", c.estimator.delay},
        {"process_noise_density", c.estimator.process_noise_density},
        {"measurement_std", c.estimator.measurement_std},
        {"initial_position_std", c.estimator.initial_position_std},
        {"initial_velocity_std", c.estimator.initial_velocity_std}}},
      {"sensor", {{"noise_std", c.sensor.noise_std}, {"delay", c.sensor.delay}}},
      {"reference",
       {{"kind", to_string(c.reference.kind)},
        {"center", vec(c.reference.center)},
        {"radius", c.reference.radius},
        {"extent", vec(c.reference.extent)},
        {"waypoints", waypoints},
        {"speed", c.reference.speed},
        {"dwell", c.reference.dwell}}},
  };
}

LoopConfig loop_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  try {
    const Scenario scenario =
        scenario_from_string(doc.contains("scenario") ? doc.at("scenario").get<std::string>() : "fb");
    json merged = to_json(LoopConfig::defaults(scenario));
    reject_unknown_keys(doc, merged, "");
    merged.merge_patch(doc);

    LoopConfig c = LoopConfig::defaults(scenario);
    c.dt = merged.at("dt").get<double>();
    c.duration = merged.at("duration").get<double>();
    c.seed = merged.at("seed").get<std::uint64_t>();

    const json& g = merged.at("geometry");
    c.geometry.rows = g.at("rows").get<int>();
    c.geometry.cols = g.at("cols").get<int>();
    c.geometry.pitch = g.at("pitch").get<double>();
    c.geometry.constants.radius = g.at("transducer_radius").get<double>();
    c.geometry.constants.power = g.at("transducer_power").get<double>();
    c.geometry.constants.wavenumber = g.at("wavenumber").get<double>();
    c.geometry.plane_height = g.at("plane_height").get<double>();

    const json& b = merged.at("ball");
    c.ball.mass = b.at("mass").get<double>();
    c.ball.friction = b.at("friction").get<double>();
    c.ball.pressure_to_force = b.at("pressure_to_force").get<double>();
    c.ball.pressure_offset = b.at("pressure_offset").get<double>();
    c.ball.ball_radius = b.at("ball_radius").get<double>();
    c.ball.area_radius = b.at("area_radius").get<double>();

    const json& s0 = merged.at("initial_state");
    c.initial_state.position = to_vec2(s0.at("position"));
    c.initial_state.velocity = to_vec2(s0.at("velocity"));
    c.initial_state.time = 0.0;

    c.pressure_limit = merged.at("pressure_limit").get<double>();
    c.point_distance = merged.at("pressure_point_distance").get<double>();
    c.quantization_step = merged.at("quantization_step_deg").get<double>() * kPi / 180.0;

    const json& sv = merged.at("solver");
    c.solver.memory = sv.at("memory").get<int>();
    c.solver.gradient_tolerance = sv.at("gradient_tolerance").get<double>();
    c.solver.max_iterations = sv.at("max_iterations").get<int>();
    c.solver.restarts = sv.at("restarts").get<int>();
    c.solver.local_max_restarts = sv.at("local_max_restarts").get<int>();
    c.solver.normalize = sv.at("normalize").get<bool>();
    c.warm_start = merged.at("warm_start").get<bool>();
    c.random_restart_period = merged.at("random_restart_period").get<int>();

    const json& pid = merged.at("pid");
    c.pid.kp = pid.at("kp").get<double>();
    c.pid.ki = pid.at("ki").get<double>();
    c.pid.kd = pid.at("kd").get<double>();
    c.pid.integrator_clamp = pid.at("integrator_clamp").get<double>();
    c.pid.derivative_filter = pid.at("derivative_filter").get<double>();

    const json& est = merged.at("estimator");
    c.estimator.delay = est.at("delay").get<int>();
    c.estimator.process_noise_density = est.at("process_noise_density").get<double>();
    c.estimator.measurement_std = est.at("measurement_std").get<double>();
    c.estimator.initial_position_std = est.at("initial_position_std").get<double>();
    c.estimator.initial_velocity_std = est.at("initial_velocity_std").get<double>();

    const json& sen = merged.at("sensor");
    c.sensor.noise_std = sen.at("noise_std").get<double>();
    c.sensor.delay = sen.at("delay").get<int>();

    const json& ref = merged.at("reference");
    c.reference.kind = reference_kind_from_string(ref.at("kind").get<std::string>());
    c.reference.center = to_vec2(ref.at("center"));
    c.reference.radius = ref.at("radius").get<double>();
    c.reference.extent = to_vec2(ref.at("extent"));
    c.reference.waypoints.clear();
    for (const json& w : ref.at("waypoints")) c.reference.waypoints.push_back(to_vec2(w));
    c.reference.speed = ref.at("speed").get<double>();
    c.reference.dwell = ref.at("dwell").get<double>();

    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

LoopConfig load_loop_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return loop_config_from_json(doc);
}

}  // namespace phasepush
