#include "cpsarch/sut.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <variant>

#include <json.hpp>

#include "embedded_data.hpp"

namespace cpsarch {

using nlohmann::json;

std::vector<double> sample_grid(double dt, double horizon) {
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    grid[k] = static_cast<double>(k) * dt;
  }
  return grid;
}

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kStateGuard = 1e6;

struct ScPlantParams {
  double tau = 2.0;
  double ambient = 80.0;
  double control_gain = 1.0;
  double disturbance_gain = 3.0;
  double initial_pressure = 80.0;
  double setpoint = 87.25;
};

struct AccPlantParams {
  double tau_lead = 2.0;
  double time_gap = 1.4;
  double default_spacing = 10.0;
  double initial_gap = 40.0;
  double initial_ego_velocity = 20.0;
  double initial_lead_velocity = 20.0;
};

using PlantParams = std::variant<ScPlantParams, AccPlantParams>;
using Controller = std::variant<PidParams, SurrogatePolicy>;

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

/// Incremental PID with derivative on the error and integral clamping so
/// the integral term alone cannot exceed the actuator range.
struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool first = true;

  double step(const PidParams& p, double error, double dt) {
    double edot = first ? 0.0 : (error - prev_error) / dt;
    first = false;
    prev_error = error;
    integral += error * dt;
    if (p.ki > 0.0) {
      integral = clamp(integral, p.u_min / p.ki, p.u_max / p.ki);
    }
    double u = p.kp * error + p.ki * integral + p.kd * edot;
    return clamp(u, p.u_min, p.u_max);
  }
};

using Observation = std::pair<std::string_view, double>;

double lookup(std::span<const Observation> observed, std::string_view name) {
  for (const Observation& o : observed) {
    if (o.first == name) return o.second;
  }
  return 0.0;  // names are validated at load time
}

double eval_policy(const SurrogatePolicy& policy,
                   std::span<const Observation> observed) {
  const std::size_t hidden = policy.b1.size();
  double out = policy.b2[0];
  for (std::size_t h = 0; h < hidden; ++h) {
    double pre = policy.b1[h];
    for (std::size_t j = 0; j < policy.observations.size(); ++j) {
      pre += policy.w1[h][j] * lookup(observed, policy.observations[j]);
    }
    out += policy.w2[0][h] * std::tanh(pre);
  }
  return clamp(out, policy.u_min, policy.u_max);
}

class ClosedLoopSut : public SystemUnderTest {
 public:
  ClosedLoopSut(SutSignature signature, PlantParams plant,
                Controller controller)
      : signature_(std::move(signature)),
        plant_(std::move(plant)),
        controller_(std::move(controller)) {}

  const SutSignature& signature() const override { return signature_; }

  Trace simulate(const Trace& input) const override {
    const std::vector<double> grid =
        sample_grid(signature_.dt, signature_.horizon);
    check_grid(input, grid);

    std::vector<const std::vector<double>*> in_series;
    for (const SignalSpec& spec : signature_.inputs) {
      const std::vector<double>* series = input.find_signal(spec.name);
      if (series == nullptr) {
        throw GridMismatch("sut '" + signature_.name +
                           "': input trace lacks signal '" + spec.name + "'");
      }
      in_series.push_back(series);
    }

    if (std::holds_alternative<ScPlantParams>(plant_)) {
      return simulate_sc(grid, *in_series[0]);
    }
    return simulate_acc(grid, *in_series[0]);
  }

 private:
  void check_grid(const Trace& input, const std::vector<double>& grid) const {
    if (input.timestamps.size() != grid.size()) {
      throw GridMismatch("sut '" + signature_.name + "': input has " +
                         std::to_string(input.timestamps.size()) +
                         " samples, grid needs " +
                         std::to_string(grid.size()));
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (std::fabs(input.timestamps[k] - grid[k]) > kTimeEps) {
        throw GridMismatch("sut '" + signature_.name +
                           "': input timestamps leave the simulation grid");
      }
    }
  }

  double control(std::span<const Observation> observed, double error,
                 PidState& pid, double dt) const {
    if (const auto* p = std::get_if<PidParams>(&controller_)) {
      return pid.step(*p, error, dt);
    }
    return eval_policy(std::get<SurrogatePolicy>(controller_), observed);
  }

  Trace simulate_sc(const std::vector<double>& grid,
                    const std::vector<double>& disturbance) const {
    const auto& pp = std::get<ScPlantParams>(plant_);
    const double dt = signature_.dt;

    Trace out;
    out.timestamps = grid;
    std::vector<double>& pressure = out.signals["pressure"];
    pressure.reserve(grid.size());

    double p = pp.initial_pressure;
    PidState pid;
    double prev_error = pp.setpoint - p;
    bool first = true;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      pressure.push_back(p);
      if (k + 1 == grid.size()) break;

      const double d = disturbance[k];
      const double error = pp.setpoint - p;
      const double error_rate = first ? 0.0 : (error - prev_error) / dt;
      first = false;
      prev_error = error;

      const std::array<Observation, 4> observed = {{{"error", error},
                                                    {"error_rate", error_rate},
                                                    {"disturbance", d},
                                                    {"pressure", p}}};
      const double u = control(observed, error, pid, dt);
      const double dp =
          (pp.ambient - p + pp.control_gain * u + pp.disturbance_gain * d) /
          pp.tau;
      p += dt * dp;
      if (!std::isfinite(p) || std::fabs(p) > kStateGuard) {
        throw NumericOverflow("sut '" + signature_.name +
                              "': pressure left guard bounds");
      }
    }
    return out;
  }

  Trace simulate_acc(const std::vector<double>& grid,
                     const std::vector<double>& lead_command) const {
    const auto& pp = std::get<AccPlantParams>(plant_);
    const double dt = signature_.dt;

    Trace out;
    out.timestamps = grid;
    std::vector<double>& distance = out.signals["distance"];
    std::vector<double>& ego_velocity = out.signals["ego_velocity"];
    distance.reserve(grid.size());
    ego_velocity.reserve(grid.size());

    double gap = pp.initial_gap;
    double v_ego = pp.initial_ego_velocity;
    double v_lead = pp.initial_lead_velocity;
    PidState pid;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      distance.push_back(gap);
      ego_velocity.push_back(v_ego);
      if (k + 1 == grid.size()) break;

      const double cmd = lead_command[k];
      const double gap_error =
          gap - (pp.default_spacing + pp.time_gap * v_ego);
      const std::array<Observation, 4> observed = {
          {{"gap_error", gap_error},
           {"relative_velocity", v_lead - v_ego},
           {"ego_velocity", v_ego},
           {"lead_command", cmd}}};
      const double accel = control(observed, gap_error, pid, dt);

      gap += dt * (v_lead - v_ego);
      v_ego = std::max(0.0, v_ego + dt * accel);
      v_lead += dt * ((cmd - v_lead) / pp.tau_lead);
      if (!std::isfinite(gap) || std::fabs(gap) > kStateGuard ||
          std::fabs(v_ego) > kStateGuard || std::fabs(v_lead) > kStateGuard) {
        throw NumericOverflow("sut '" + signature_.name +
                              "': state left guard bounds");
      }
    }
    return out;
  }

  SutSignature signature_;
  PlantParams plant_;
  Controller controller_;
};

// --- config parsing ---

double require_number(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw SchemaError(std::string("sut config: missing number '") + key +
                      "' in " + where);
  }
  return it->get<double>();
}

std::string require_str(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw SchemaError(std::string("sut config: missing string '") + key +
                      "' in " + where);
  }
  return it->get<std::string>();
}

std::vector<SignalSpec> parse_signals(const json& arr, bool with_range,
                                      const char* where) {
  if (!arr.is_array() || arr.empty()) {
    throw SchemaError(std::string("sut config: '") + where +
                      "' must be a nonempty array");
  }
  std::vector<SignalSpec> specs;
  for (const json& j : arr) {
    SignalSpec spec;
    spec.name = require_str(j, "name", where);
    spec.unit = j.contains("unit") ? j["unit"].get<std::string>() : "";
    if (with_range) {
      auto it = j.find("range");
      if (it == j.end() || !it->is_array() || it->size() != 2) {
        throw SchemaError("sut config: input '" + spec.name +
                          "' needs a [lo, hi] range");
      }
      spec.lo = (*it)[0].get<double>();
      spec.hi = (*it)[1].get<double>();
      if (!(spec.lo < spec.hi)) {
        throw SchemaError("sut config: input '" + spec.name +
                          "' range must satisfy lo < hi");
      }
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<std::vector<double>> parse_matrix(const json& j,
                                              const char* where) {
  if (!j.is_array() || j.empty()) {
    throw SchemaError(std::string("sut config: '") + where +
                      "' must be a nonempty matrix");
  }
  std::vector<std::vector<double>> m;
  std::size_t cols = 0;
  for (const json& row : j) {
    if (!row.is_array() || row.empty()) {
      throw SchemaError(std::string("sut config: '") + where +
                        "' rows must be nonempty arrays");
    }
    std::vector<double> r = row.get<std::vector<double>>();
    if (cols == 0) cols = r.size();
    if (r.size() != cols) {
      throw SchemaError(std::string("sut config: '") + where +
                        "' rows have inconsistent lengths");
    }
    m.push_back(std::move(r));
  }
  return m;
}

Controller parse_controller(const json& j, const char* family) {
  std::string type = require_str(j, "type", "controller");
  if (type == "pid") {
    PidParams p;
    p.kp = require_number(j, "kp", "controller");
    p.ki = require_number(j, "ki", "controller");
    p.kd = require_number(j, "kd", "controller");
    p.u_min = require_number(j, "u_min", "controller");
    p.u_max = require_number(j, "u_max", "controller");
    if (!(p.u_min < p.u_max)) {
      throw SchemaError("sut config: controller saturation needs "
                        "u_min < u_max");
    }
    return p;
  }
  if (type == "policy") {
    SurrogatePolicy p;
    p.u_min = require_number(j, "u_min", "controller");
    p.u_max = require_number(j, "u_max", "controller");
    if (!(p.u_min < p.u_max)) {
      throw SchemaError("sut config: controller saturation needs "
                        "u_min < u_max");
    }
    auto wit = j.find("weights");
    if (wit == j.end() || !wit->is_object()) {
      throw SchemaError("sut config: policy controller needs 'weights'");
    }
    p.w1 = parse_matrix((*wit)["W1"], "weights.W1");
    p.b1 = (*wit)["b1"].get<std::vector<double>>();
    p.w2 = parse_matrix((*wit)["W2"], "weights.W2");
    p.b2 = (*wit)["b2"].get<std::vector<double>>();

    auto oit = j.find("observations");
    if (oit == j.end() || !oit->is_array() || oit->empty()) {
      throw SchemaError("sut config: policy controller needs 'observations'");
    }
    p.observations = oit->get<std::vector<std::string>>();

    const std::size_t hidden = p.b1.size();
    if (p.w1.size() != hidden || p.w1[0].size() != p.observations.size() ||
        p.w2.size() != 1 || p.w2[0].size() != hidden || p.b2.size() != 1) {
      throw SchemaError("sut config: policy weight shapes are inconsistent");
    }

    static const std::map<std::string, std::vector<std::string>> kObsNames = {
        {"sc", {"error", "error_rate", "disturbance", "pressure"}},
        {"acc",
         {"gap_error", "relative_velocity", "ego_velocity", "lead_command"}}};
    const auto& allowed = kObsNames.at(family);
    for (const std::string& name : p.observations) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        throw SchemaError("sut config: unknown observation '" + name +
                          "' for family '" + std::string(family) + "'");
      }
    }
    return p;
  }
  throw SchemaError("sut config: unknown controller type '" + type + "'");
}

}  // namespace

SutPtr load_sut(std::string_view json_bytes) {
  json doc;
  try {
    doc = json::parse(json_bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("sut config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("sut config: top level must be an object");
  }
  if (require_str(doc, "schema_version", "document") != "1") {
    throw SchemaError("sut config: unsupported schema_version");
  }

  SutSignature sig;
  sig.name = require_str(doc, "name", "document");
  sig.dt = require_number(doc, "dt", "document");
  sig.horizon = require_number(doc, "horizon", "document");
  if (!(sig.dt > 0.0) || !(sig.horizon >= sig.dt)) {
    throw SchemaError("sut config: need dt > 0 and horizon >= dt");
  }
  sig.inputs = parse_signals(doc["inputs"], /*with_range=*/true, "inputs");
  sig.outputs = parse_signals(doc["outputs"], /*with_range=*/false, "outputs");

  std::string kind = require_str(doc, "kind", "document");
  auto pit = doc.find("plant");
  if (pit == doc.end() || !pit->is_object()) {
    throw SchemaError("sut config: missing 'plant' object");
  }
  auto cit = doc.find("controller");
  if (cit == doc.end() || !cit->is_object()) {
    throw SchemaError("sut config: missing 'controller' object");
  }

  PlantParams plant;
  if (kind == "sc") {
    ScPlantParams p;
    p.tau = require_number(*pit, "tau", "plant");
    p.ambient = require_number(*pit, "ambient", "plant");
    p.control_gain = require_number(*pit, "control_gain", "plant");
    p.disturbance_gain = require_number(*pit, "disturbance_gain", "plant");
    p.initial_pressure = require_number(*pit, "initial_pressure", "plant");
    p.setpoint = require_number(*pit, "setpoint", "plant");
    if (!(p.tau > 0.0)) throw SchemaError("sut config: plant tau must be > 0");
    plant = p;
  } else if (kind == "acc") {
    AccPlantParams p;
    p.tau_lead = require_number(*pit, "tau_lead", "plant");
    p.time_gap = require_number(*pit, "time_gap", "plant");
    p.default_spacing = require_number(*pit, "default_spacing", "plant");
    p.initial_gap = require_number(*pit, "initial_gap", "plant");
    p.initial_ego_velocity =
        require_number(*pit, "initial_ego_velocity", "plant");
    p.initial_lead_velocity =
        require_number(*pit, "initial_lead_velocity", "plant");
    if (!(p.tau_lead > 0.0)) {
      throw SchemaError("sut config: plant tau_lead must be > 0");
    }
    plant = p;
  } else {
    throw SchemaError("sut config: unknown kind '" + kind + "'");
  }

  Controller controller = parse_controller(*cit, kind.c_str());
  return std::make_shared<ClosedLoopSut>(std::move(sig), std::move(plant),
                                         std::move(controller));
}

const std::map<std::string, SutPtr>& builtin_suts() {
  static const std::map<std::string, SutPtr> suts = [] {
    std::map<std::string, SutPtr> m;
    for (std::string_view config :
         {embedded::kSutScPid, embedded::kSutScPolicy, embedded::kSutAccPid,
          embedded::kSutAccPolicy}) {
      SutPtr sut = load_sut(config);
      m.emplace(sut->signature().name, sut);
    }
    return m;
  }();
  return suts;
}

}  // namespace cpsarch
