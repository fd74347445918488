#include "cpsarch/falsify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "detail/number_format.hpp"

namespace cpsarch {

using nlohmann::json;

namespace {

/// Engine-level randomness: mt19937_64 is specified bit-exactly, and the
/// uniform/Gaussian draws below avoid the implementation-defined standard
/// distributions, so runs reproduce across toolchains.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

void check_spec(const InputSpec& spec) {
  if (spec.channels.empty()) {
    throw std::invalid_argument("input spec: needs at least one channel");
  }
  for (const InputChannel& ch : spec.channels) {
    if (!(ch.lo < ch.hi)) {
      throw std::invalid_argument("input spec: channel '" + ch.name +
                                  "' needs lo < hi");
    }
    if (ch.control_points < 1) {
      throw std::invalid_argument("input spec: channel '" + ch.name +
                                  "' needs control_points >= 1");
    }
  }
}

void check_schedule(const AnnealingSchedule& s) {
  if (!(s.initial_temperature > 0.0) || !(s.cooling_factor > 0.0) ||
      !(s.cooling_factor < 1.0) || !(s.proposal_scale > 0.0) ||
      s.max_iterations < 1) {
    throw std::invalid_argument("annealing schedule: parameter out of range");
  }
}

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

}  // namespace

Trace synthesize_input(const InputSpec& spec, const ControlPoints& points,
                       const std::vector<double>& grid) {
  check_spec(spec);
  if (grid.empty()) {
    throw std::invalid_argument("synthesize_input: empty grid");
  }
  if (points.size() != spec.channels.size()) {
    throw std::invalid_argument(
        "synthesize_input: control point rows must match channels");
  }

  const double t0 = grid.front();
  const double span = grid.back() - grid.front();

  Trace trace;
  trace.timestamps = grid;
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const InputChannel& ch = spec.channels[c];
    const std::vector<double>& pts = points[c];
    const auto k = static_cast<std::size_t>(ch.control_points);
    if (pts.size() != k) {
      throw std::invalid_argument("synthesize_input: channel '" + ch.name +
                                  "' expects " + std::to_string(k) +
                                  " control points");
    }
    for (double v : pts) {
      if (v < ch.lo || v > ch.hi) {
        throw OutOfRange("synthesize_input: control point " +
                         detail::format_double(v) + " outside [" +
                         detail::format_double(ch.lo) + ", " +
                         detail::format_double(ch.hi) + "] of channel '" +
                         ch.name + "'");
      }
    }

    std::vector<double>& series = trace.signals[ch.name];
    series.reserve(grid.size());
    for (double t : grid) {
      double v = 0.0;
      if (k == 1 || span <= 0.0) {
        v = pts[0];
      } else if (ch.interpolation == Interpolation::PiecewiseConstant) {
        auto idx = static_cast<std::size_t>((t - t0) / span *
                                            static_cast<double>(k));
        if (idx >= k) idx = k - 1;
        v = pts[idx];
      } else {
        double x = (t - t0) / span * static_cast<double>(k - 1);
        auto j = static_cast<std::size_t>(x);
        if (j >= k - 1) {
          v = pts[k - 1];
        } else {
          double frac = x - static_cast<double>(j);
          v = pts[j] + (pts[j + 1] - pts[j]) * frac;
        }
      }
      series.push_back(v);
    }
  }
  return trace;
}

FalsificationResult falsify_once(const SystemUnderTest& sut,
                                 const stl::StlFormula& formula,
                                 const InputSpec& spec,
                                 const AnnealingSchedule& schedule,
                                 const IterationObserver& observer) {
  check_spec(spec);
  check_schedule(schedule);

  const SutSignature& sig = sut.signature();
  {
    std::set<std::string> outputs;
    for (const SignalSpec& s : sig.outputs) outputs.insert(s.name);
    for (const std::string& name : stl::referenced_signals(formula)) {
      if (!outputs.contains(name)) {
        throw stl::UnknownSignal("falsify: sut '" + sig.name +
                                 "' does not output signal '" + name + "'");
      }
    }
  }

  const std::vector<double> grid = sample_grid(sig.dt, sig.horizon);
  RandomSource rng(schedule.rng_seed);

  double wall_seconds = 0.0;
  auto evaluate = [&](const ControlPoints& pts) {
    auto start = std::chrono::steady_clock::now();
    Trace input = synthesize_input(spec, pts, grid);
    Trace output = sut.simulate(input);
    double rob = stl::robustness(formula, output, grid.front());
    wall_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return rob;
  };

  ControlPoints current;
  for (const InputChannel& ch : spec.channels) {
    std::vector<double> pts(static_cast<std::size_t>(ch.control_points));
    for (double& v : pts) v = rng.uniform(ch.lo, ch.hi);
    current.push_back(std::move(pts));
  }

  double current_rob = evaluate(current);
  ControlPoints best = current;
  double best_rob = current_rob;
  int iterations = 1;
  if (observer) observer(iterations, current_rob, best_rob);

  const double norm = std::max(std::fabs(current_rob), 1e-12);
  double temperature = schedule.initial_temperature;

  while (best_rob >= 0.0 && iterations < schedule.max_iterations) {
    temperature *= schedule.cooling_factor;

    ControlPoints candidate = current;
    for (std::size_t c = 0; c < spec.channels.size(); ++c) {
      const InputChannel& ch = spec.channels[c];
      const double stddev = schedule.proposal_scale * (ch.hi - ch.lo) *
                            (temperature / schedule.initial_temperature);
      for (double& v : candidate[c]) {
        v = clamp(v + rng.gaussian() * stddev, ch.lo, ch.hi);
      }
    }

    ++iterations;
    double candidate_rob = evaluate(candidate);
    if (candidate_rob < best_rob) {
      best_rob = candidate_rob;
      best = candidate;
    }
    if (observer) observer(iterations, candidate_rob, best_rob);
    double delta = (candidate_rob - current_rob) / norm;
    if (candidate_rob < current_rob ||
        rng.uniform01() < std::exp(-delta / temperature)) {
      current = std::move(candidate);
      current_rob = candidate_rob;
    }
  }

  FalsificationResult result;
  result.verdict = best_rob < 0.0 ? FalsifyVerdict::Falsified
                                  : FalsifyVerdict::NotFalsified;
  result.best_robustness = best_rob;
  result.best_input = std::move(best);
  result.iterations_used = iterations;
  result.wall_time_seconds = wall_seconds;
  result.seed = schedule.rng_seed;
  return result;
}

CampaignResult run_campaign(const SystemUnderTest& sut,
                            const stl::StlFormula& formula,
                            const InputSpec& spec,
                            const AnnealingSchedule& schedule,
                            int executions) {
  if (executions < 1) {
    throw std::invalid_argument("campaign: executions must be >= 1");
  }
  CampaignResult campaign;
  double total_time = 0.0;
  for (int i = 0; i < executions; ++i) {
    AnnealingSchedule run = schedule;
    run.rng_seed = schedule.rng_seed + static_cast<std::uint64_t>(i);
    FalsificationResult result = falsify_once(sut, formula, spec, run);
    total_time += result.wall_time_seconds;
    if (result.verdict == FalsifyVerdict::Falsified) {
      ++campaign.violated_executions;
    }
    campaign.executions.push_back(std::move(result));
  }
  campaign.avg_time_seconds = total_time / executions;
  campaign.falsified = campaign.violated_executions > 0;
  return campaign;
}

// --- config / result files ---

namespace {

Interpolation parse_interpolation(const std::string& text) {
  if (text == "piecewise-constant") return Interpolation::PiecewiseConstant;
  if (text == "piecewise-linear") return Interpolation::PiecewiseLinear;
  throw SchemaError("campaign config: unknown interpolation '" + text + "'");
}

}  // namespace

CampaignConfig parse_campaign_config(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("campaign config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw SchemaError("campaign config: top level must be an object");
  }

  CampaignConfig config;
  if (auto it = doc.find("sut"); it != doc.end()) {
    if (it->is_string()) {
      config.sut_name = it->get<std::string>();
    } else if (it->is_object() && it->contains("file")) {
      config.sut_file = (*it)["file"].get<std::string>();
    } else {
      throw SchemaError("campaign config: 'sut' must be a builtin name or "
                        "{\"file\": path}");
    }
  } else {
    throw SchemaError("campaign config: missing 'sut'");
  }

  bool has_req = doc.contains("requirement");
  bool has_formula = doc.contains("formula");
  if (has_req == has_formula) {
    throw SchemaError(
        "campaign config: exactly one of 'requirement' or 'formula'");
  }
  if (has_req) config.requirement_id = doc["requirement"].get<std::string>();
  if (has_formula) config.formula_text = doc["formula"].get<std::string>();

  if (auto it = doc.find("input"); it != doc.end()) {
    InputSpec spec;
    if (!it->is_object() || !it->contains("channels")) {
      throw SchemaError("campaign config: 'input' needs 'channels'");
    }
    for (const json& jc : (*it)["channels"]) {
      InputChannel ch;
      ch.name = jc.at("name").get<std::string>();
      if (jc.contains("range")) {
        ch.lo = jc["range"][0].get<double>();
        ch.hi = jc["range"][1].get<double>();
      } else {
        // filled from the sut signature on resolve
        ch.lo = ch.hi = std::numeric_limits<double>::quiet_NaN();
      }
      if (jc.contains("control_points")) {
        ch.control_points = jc["control_points"].get<int>();
      }
      if (jc.contains("interpolation")) {
        ch.interpolation =
            parse_interpolation(jc["interpolation"].get<std::string>());
      }
      spec.channels.push_back(std::move(ch));
    }
    config.input = std::move(spec);
  }

  if (auto it = doc.find("schedule"); it != doc.end()) {
    const json& js = *it;
    AnnealingSchedule& s = config.schedule;
    if (js.contains("initial_temperature")) {
      s.initial_temperature = js["initial_temperature"].get<double>();
    }
    if (js.contains("cooling_factor")) {
      s.cooling_factor = js["cooling_factor"].get<double>();
    }
    if (js.contains("proposal_scale")) {
      s.proposal_scale = js["proposal_scale"].get<double>();
    }
    if (js.contains("max_iterations")) {
      s.max_iterations = js["max_iterations"].get<int>();
    }
    if (js.contains("seed")) {
      s.rng_seed = js["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("executions")) {
    config.executions = doc["executions"].get<int>();
    if (config.executions < 1) {
      throw SchemaError("campaign config: executions must be >= 1");
    }
  }
  return config;
}

ResolvedCampaign resolve_campaign(const CampaignConfig& config) {
  ResolvedCampaign resolved;

  if (!config.sut_name.empty()) {
    const auto& suts = builtin_suts();
    auto it = suts.find(config.sut_name);
    if (it == suts.end()) {
      throw SchemaError("campaign config: no builtin sut named '" +
                        config.sut_name + "'");
    }
    resolved.sut = it->second;
  } else {
    std::ifstream in(config.sut_file, std::ios::binary);
    if (!in) {
      throw SchemaError("campaign config: cannot read sut file '" +
                        config.sut_file + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    resolved.sut = load_sut(buf.str());
  }

  const SutSignature& sig = resolved.sut->signature();
  if (!config.requirement_id.empty()) {
    const auto& reqs = stl::builtin_requirements();
    auto it = reqs.find(config.requirement_id);
    if (it == reqs.end()) {
      throw SchemaError("campaign config: no builtin requirement '" +
                        config.requirement_id + "'");
    }
    resolved.formula = it->second.formula;
    resolved.requirement_label = config.requirement_id;
  } else {
    stl::SignalDeclarations decls;
    for (const SignalSpec& out : sig.outputs) {
      decls.push_back({out.name, out.unit});
    }
    resolved.formula = stl::parse_stl(config.formula_text, decls);
    resolved.requirement_label = "inline";
  }

  {
    std::set<std::string> outputs;
    for (const SignalSpec& s : sig.outputs) outputs.insert(s.name);
    for (const std::string& name : stl::referenced_signals(resolved.formula)) {
      if (!outputs.contains(name)) {
        throw SchemaError("campaign config: requirement references signal '" +
                          name + "' that sut '" + sig.name +
                          "' does not output");
      }
    }
  }

  if (config.input) {
    resolved.input = *config.input;
    std::map<std::string, const SignalSpec*> declared;
    for (const SignalSpec& in : sig.inputs) declared.emplace(in.name, &in);
    std::set<std::string> seen;
    for (InputChannel& ch : resolved.input.channels) {
      auto it = declared.find(ch.name);
      if (it == declared.end()) {
        throw SchemaError("campaign config: sut '" + sig.name +
                          "' has no input channel '" + ch.name + "'");
      }
      if (!seen.insert(ch.name).second) {
        throw SchemaError("campaign config: duplicate channel '" + ch.name +
                          "'");
      }
      if (std::isnan(ch.lo)) {  // range omitted, use the declared one
        ch.lo = it->second->lo;
        ch.hi = it->second->hi;
      }
    }
    if (resolved.input.channels.size() != sig.inputs.size()) {
      throw SchemaError("campaign config: input spec must cover every sut "
                        "input channel");
    }
  } else {
    for (const SignalSpec& in : sig.inputs) {
      InputChannel ch;
      ch.name = in.name;
      ch.lo = in.lo;
      ch.hi = in.hi;
      resolved.input.channels.push_back(std::move(ch));
    }
  }

  resolved.schedule = config.schedule;
  resolved.executions = config.executions;
  return resolved;
}

namespace {

json result_json(const ResolvedCampaign& campaign,
                 const FalsificationResult& r, bool include_timing) {
  json j;
  j["seed"] = r.seed;
  j["verdict"] =
      r.verdict == FalsifyVerdict::Falsified ? "Falsified" : "NotFalsified";
  j["best_robustness"] = r.best_robustness;
  j["iterations_used"] = r.iterations_used;
  if (include_timing) j["wall_time_seconds"] = r.wall_time_seconds;
  json input = json::object();
  for (std::size_t c = 0; c < campaign.input.channels.size(); ++c) {
    input[campaign.input.channels[c].name] = r.best_input[c];
  }
  j["best_input"] = std::move(input);
  return j;
}

}  // namespace

std::string campaign_to_json(const ResolvedCampaign& campaign,
                             const CampaignResult& result,
                             bool include_timing) {
  json doc;
  doc["sut"] = campaign.sut->signature().name;
  doc["requirement"] = campaign.requirement_label;
  doc["executions"] = static_cast<int>(result.executions.size());
  doc["violated_executions"] = result.violated_executions;
  doc["falsified"] = result.falsified;
  if (include_timing) doc["avg_time_seconds"] = result.avg_time_seconds;
  json runs = json::array();
  for (const FalsificationResult& r : result.executions) {
    runs.push_back(result_json(campaign, r, include_timing));
  }
  doc["results"] = std::move(runs);
  return doc.dump(2) + "\n";
}

std::string campaign_to_csv(const ResolvedCampaign& campaign,
                            const CampaignResult& result,
                            bool include_timing) {
  std::ostringstream os;
  os << "Sut,Requirement,#Violated Exec.,Avg. time,# Fals. Requirements\n";
  os << campaign.sut->signature().name << ',' << campaign.requirement_label
     << ',' << result.violated_executions << ',';
  if (include_timing) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", result.avg_time_seconds);
    os << buf;
  } else {
    os << '-';
  }
  os << ',' << (result.falsified ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace cpsarch
