#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cpsarch/stl.hpp"
#include "cpsarch/sut.hpp"

namespace cpsarch {

enum class Interpolation { PiecewiseConstant, PiecewiseLinear };

struct InputChannel {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int control_points = 4;
  Interpolation interpolation = Interpolation::PiecewiseLinear;
};

/// Search space of the falsifier: per input channel a range box, a number
/// of control points and the interpolation used to stretch them over the
/// simulation grid.
struct InputSpec {
  std::vector<InputChannel> channels;
};

/// Simulated-annealing schedule. Robustness deltas are normalized by the
/// first observed magnitude, so initial_temperature 1.0 is a sensible
/// default independent of the requirement's scale.
struct AnnealingSchedule {
  double initial_temperature = 1.0;
  double cooling_factor = 0.97;
  double proposal_scale = 0.1;
  int max_iterations = 300;
  std::uint64_t rng_seed = 0;
};

/// One value row per channel, channel order following InputSpec.
using ControlPoints = std::vector<std::vector<double>>;

class OutOfRange : public std::runtime_error {
 public:
  explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

/// Places control points at equal spacing over the grid span and
/// interpolates them to every grid timestamp. PiecewiseConstant splits the
/// span into k equal segments (point i holds on segment i); PiecewiseLinear
/// places the k points at the segment joints and interpolates linearly.
/// Throws OutOfRange when a control point leaves its channel range.
Trace synthesize_input(const InputSpec& spec, const ControlPoints& points,
                       const std::vector<double>& grid);

enum class FalsifyVerdict { Falsified, NotFalsified };

struct FalsificationResult {
  FalsifyVerdict verdict = FalsifyVerdict::NotFalsified;
  double best_robustness = 0.0;
  ControlPoints best_input;
  int iterations_used = 0;
  double wall_time_seconds = 0.0;  // simulation + monitoring only
  std::uint64_t seed = 0;
};

struct CampaignResult {
  std::vector<FalsificationResult> executions;
  int violated_executions = 0;
  double avg_time_seconds = 0.0;
  bool falsified = false;
};

/// Called after every evaluated iteration with the candidate's robustness
/// and the best value seen so far.
using IterationObserver =
    std::function<void(int iteration, double robustness, double best)>;

/// One simulated-annealing run: start from a uniform-random point in the
/// box, perturb with Gaussian noise whose scale shrinks with temperature,
/// accept by the Metropolis criterion on robustness, stop at a violation
/// or after max_iterations. Deterministic given the seed and a
/// deterministic system under test.
FalsificationResult falsify_once(const SystemUnderTest& sut,
                                 const stl::StlFormula& formula,
                                 const InputSpec& spec,
                                 const AnnealingSchedule& schedule,
                                 const IterationObserver& observer = {});

/// Runs `executions` independent falsifications with seeds rng_seed,
/// rng_seed + 1, ... and aggregates the outcome counts and mean wall time.
CampaignResult run_campaign(const SystemUnderTest& sut,
                            const stl::StlFormula& formula,
                            const InputSpec& spec,
                            const AnnealingSchedule& schedule,
                            int executions);

// --- campaign config / result files ---

struct CampaignConfig {
  std::string sut_name;              // builtin name ...
  std::string sut_file;              // ... or config file path
  std::string requirement_id;        // builtin requirement id ...
  std::string formula_text;          // ... or inline STL over sut outputs
  std::optional<InputSpec> input;    // defaults to sut ranges, k=4, linear
  AnnealingSchedule schedule;
  int executions = 1;
};

/// Parses a campaign config document (see docs/formats.md). Defaults are
/// filled during resolve_campaign, which needs the sut signature.
CampaignConfig parse_campaign_config(std::string_view bytes);

struct ResolvedCampaign {
  SutPtr sut;
  stl::StlFormula formula;
  std::string requirement_label;  // id or "inline"
  InputSpec input;
  AnnealingSchedule schedule;
  int executions = 1;
};

/// Loads the sut (builtin map or config file), resolves the requirement,
/// checks that the sut outputs cover the formula's signals, and fills
/// input-spec defaults from the sut signature. Throws SchemaError on any
/// mismatch.
ResolvedCampaign resolve_campaign(const CampaignConfig& config);

/// Result serialization. Timing fields are emitted only when
/// include_timing is set; without them reruns are byte-identical.
std::string campaign_to_json(const ResolvedCampaign& campaign,
                             const CampaignResult& result,
                             bool include_timing);
std::string campaign_to_csv(const ResolvedCampaign& campaign,
                            const CampaignResult& result,
                            bool include_timing);

}  // namespace cpsarch
