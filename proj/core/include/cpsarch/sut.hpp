#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cpsarch/errors.hpp"
#include "cpsarch/trace.hpp"

namespace cpsarch {

class SimulationError : public std::runtime_error {
 public:
  explicit SimulationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Input trace disagrees with the fixed simulation grid.
class GridMismatch : public SimulationError {
 public:
  explicit GridMismatch(const std::string& what) : SimulationError(what) {}
};

/// A state left its guard bounds during integration.
class NumericOverflow : public SimulationError {
 public:
  explicit NumericOverflow(const std::string& what) : SimulationError(what) {}
};

struct SignalSpec {
  std::string name;
  std::string unit;
  double lo = 0.0;  // declared range, inputs only
  double hi = 0.0;

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct SutSignature {
  std::string name;
  std::vector<SignalSpec> inputs;
  std::vector<SignalSpec> outputs;
  double dt = 0.1;
  double horizon = 1.0;
};

/// Deterministic closed-loop plant + controller simulator. simulate() is a
/// pure function of the input trace: repeated calls with the same input
/// produce bit-identical outputs, and instances carry no mutable state, so
/// one instance can serve concurrent runs.
class SystemUnderTest {
 public:
  virtual ~SystemUnderTest() = default;
  virtual const SutSignature& signature() const = 0;

  /// Fixed-step explicit-Euler integration over [0, horizon]; the input
  /// trace must lie exactly on the simulation grid (see sample_grid).
  /// Throws GridMismatch / NumericOverflow.
  virtual Trace simulate(const Trace& input) const = 0;
};

using SutPtr = std::shared_ptr<const SystemUnderTest>;

/// Timestamps 0, dt, 2*dt, ..., horizon (inclusive).
std::vector<double> sample_grid(double dt, double horizon);

/// PID gains with actuator saturation.
struct PidParams {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double u_min = 0.0;
  double u_max = 1.0;
};

/// Fixed-weight single-hidden-layer tanh network standing in for a trained
/// control policy: u = W2 * tanh(W1 * obs + b1) + b2, clamped to the
/// actuator range. Weights are shipped as data, not trained here.
struct SurrogatePolicy {
  std::vector<std::vector<double>> w1;
  std::vector<double> b1;
  std::vector<std::vector<double>> w2;
  std::vector<double> b2;
  std::vector<std::string> observations;
  double u_min = 0.0;
  double u_max = 1.0;
};

/// Builds a system under test from its JSON config (see docs/formats.md).
/// Throws ParseError / SchemaError.
SutPtr load_sut(std::string_view json_bytes);

/// The shipped plants: sc-pid / sc-policy (steam-condenser style pressure
/// plant) and acc-pid / acc-policy (two-vehicle longitudinal model). Each
/// -pid system has a -policy twin with an identical I/O signature.
const std::map<std::string, SutPtr>& builtin_suts();

}  // namespace cpsarch
