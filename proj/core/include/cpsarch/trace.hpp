#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cpsarch/errors.hpp"

namespace cpsarch {

/// A timed multi-signal record: strictly increasing timestamps (seconds)
/// and one aligned value series per signal.
struct Trace {
  std::vector<double> timestamps;
  std::map<std::string, std::vector<double>> signals;

  std::size_t size() const { return timestamps.size(); }

  const std::vector<double>* find_signal(std::string_view name) const {
    auto it = signals.find(std::string(name));
    return it == signals.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Throws std::invalid_argument when timestamps are empty or not strictly
/// increasing, or when a signal series length disagrees with them.
void require_valid(const Trace& trace);

/// Reads the trace CSV interchange format: header "time,<signal>...",
/// one row per sample. Throws ParseError / SchemaError.
Trace read_trace_csv(std::string_view bytes);

/// Deterministic CSV with shortest round-trip number formatting; columns
/// are the signals in sorted order.
std::string write_trace_csv(const Trace& trace);

}  // namespace cpsarch
