#pragma once

// Brute-force STL evaluator used as the independent oracle: direct
// recursion over evaluation times with explicit window scans, no shared
// code with the series-based monitor. Arithmetic mirrors the documented
// semantics operation for operation so agreement is exact, not approximate.

#include <cmath>
#include <optional>
#include <random>

#include "cpsarch/stl.hpp"
#include "cpsarch/trace.hpp"

namespace testsupport {

enum class OracleStatus { Ok, Empty, Horizon };

struct OracleOutcome {
  double value = 0.0;
  OracleStatus status = OracleStatus::Ok;
};

inline constexpr double kOracleEps = 1e-9;

inline std::size_t oracle_index_of(const cpsarch::Trace& trace, double t) {
  for (std::size_t i = 0; i < trace.timestamps.size(); ++i) {
    if (std::fabs(trace.timestamps[i] - t) <= kOracleEps) return i;
  }
  throw std::invalid_argument("oracle: t is not a sample time");
}

inline double oracle_expr(const cpsarch::stl::Expr& e,
                          const cpsarch::Trace& trace, std::size_t i) {
  using K = cpsarch::stl::Expr::Kind;
  switch (e.kind) {
    case K::Constant:
      return e.value;
    case K::Signal:
      return trace.signals.at(e.signal)[i];
    case K::Add:
      return oracle_expr(*e.lhs, trace, i) + oracle_expr(*e.rhs, trace, i);
    case K::Sub:
      return oracle_expr(*e.lhs, trace, i) - oracle_expr(*e.rhs, trace, i);
    case K::Mul:
      return oracle_expr(*e.lhs, trace, i) * oracle_expr(*e.rhs, trace, i);
    case K::Neg:
      return -oracle_expr(*e.lhs, trace, i);
    case K::Abs:
      return std::fabs(oracle_expr(*e.lhs, trace, i));
  }
  return 0.0;
}

inline OracleOutcome oracle_robustness(const cpsarch::stl::Formula& f,
                                       const cpsarch::Trace& trace,
                                       double t) {
  using K = cpsarch::stl::Formula::Kind;
  using Cmp = cpsarch::stl::CmpOp;
  switch (f.kind) {
    case K::Predicate: {
      std::size_t i = oracle_index_of(trace, t);
      double lhs = oracle_expr(*f.pred_lhs, trace, i);
      double rhs = oracle_expr(*f.pred_rhs, trace, i);
      double rob = (f.cmp == Cmp::Lt || f.cmp == Cmp::Le) ? rhs - lhs
                                                          : lhs - rhs;
      return {rob, OracleStatus::Ok};
    }
    case K::Not: {
      OracleOutcome sub = oracle_robustness(*f.left, trace, t);
      if (sub.status == OracleStatus::Ok) sub.value = -sub.value;
      return sub;
    }
    case K::And:
    case K::Or:
    case K::Implies: {
      OracleOutcome a = oracle_robustness(*f.left, trace, t);
      if (a.status != OracleStatus::Ok) return a;
      OracleOutcome b = oracle_robustness(*f.right, trace, t);
      if (b.status != OracleStatus::Ok) return b;
      double v = 0.0;
      if (f.kind == K::And) {
        v = std::min(a.value, b.value);
      } else if (f.kind == K::Or) {
        v = std::max(a.value, b.value);
      } else {
        v = std::max(-a.value, b.value);
      }
      return {v, OracleStatus::Ok};
    }
    case K::Globally:
    case K::Finally: {
      if (t + f.hi > trace.timestamps.back() + kOracleEps) {
        return {0.0, OracleStatus::Horizon};
      }
      bool found = false;
      bool first = true;
      double fold = 0.0;
      for (double sample : trace.timestamps) {
        if (sample < t + f.lo - kOracleEps ||
            sample > t + f.hi + kOracleEps) {
          continue;
        }
        found = true;
        OracleOutcome sub = oracle_robustness(*f.left, trace, sample);
        if (sub.status != OracleStatus::Ok) return sub;
        if (first) {
          fold = sub.value;
          first = false;
        } else if (f.kind == K::Globally) {
          fold = std::min(fold, sub.value);
        } else {
          fold = std::max(fold, sub.value);
        }
      }
      if (!found) return {0.0, OracleStatus::Empty};
      return {fold, OracleStatus::Ok};
    }
  }
  return {0.0, OracleStatus::Ok};
}

/// Boolean semantics on the same samples (strictness respected), for the
/// sign-soundness property.
inline std::optional<bool> oracle_boolean(const cpsarch::stl::Formula& f,
                                          const cpsarch::Trace& trace,
                                          double t) {
  using K = cpsarch::stl::Formula::Kind;
  using Cmp = cpsarch::stl::CmpOp;
  switch (f.kind) {
    case K::Predicate: {
      std::size_t i = oracle_index_of(trace, t);
      double lhs = oracle_expr(*f.pred_lhs, trace, i);
      double rhs = oracle_expr(*f.pred_rhs, trace, i);
      switch (f.cmp) {
        case Cmp::Lt:
          return lhs < rhs;
        case Cmp::Le:
          return lhs <= rhs;
        case Cmp::Gt:
          return lhs > rhs;
        case Cmp::Ge:
          return lhs >= rhs;
      }
      return std::nullopt;
    }
    case K::Not: {
      auto sub = oracle_boolean(*f.left, trace, t);
      if (!sub) return std::nullopt;
      return !*sub;
    }
    case K::And:
    case K::Or:
    case K::Implies: {
      auto a = oracle_boolean(*f.left, trace, t);
      auto b = oracle_boolean(*f.right, trace, t);
      if (!a || !b) return std::nullopt;
      if (f.kind == K::And) return *a && *b;
      if (f.kind == K::Or) return *a || *b;
      return !*a || *b;
    }
    case K::Globally:
    case K::Finally: {
      if (t + f.hi > trace.timestamps.back() + kOracleEps) {
        return std::nullopt;
      }
      bool found = false;
      bool all = true;
      bool any = false;
      for (double sample : trace.timestamps) {
        if (sample < t + f.lo - kOracleEps ||
            sample > t + f.hi + kOracleEps) {
          continue;
        }
        found = true;
        auto sub = oracle_boolean(*f.left, trace, sample);
        if (!sub) return std::nullopt;
        all = all && *sub;
        any = any || *sub;
      }
      if (!found) return std::nullopt;
      return f.kind == K::Globally ? all : any;
    }
  }
  return std::nullopt;
}

}  // namespace testsupport
