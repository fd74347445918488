#include <algorithm>
#include <cmath>
#include <deque>

#include "cpsarch/stl.hpp"

namespace cpsarch::stl {

namespace {

constexpr double kTimeEps = 1e-9;

enum class Status : uint8_t { Ok, Empty, Horizon };

struct Entry {
  double value = 0.0;
  Status status = Status::Ok;
};

using Series = std::vector<Entry>;

double eval_expr(const Expr& e,
                 const std::map<std::string, const std::vector<double>*>& sig,
                 std::size_t i) {
  switch (e.kind) {
    case Expr::Kind::Constant:
      return e.value;
    case Expr::Kind::Signal:
      return (*sig.at(e.signal))[i];
    case Expr::Kind::Add:
      return eval_expr(*e.lhs, sig, i) + eval_expr(*e.rhs, sig, i);
    case Expr::Kind::Sub:
      return eval_expr(*e.lhs, sig, i) - eval_expr(*e.rhs, sig, i);
    case Expr::Kind::Mul:
      return eval_expr(*e.lhs, sig, i) * eval_expr(*e.rhs, sig, i);
    case Expr::Kind::Neg:
      return -eval_expr(*e.lhs, sig, i);
    case Expr::Kind::Abs:
      return std::fabs(eval_expr(*e.lhs, sig, i));
  }
  return 0.0;
}

// Sliding min/max over the index windows [first(i), last(i)] with a
// monotonic deque; both window ends are nondecreasing in i. A non-Ok
// sub-entry inside a consulted window invalidates that evaluation point.
Series window_fold(const Series& sub, const std::vector<double>& ts,
                   double lo, double hi, bool take_min) {
  const std::size_t n = ts.size();
  const double last_t = ts.back();
  Series out(n);

  std::vector<std::size_t> first(n), last(n);
  {
    std::size_t f = 0, l = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double wlo = ts[i] + lo;
      double whi = ts[i] + hi;
      while (f < n && ts[f] < wlo - kTimeEps) ++f;
      while (l + 1 < n && ts[l + 1] <= whi + kTimeEps) ++l;
      first[i] = f;
      last[i] = l;  // meaningful only when the window is nonempty
    }
  }

  std::vector<std::size_t> invalid_prefix(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    invalid_prefix[j + 1] =
        invalid_prefix[j] + (sub[j].status != Status::Ok ? 1 : 0);
  }

  // The deque holds only Ok entries; reads happen only when the consulted
  // window contains no invalid entry at all.
  std::deque<std::size_t> dq;
  std::size_t added = 0;
  auto better = [take_min](double a, double b) {
    return take_min ? a <= b : a >= b;
  };

  for (std::size_t i = 0; i < n; ++i) {
    double whi = ts[i] + hi;
    if (whi > last_t + kTimeEps) {
      out[i] = {0.0, Status::Horizon};
      continue;
    }
    if (first[i] >= n || ts[first[i]] > whi + kTimeEps) {
      out[i] = {0.0, Status::Empty};
      continue;
    }
    while (added <= last[i]) {
      if (sub[added].status == Status::Ok) {
        while (!dq.empty() && better(sub[added].value, sub[dq.back()].value)) {
          dq.pop_back();
        }
        dq.push_back(added);
      }
      ++added;
    }
    while (!dq.empty() && dq.front() < first[i]) dq.pop_front();

    if (invalid_prefix[last[i] + 1] - invalid_prefix[first[i]] > 0) {
      for (std::size_t j = first[i]; j <= last[i]; ++j) {
        if (sub[j].status != Status::Ok) {
          out[i] = {0.0, sub[j].status};
          break;
        }
      }
      continue;
    }
    out[i] = {sub[dq.front()].value, Status::Ok};
  }
  return out;
}

Series eval_formula(
    const Formula& f, const Trace& trace,
    const std::map<std::string, const std::vector<double>*>& sig) {
  const std::size_t n = trace.timestamps.size();
  switch (f.kind) {
    case Formula::Kind::Predicate: {
      Series out(n);
      for (std::size_t i = 0; i < n; ++i) {
        double lhs = eval_expr(*f.pred_lhs, sig, i);
        double rhs = eval_expr(*f.pred_rhs, sig, i);
        // <, <= share robustness rhs - lhs; >, >= share lhs - rhs.
        double rob = (f.cmp == CmpOp::Lt || f.cmp == CmpOp::Le) ? rhs - lhs
                                                                : lhs - rhs;
        out[i] = {rob, Status::Ok};
      }
      return out;
    }
    case Formula::Kind::Not: {
      Series sub = eval_formula(*f.left, trace, sig);
      for (Entry& e : sub) {
        if (e.status == Status::Ok) e.value = -e.value;
      }
      return sub;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Implies: {
      Series a = eval_formula(*f.left, trace, sig);
      Series b = eval_formula(*f.right, trace, sig);
      Series out(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i].status != Status::Ok) {
          out[i] = a[i];
        } else if (b[i].status != Status::Ok) {
          out[i] = b[i];
        } else {
          double v = 0;
          switch (f.kind) {
            case Formula::Kind::And:
              v = std::min(a[i].value, b[i].value);
              break;
            case Formula::Kind::Or:
              v = std::max(a[i].value, b[i].value);
              break;
            default:
              v = std::max(-a[i].value, b[i].value);
              break;
          }
          out[i] = {v, Status::Ok};
        }
      }
      return out;
    }
    case Formula::Kind::Globally:
    case Formula::Kind::Finally: {
      Series sub = eval_formula(*f.left, trace, sig);
      return window_fold(sub, trace.timestamps, f.lo, f.hi,
                         f.kind == Formula::Kind::Globally);
    }
  }
  return Series(n);
}

}  // namespace

double robustness(const StlFormula& formula, const Trace& trace, double t0) {
  require_valid(trace);

  std::map<std::string, const std::vector<double>*> sig;
  for (const std::string& name : referenced_signals(formula)) {
    const std::vector<double>* series = trace.find_signal(name);
    if (series == nullptr) {
      throw UnknownSignal("robustness: trace lacks signal '" + name + "'");
    }
    sig.emplace(name, series);
  }

  std::size_t index = trace.timestamps.size();
  for (std::size_t i = 0; i < trace.timestamps.size(); ++i) {
    if (std::fabs(trace.timestamps[i] - t0) <= kTimeEps) {
      index = i;
      break;
    }
  }
  if (index == trace.timestamps.size()) {
    throw std::invalid_argument("robustness: t0 is not a sample time");
  }

  Series series = eval_formula(*formula.root, trace, sig);
  const Entry& e = series[index];
  switch (e.status) {
    case Status::Empty:
      throw EmptyWindow("robustness: a temporal window contains no sample");
    case Status::Horizon:
      throw HorizonExceeded(
          "robustness: a temporal window extends past the trace end");
    case Status::Ok:
      break;
  }
  return e.value;
}

CheckResult check(const StlFormula& formula, const Trace& trace) {
  require_valid(trace);
  double rob = robustness(formula, trace, trace.timestamps.front());
  Verdict verdict = rob > 0   ? Verdict::Satisfied
                    : rob < 0 ? Verdict::Violated
                              : Verdict::Boundary;
  return {verdict, rob};
}

}  // namespace cpsarch::stl
