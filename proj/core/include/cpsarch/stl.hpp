#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cpsarch/trace.hpp"

namespace cpsarch::stl {

struct SignalDeclaration {
  std::string name;
  std::string unit;

  friend bool operator==(const SignalDeclaration&,
                         const SignalDeclaration&) = default;
};

using SignalDeclarations = std::vector<SignalDeclaration>;

/// Arithmetic expression over signal values: constants, signal references,
/// +, -, *, unary minus and abs().
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Constant, Signal, Add, Sub, Mul, Neg, Abs };

  Kind kind;
  double value = 0.0;   // Constant
  std::string signal;   // Signal
  ExprPtr lhs;          // binary lhs / unary operand
  ExprPtr rhs;          // binary rhs
};

enum class CmpOp { Lt, Le, Gt, Ge };

/// Formula AST: comparison predicates, boolean connectives and the bounded
/// temporal operators G[a,b] / F[a,b].
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Predicate, Not, And, Or, Implies, Globally, Finally };

  Kind kind;

  // Predicate
  ExprPtr pred_lhs;
  CmpOp cmp = CmpOp::Lt;
  ExprPtr pred_rhs;

  // Not / Globally / Finally use `left` only.
  FormulaPtr left;
  FormulaPtr right;

  // Temporal window bounds in seconds, 0 <= lo <= hi.
  double lo = 0.0;
  double hi = 0.0;
};

struct StlFormula {
  FormulaPtr root;
};

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);
bool structurally_equal(const StlFormula& a, const StlFormula& b);

class SyntaxError : public std::runtime_error {
 public:
  explicit SyntaxError(const std::string& what) : std::runtime_error(what) {}
};

class UnknownSignal : public std::runtime_error {
 public:
  explicit UnknownSignal(const std::string& what)
      : std::runtime_error(what) {}
};

class BadInterval : public std::runtime_error {
 public:
  explicit BadInterval(const std::string& what) : std::runtime_error(what) {}
};

/// Parses the STL grammar documented in docs/stl-grammar.md. Implication is
/// right-associative; unary operators (!, G[a,b], F[a,b]) bind tightest.
/// Every referenced signal must appear in `decls`.
StlFormula parse_stl(std::string_view text, const SignalDeclarations& decls);

/// Canonical text form; parse_stl(to_string(phi)) is structurally equal to
/// phi for any formula.
std::string to_string(const StlFormula& formula);

/// Names of all signals referenced by the formula.
std::set<std::string> referenced_signals(const StlFormula& formula);

class EmptyWindow : public std::runtime_error {
 public:
  explicit EmptyWindow(const std::string& what) : std::runtime_error(what) {}
};

class HorizonExceeded : public std::runtime_error {
 public:
  explicit HorizonExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

/// Quantitative space robustness with sample-based temporal semantics:
/// windows range over actual trace timestamps, no interpolation. Positive
/// means satisfied, negative violated. Throws EmptyWindow when a consulted
/// window contains no sample and HorizonExceeded when a consulted window
/// extends past the last timestamp. t0 must be one of the sample times.
double robustness(const StlFormula& formula, const Trace& trace, double t0);

enum class Verdict { Satisfied, Violated, Boundary };

struct CheckResult {
  Verdict verdict;
  double robustness;
};

/// Robustness at the first sample, classified by sign. Exactly zero is
/// Boundary: quantitative semantics cannot distinguish strict from
/// non-strict comparisons there.
CheckResult check(const StlFormula& formula, const Trace& trace);

struct Requirement {
  std::string id;
  std::string text;  // canonical STL source
  StlFormula formula;
  SignalDeclarations decls;
};

/// The eight built-in requirements (AFC27, AFC29, AFC33, WT1..WT4, SC),
/// keyed by id.
const std::map<std::string, Requirement>& builtin_requirements();

}  // namespace cpsarch::stl
