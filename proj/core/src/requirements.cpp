#include "cpsarch/stl.hpp"

namespace cpsarch::stl {

namespace {

Requirement make(std::string id, std::string text, SignalDeclarations decls) {
  StlFormula formula = parse_stl(text, decls);
  return Requirement{std::move(id), std::move(text), std::move(formula),
                     std::move(decls)};
}

std::map<std::string, Requirement> build() {
  const SignalDeclarations afc = {{"mu", "air-fuel ratio deviation"},
                                  {"theta", "throttle angle (deg)"}};
  const SignalDeclarations wt = {{"theta", "blade pitch angle (deg)"},
                                 {"theta_d", "pitch angle demand (deg)"},
                                 {"Omega", "rotor speed (rad/s)"},
                                 {"Mgd", "generator torque demand (Nm)"}};
  const SignalDeclarations sc = {{"pressure", "condenser pressure (Pa)"}};

  std::map<std::string, Requirement> reqs;
  auto add = [&reqs](Requirement r) { reqs.emplace(r.id, std::move(r)); };

  // AFC27: a throttle "rise" is theta crossing 8.8 -> 40 within 0.05 s, a
  // "fall" the reverse crossing; after either event mu must settle.
  add(make("AFC27",
           "G[11,50] ((((theta < 8.8) && (F[0,0.05] (theta > 40.0))) || "
           "((theta > 40.0) && (F[0,0.05] (theta < 8.8)))) -> "
           "(G[1,5] (abs(mu) < 0.008)))",
           afc));
  add(make("AFC29", "G[11,50] (abs(mu) < 0.008)", afc));
  add(make("AFC33", "G[11,50] (abs(mu) < 0.007)", afc));
  add(make("WT1", "G[30,630] (theta <= 14.2)", wt));
  add(make("WT2", "G[30,630] ((Mgd >= 21000) && (Mgd <= 47500))", wt));
  add(make("WT3", "G[30,630] (Omega <= 14.3)", wt));
  add(make("WT4", "G[30,630] (F[0,5] (abs(theta - theta_d) <= 1.6))", wt));
  add(make("SC", "G[30,35] ((pressure >= 87) && (pressure <= 87.5))", sc));
  return reqs;
}

}  // namespace

const std::map<std::string, Requirement>& builtin_requirements() {
  static const std::map<std::string, Requirement> reqs = build();
  return reqs;
}

}  // namespace cpsarch::stl
