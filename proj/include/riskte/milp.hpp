#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "riskte/risk.hpp"

namespace riskte {

struct MilpVar {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  bool binary = false;
  bool free_hi = false;  // no upper bound
};

struct MilpTerm {
  int var = -1;
  double coef = 0.0;
};

struct MilpConstraint {
  std::string name;
  std::vector<MilpTerm> terms;
  char sense = '<';  // '<', '>', '='
  double rhs = 0.0;
};

// The unified sort-and-select model: split ratios x, per-scenario losses l,
// a per-flow sorting block (permutation binaries d, sorted losses v, rank
// masses pi, cumulative G), and an objective wired per risk kind. Scenario
// granularity adds mean-loss variables (and, for the masked kinds, a
// scenario-level sorting block). Mask-coupled objectives use the Big-M
// product linearizations documented in the emitted file header.
struct MilpModel {
  std::vector<MilpVar> vars;
  std::vector<MilpConstraint> cons;
  std::vector<MilpTerm> objective;
  std::string header;  // comment block describing the encoding
  double big_m = 1.0;
  RiskSpec spec;

  int num_binary() const;
  int num_delta() const;  // flow-level permutation binaries d_*
  int var_index(const std::string& name) const;
};

// bigM must be >= 1 (losses are bounded by 1, so 1 is the tightest valid
// constant). strict_clamp adds binaries forcing l = max{0, 1 - sum x*alpha}
// even where the objective applies no downward pressure.
MilpModel build_milp(const Instance& inst, const ScenarioSet& set,
                     const RiskSpec& spec, double big_m = 1.0,
                     bool strict_clamp = false);

// Deterministic CPLEX-LP text; identical input produces byte-identical files.
void write_lp(const MilpModel& model, const std::string& path);
std::string lp_text(const MilpModel& model);

// Plain "name value" lines; '#' or '\' start comments.
std::unordered_map<std::string, double> read_solution(const std::string& path);

struct VerifyReport {
  bool ok = false;
  std::vector<std::string> violations;
  double model_objective = 0.0;      // objective row evaluated at the solution
  double recomputed_objective = 0.0; // risk-core objective on the extracted x
  bool objectives_match = false;
};

// Checks bounds, integrality, every constraint row (within tol), that the
// permutation binaries form a permutation, and that v matches the
// independently sorted solution losses; then recomputes the objective from
// the extracted split ratios through the risk code path.
VerifyReport verify_solution(const MilpModel& model, const Instance& inst,
                             const ScenarioSet& set,
                             const std::unordered_map<std::string, double>& sol,
                             double tol = 1e-6);

}  // namespace riskte
