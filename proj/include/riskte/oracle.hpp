#pragma once

#include <cstdint>
#include <vector>

#include "riskte/reservation.hpp"
#include "riskte/risk.hpp"

namespace riskte {

struct OracleConfig {
  double step = 0.05;            // grid resolution on each edge simplex
  int refine_iterations = 200;   // projected-subgradient steps
  double refine_step = 0.25;     // initial step size (backtracked)
  int restarts = 0;              // extra random starting points
  std::uint64_t seed = 1;
  std::size_t eval_cap = 10'000'000;
};

struct OracleResult {
  Reservation y;
  Allocation alloc;
  double objective = 0.0;
  std::size_t evaluations = 0;
};

// Exhaustive search over the per-edge reservation simplices discretized at
// the grid step (fractions k * step summing to 1 on each shared edge).
// Ties resolve to the lexicographically smallest grid point. Throws when the
// grid exceeds the evaluation cap.
OracleResult grid_search(const Instance& inst, const ScenarioSet& set,
                         const RiskSpec& spec, const OracleConfig& cfg);

// Projected subgradient descent on the per-edge simplices with backtracking;
// accepted steps never increase J. Uses the same subgradient conventions as
// the unrolled optimizer (argmin bottleneck routing, inactive clamp = 0).
OracleResult subgradient_refine(const Reservation& start, const Instance& inst,
                                const ScenarioSet& set, const RiskSpec& spec,
                                const OracleConfig& cfg);

// Grid search followed by refinement from the grid optimum (plus optional
// random restarts); returns the best point found.
OracleResult oracle_solve(const Instance& inst, const ScenarioSet& set,
                          const RiskSpec& spec, const OracleConfig& cfg);

// Euclidean projection onto {v >= 0, sum v = 1}.
void project_to_simplex(std::vector<double>& v);

}  // namespace riskte
