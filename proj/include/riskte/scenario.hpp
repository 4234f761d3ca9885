#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskte/net_model.hpp"

namespace riskte {

struct Scenario {
  int id = 0;
  std::vector<int> failed;  // edge indices, ascending; empty = nominal
  double prob = 0.0;        // renormalized so the set sums to 1
  double raw_prob = 0.0;    // independent-failure product before renormalization
};

// Scenario sets are canonicalized on construction: scenarios sorted by
// descending probability, ties by lexicographic failed-edge set, ids
// reassigned densely. Downstream aggregation iterates in this order, which
// makes every result invariant to the input ordering of the scenarios.
struct ScenarioSet {
  std::vector<Scenario> scenarios;
  int nominal = -1;  // index of the empty failure set

  // Survival indicators alpha[t*N + q], built by build_survival().
  std::vector<std::uint8_t> alpha;
  int num_tunnels = 0;

  int size() const { return static_cast<int>(scenarios.size()); }
  std::uint8_t survives(int tunnel, int q) const {
    return alpha[static_cast<std::size_t>(tunnel) * scenarios.size() + q];
  }

  // Sorts canonically, renormalizes probabilities, validates the invariants
  // (nominal present, probabilities in (0,1], no duplicate failure sets).
  void canonicalize();
};

struct FailureModel {
  double cutoff_c = 100.0;  // cutoff tau = c * 1e-5
  double weibull_s = 2.0;   // scale lambda = s * 1e-3
  double shape = 0.8;
  int max_failures = 2;
  std::uint64_t seed = 1;

  double cutoff() const { return cutoff_c * 1e-5; }
  double scale() const { return weibull_s * 1e-3; }
};

// Per-edge failure probabilities, i.i.d. Weibull(scale, shape) truncated to
// (0, 0.5]. Indexed like net.edges; deterministic under the model seed.
std::vector<double> sample_link_probs(const Network& net,
                                      const FailureModel& model);

// Exact enumeration of all failure sets of size <= max_failures whose
// independent-occurrence probability is >= cutoff, plus the nominal scenario
// unconditionally. Probabilities are renormalized to sum to 1.
ScenarioSet enumerate_scenarios(const std::vector<double>& edge_probs,
                                double cutoff, int max_failures,
                                std::size_t hard_cap = 100000);

ScenarioSet generate_scenarios(const Network& net, const FailureModel& model,
                               std::size_t hard_cap = 100000);

// Fills alpha: tunnel t survives scenario q iff none of its path edges failed.
void build_survival(const Instance& inst, ScenarioSet& set);

// D'_f = max{0, D_f + eta_f}, eta_f ~ N(0, (sigma * D_f)^2), one draw per
// flow in id order.
std::vector<Flow> perturb_demands(const std::vector<Flow>& flows, double sigma,
                                  std::uint64_t seed);

// JSON scenario file: {"scenarios": [{"id", "failed_edges": [edge-id],
// "prob"}]}. Hand-authored correlated sets are allowed; probabilities are
// renormalized and the set is canonicalized on load.
ScenarioSet load_scenarios(const std::string& path, const Instance& inst);
ScenarioSet parse_scenarios(const std::string& json_text, const Instance& inst);
void save_scenarios(const ScenarioSet& set, const Instance& inst,
                    const std::string& path);

}  // namespace riskte
