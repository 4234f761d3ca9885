#pragma once

#include <vector>

#include "riskte/reservation.hpp"
#include "riskte/risk.hpp"

namespace riskte {

// Per-(tunnel, edge, scenario) physics features, in this fixed order:
//   [ alpha_{t,q}, l_{f(t),q}, l_q, x_{f(t),t}, m_{t,e}, C_e/C_max,
//     D_{f(t)}/D_max, y_{t,e} ]
inline constexpr int kFeatureDim = 8;

// Ablation variants without reservations use the 5-feature subset
//   [ alpha_{t,q}, l_{f(t),q}, l_q, x_{f(t),t}, D_{f(t)}/D_max ]
inline constexpr int kFeatureDimScaled = 5;

// Instance-global normalization constants (D_max may be 0; the normalized
// demand is then 0).
struct FeatureNorms {
  double capacity_max = 0.0;
  double demand_max = 0.0;

  static FeatureNorms of(const Instance& inst) {
    return {inst.capacity_max(), inst.demand_max()};
  }
};

// Fills out[s * 8 .. s * 8 + 7] for every slot s, for scenario q.
void extract_features(const Instance& inst, const Reservation& y,
                      const AllocationResult& recovered,
                      const std::vector<double>& margins,
                      const LossTable& losses, const ScenarioSet& set, int q,
                      const FeatureNorms& norms, std::vector<double>& out);

// Per-tunnel 5-feature tuples for the scaling-based ablation variants.
void extract_features_scaled(const Instance& inst, const Allocation& alloc,
                             const LossTable& losses, const ScenarioSet& set,
                             int q, const FeatureNorms& norms,
                             std::vector<double>& out);

}  // namespace riskte
