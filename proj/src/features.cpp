#include "riskte/features.hpp"

namespace riskte {

void extract_features(const Instance& inst, const Reservation& y,
                      const AllocationResult& recovered,
                      const std::vector<double>& margins,
                      const LossTable& losses, const ScenarioSet& set, int q,
                      const FeatureNorms& norms, std::vector<double>& out) {
  const int S = inst.num_slots();
  out.resize(static_cast<std::size_t>(S) * kFeatureDim);
  for (int s = 0; s < S; ++s) {
    const int t = inst.slot_tunnel[s];
    const int f = inst.tunnels[t].flow;
    const int e = inst.slot_edge[s];
    double* row = &out[static_cast<std::size_t>(s) * kFeatureDim];
    row[0] = set.survives(t, q) ? 1.0 : 0.0;
    row[1] = losses.at(f, q);
    row[2] = losses.scenario_loss[q];
    row[3] = recovered.alloc.x[t];
    row[4] = margins[s];
    row[5] = norms.capacity_max > 0.0
                 ? inst.net.edges[e].capacity / norms.capacity_max
                 : 0.0;
    row[6] = norms.demand_max > 0.0
                 ? inst.flows[f].demand / norms.demand_max
                 : 0.0;
    row[7] = y.y[s];
  }
}

void extract_features_scaled(const Instance& inst, const Allocation& alloc,
                             const LossTable& losses, const ScenarioSet& set,
                             int q, const FeatureNorms& norms,
                             std::vector<double>& out) {
  const int T = static_cast<int>(inst.tunnels.size());
  out.resize(static_cast<std::size_t>(T) * kFeatureDimScaled);
  for (int t = 0; t < T; ++t) {
    const int f = inst.tunnels[t].flow;
    double* row = &out[static_cast<std::size_t>(t) * kFeatureDimScaled];
    row[0] = set.survives(t, q) ? 1.0 : 0.0;
    row[1] = losses.at(f, q);
    row[2] = losses.scenario_loss[q];
    row[3] = alloc.x[t];
    row[4] = norms.demand_max > 0.0 ? inst.flows[f].demand / norms.demand_max
                                    : 0.0;
  }
}

}  // namespace riskte
