#include "riskte/reservation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskte {

namespace {

Reservation edge_softmax(const Instance& inst, const std::vector<double>& z,
                         const std::vector<double>* w) {
  Reservation out;
  out.y.assign(inst.num_slots(), 0.0);
  for (const auto& slots : inst.edge_slots) {
    if (slots.empty()) continue;
    double hi = -std::numeric_limits<double>::infinity();
    for (int s : slots) {
      double logit = z[s] + (w ? (*w)[inst.slot_tunnel[s]] : 0.0);
      hi = std::max(hi, logit);
    }
    double denom = 0.0;
    for (int s : slots) {
      double logit = z[s] + (w ? (*w)[inst.slot_tunnel[s]] : 0.0);
      out.y[s] = std::exp(logit - hi);
      denom += out.y[s];
    }
    for (int s : slots) out.y[s] /= denom;
  }
  return out;
}

}  // namespace

Reservation project_gated(const Instance& inst, const LatentState& state) {
  return edge_softmax(inst, state.z, &state.w);
}

Reservation project_br(const Instance& inst, const LatentState& state) {
  return edge_softmax(inst, state.z, nullptr);
}

AllocationResult recover_allocation(const Instance& inst, const Reservation& y) {
  const int T = static_cast<int>(inst.tunnels.size());
  AllocationResult out;
  out.alloc.x.assign(T, 0.0);
  out.bandwidth.assign(T, 0.0);
  out.bottleneck_slot.assign(T, -1);
  for (int t = 0; t < T; ++t) {
    double best = std::numeric_limits<double>::infinity();
    int best_slot = -1;
    for (int s = inst.slot_offset[t]; s < inst.slot_offset[t + 1]; ++s) {
      double cap = inst.net.edges[inst.slot_edge[s]].capacity * y.y[s];
      // Ties resolve to the lowest edge id so the subgradient path is fixed.
      if (cap < best ||
          (cap == best && inst.slot_edge[s] < inst.slot_edge[best_slot])) {
        best = cap;
        best_slot = s;
      }
    }
    out.bandwidth[t] = best;
    out.bottleneck_slot[t] = best_slot;
    double demand = inst.flows[inst.tunnels[t].flow].demand;
    out.alloc.x[t] = demand > 0.0 ? best / demand : 0.0;
  }
  return out;
}

std::vector<double> bottleneck_margin(const Instance& inst, const Reservation& y,
                                      const AllocationResult& recovered) {
  std::vector<double> m(inst.num_slots(), 0.0);
  for (int s = 0; s < inst.num_slots(); ++s) {
    int t = inst.slot_tunnel[s];
    m[s] = inst.net.edges[inst.slot_edge[s]].capacity * y.y[s] -
           recovered.bandwidth[t];
  }
  return m;
}

std::vector<double> edge_loads(const Instance& inst, const Allocation& alloc) {
  std::vector<double> load(inst.net.edges.size(), 0.0);
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t) {
    double carried = inst.flows[inst.tunnels[t].flow].demand * alloc.x[t];
    for (int ei : inst.tunnels[t].path) load[ei] += carried;
  }
  return load;
}

double global_overload_factor(const Instance& inst, const Allocation& alloc) {
  std::vector<double> load = edge_loads(inst, alloc);
  double gamma = 0.0;
  for (std::size_t e = 0; e < load.size(); ++e)
    gamma = std::max(gamma, load[e] / inst.net.edges[e].capacity);
  return gamma;
}

Allocation project_global_scaling(const Instance& inst, const Allocation& raw) {
  double gamma = global_overload_factor(inst, raw);
  if (gamma <= 1.0) return raw;
  Allocation out = raw;
  for (double& v : out.x) v /= gamma;
  return out;
}

Allocation project_local_scaling(const Instance& inst, const Allocation& raw) {
  std::vector<double> load = edge_loads(inst, raw);
  Allocation out = raw;
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t) {
    double gamma_t = 0.0;
    for (int ei : inst.tunnels[t].path)
      gamma_t = std::max(gamma_t, load[ei] / inst.net.edges[ei].capacity);
    if (gamma_t > 1.0) out.x[t] /= gamma_t;
  }
  return out;
}

}  // namespace riskte
