#pragma once

#include <vector>

#include "riskte/net_model.hpp"
#include "riskte/risk.hpp"

namespace riskte {

// Latent decision variables: per-slot contention logits z_{t,e} and
// per-tunnel gates w_t. All values must stay finite.
struct LatentState {
  std::vector<double> z;  // per slot
  std::vector<double> w;  // per tunnel

  static LatentState zeros(const Instance& inst) {
    return {std::vector<double>(inst.num_slots(), 0.0),
            std::vector<double>(inst.tunnels.size(), 0.0)};
  }
};

// Per-slot reservation ratios; each edge's slots sum to 1.
struct Reservation {
  std::vector<double> y;
};

// Gated per-edge softmax: y_{t,e} = exp(z_{t,e}+w_t) / sum over the edge.
// Computed with max-logit subtraction.
Reservation project_gated(const Instance& inst, const LatentState& state);

// Plain per-edge softmax over z (gates ignored).
Reservation project_br(const Instance& inst, const LatentState& state);

struct AllocationResult {
  Allocation alloc;                  // x_{f(t),t} = b_t / D_f (0 when D_f = 0)
  std::vector<double> bandwidth;     // b_t = min over path of C_e * y_{t,e}
  std::vector<int> bottleneck_slot;  // argmin slot; ties -> lowest edge id
};

AllocationResult recover_allocation(const Instance& inst, const Reservation& y);

// m_{t,e} = C_e * y_{t,e} - b_t, one value per slot.
std::vector<double> bottleneck_margin(const Instance& inst, const Reservation& y,
                                      const AllocationResult& recovered);

// Nominal edge loads sum_f sum_{t: e in t} D_f * x_{f,t}.
std::vector<double> edge_loads(const Instance& inst, const Allocation& alloc);

// gamma_max = max_e load_e / C_e (0 on an empty network).
double global_overload_factor(const Instance& inst, const Allocation& alloc);

// Divide every allocation by gamma_max when gamma_max > 1.
Allocation project_global_scaling(const Instance& inst, const Allocation& raw);

// Scale each tunnel by its own worst edge overload, never upward:
// x_t <- x_t / max{1, gamma_t}, gamma_t from the raw loads.
Allocation project_local_scaling(const Instance& inst, const Allocation& raw);

}  // namespace riskte
