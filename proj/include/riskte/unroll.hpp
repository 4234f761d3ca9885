#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskte/features.hpp"
#include "riskte/policy.hpp"
#include "riskte/reservation.hpp"
#include "riskte/risk.hpp"

namespace riskte {

// Decision-space variants. GR/BR evolve per-slot logits (BR without gates);
// GS/LS evolve per-tunnel log-allocations repaired by global/local scaling.
enum class Variant { GR, BR, GS, LS };

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

// Input dimension the policy must have for a variant (8 reservation features,
// 5 for the scaling variants which have no reservations or margins).
int variant_input_dim(Variant v);
int variant_output_dim(Variant v);

struct RolloutConfig {
  int K = 7;
  RiskSpec spec;
  double update_clip = 10.0;
  bool record_trajectory = false;
  Variant variant = Variant::GR;
};

struct RolloutResult {
  Reservation y;      // empty for GS/LS
  Allocation alloc;   // recovered (GR/BR) or scaled (GS/LS)
  double objective = 0.0;
  std::vector<double> scenario_loss;
  std::vector<double> trajectory;  // J after k steps, k = 0..K (when recorded)
  LatentState final_state;         // GR/BR
  std::vector<double> final_xi;    // GS/LS
};

// K policy-driven update steps from the zero latent state, returning the
// terminal reservation/allocation and objective. Throws on non-finite values
// (message names the failing iteration).
RolloutResult unroll(const PolicyParams& params, const Instance& inst,
                     const ScenarioSet& set, const RolloutConfig& cfg);

struct DatasetItem {
  Instance instance;
  ScenarioSet scenarios;
  std::string name;
};

struct Dataset {
  std::vector<DatasetItem> train;
  std::vector<DatasetItem> val;
};

struct GradResult {
  double mean_objective = 0.0;
  PolicyGrad grad;
};

// Mean terminal objective over the batch and its exact reverse-mode gradient
// through all K steps. The sort permutations, masks and risk weights are
// treated as locally constant; min/max kinks follow the recorded argmin path.
GradResult loss_and_grad(const PolicyParams& params,
                         const std::vector<const DatasetItem*>& batch,
                         const RolloutConfig& cfg);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 16;
  int epochs = 30;
  int patience = 10;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct EpochLog {
  int epoch = 0;
  double train_objective = 0.0;
  double val_objective = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  PolicyParams params;  // best-validation checkpoint
  std::vector<EpochLog> log;
  int best_epoch = -1;
  double best_val_objective = 0.0;
};

// Adam over shuffled mini-batches with early stopping on validation mean J.
// An optional sink receives each epoch row as it completes.
TrainResult train(const PolicyParams& init, const Dataset& data,
                  const TrainConfig& tc, const RolloutConfig& rc,
                  void (*epoch_sink)(const EpochLog&, void*) = nullptr,
                  void* sink_arg = nullptr);

struct EvalReport {
  double objective = 0.0;
  std::optional<double> reference;
  double relative_error = 0.0;  // (J - J*) / max(J*, 1e-9)
  std::vector<double> scenario_loss;
  RolloutResult rollout;
};

EvalReport evaluate(const PolicyParams& params, const Instance& inst,
                    const ScenarioSet& set, const RiskSpec& spec, int k_deploy,
                    std::optional<double> reference, Variant variant = Variant::GR);

}  // namespace riskte
