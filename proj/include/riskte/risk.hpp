#pragma once

#include <string>
#include <vector>

#include "riskte/net_model.hpp"
#include "riskte/scenario.hpp"

namespace riskte {

// Target fraction of D_f per tunnel. Sums per flow may exceed 1
// (over-provisioning for failover) or fall below 1.
struct Allocation {
  std::vector<double> x;  // indexed like Instance::tunnels
};

struct LossTable {
  int num_flows = 0;
  int num_scenarios = 0;
  std::vector<double> loss;           // flow-major, loss[f*N + q] in [0,1]
  std::vector<double> scenario_loss;  // mean over flows, per scenario

  double at(int f, int q) const {
    return loss[static_cast<std::size_t>(f) * num_scenarios + q];
  }
};

// One unit's scenario losses sorted descending. rank_to_scenario is the
// permutation delta (rank r holds scenario id rank_to_scenario[r]); ties are
// broken by ascending scenario id, which makes it unique.
struct SortedRow {
  std::vector<int> rank_to_scenario;
  std::vector<int> scenario_to_rank;
  std::vector<double> v;      // descending losses
  std::vector<double> pi;     // probability mass at each rank
  std::vector<double> gamma;  // cumulative pi
};

struct SortedLoss {
  std::vector<SortedRow> rows;  // one per flow
};

enum class RiskKind { robust, cvar, quantile, expectation };
enum class Granularity { scenario, flow };

RiskKind parse_risk_kind(const std::string& name);
std::string to_string(RiskKind kind);

struct RiskSpec {
  RiskKind kind = RiskKind::expectation;
  double beta = 0.95;
  Granularity granularity = Granularity::scenario;
  // The binary tail mask drops the fractional boundary atom of exact CVaR;
  // this option adds it back as a fractional mask weight at the boundary rank.
  bool exact_cvar = false;

  // Default granularity: quantile ranks per flow, everything else per
  // scenario.
  static RiskSpec make(RiskKind kind, double beta);
};

// l_{f,q} = max{0, 1 - sum_t x_t * alpha_{t,q}}; zero-demand flows count as
// fully served. scenario_loss is the unweighted mean over flows.
LossTable compute_losses(const Instance& inst, const Allocation& alloc,
                         const ScenarioSet& set);

SortedRow sort_row(const std::vector<double>& losses,
                   const std::vector<double>& probs);
SortedLoss sort_losses(const LossTable& losses, const ScenarioSet& set);

// Rank-selection mask. robust: rank 1 only. cvar: ranks with gamma <= 1-beta
// (plus a fractional boundary weight in exact mode). quantile: the single
// rank with gamma_{r-1} < 1-beta <= gamma_r (gamma_0 = 0). expectation: all.
std::vector<double> risk_mask(const RiskSpec& spec, const SortedRow& row);

// Scenario risk weights rho = p_q * m_q, the mask mapped back from ranks to
// scenario ids. Flow granularity yields one row per flow (flow-major).
struct RiskWeights {
  Granularity granularity = Granularity::scenario;
  int num_scenarios = 0;
  std::vector<double> w;  // N values, or F*N flow-major

  double at(int f, int q) const {
    return granularity == Granularity::scenario
               ? w[q]
               : w[static_cast<std::size_t>(f) * num_scenarios + q];
  }
};

RiskWeights risk_weights(const RiskSpec& spec, const LossTable& losses,
                         const ScenarioSet& set);

// Objective value plus its subgradient with respect to each l_{f,q}, holding
// the sort permutation and mask fixed (they are piecewise constant).
// robust aggregates the top rank with unit weight, so J = max_q l_q at
// scenario granularity; the other kinds aggregate sum_r pi * mask * v.
struct ObjectiveEval {
  double value = 0.0;
  std::vector<double> dvalue_dloss;  // flow-major F*N
};

ObjectiveEval objective_eval(const LossTable& losses, const ScenarioSet& set,
                             const RiskSpec& spec);

double objective(const Instance& inst, const Allocation& alloc,
                 const ScenarioSet& set, const RiskSpec& spec);

// Allocation file: JSON {"x": [{"tunnel": id, "value": fraction}]}. Missing
// tunnels default to 0.
Allocation load_allocation(const std::string& path, const Instance& inst);
void save_allocation(const Allocation& alloc, const Instance& inst,
                     const std::string& path);

}  // namespace riskte
