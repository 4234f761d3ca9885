#include "riskte/risk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace riskte {

RiskKind parse_risk_kind(const std::string& name) {
  if (name == "robust") return RiskKind::robust;
  if (name == "cvar") return RiskKind::cvar;
  if (name == "quantile") return RiskKind::quantile;
  if (name == "expectation") return RiskKind::expectation;
  throw std::runtime_error("unknown risk objective: " + name);
}

std::string to_string(RiskKind kind) {
  switch (kind) {
    case RiskKind::robust: return "robust";
    case RiskKind::cvar: return "cvar";
    case RiskKind::quantile: return "quantile";
    case RiskKind::expectation: return "expectation";
  }
  return "?";
}

RiskSpec RiskSpec::make(RiskKind kind, double beta) {
  RiskSpec spec;
  spec.kind = kind;
  spec.beta = beta;
  spec.granularity = (kind == RiskKind::quantile) ? Granularity::flow
                                                  : Granularity::scenario;
  return spec;
}

LossTable compute_losses(const Instance& inst, const Allocation& alloc,
                         const ScenarioSet& set) {
  const int F = static_cast<int>(inst.flows.size());
  const int N = set.size();
  LossTable table;
  table.num_flows = F;
  table.num_scenarios = N;
  table.loss.assign(static_cast<std::size_t>(F) * N, 0.0);
  table.scenario_loss.assign(N, 0.0);
  for (int f = 0; f < F; ++f) {
    if (inst.flows[f].demand <= 0.0) continue;  // nothing to lose
    for (int q = 0; q < N; ++q) {
      double served = 0.0;
      for (int t : inst.flow_tunnels[f])
        if (set.survives(t, q)) served += alloc.x[t];
      table.loss[static_cast<std::size_t>(f) * N + q] =
          std::max(0.0, 1.0 - served);
    }
  }
  if (F > 0) {
    for (int q = 0; q < N; ++q) {
      double sum = 0.0;
      for (int f = 0; f < F; ++f) sum += table.at(f, q);
      table.scenario_loss[q] = sum / F;
    }
  }
  return table;
}

SortedRow sort_row(const std::vector<double>& losses,
                   const std::vector<double>& probs) {
  const int N = static_cast<int>(losses.size());
  SortedRow row;
  row.rank_to_scenario.resize(N);
  std::iota(row.rank_to_scenario.begin(), row.rank_to_scenario.end(), 0);
  std::stable_sort(row.rank_to_scenario.begin(), row.rank_to_scenario.end(),
                   [&](int a, int b) { return losses[a] > losses[b]; });
  row.scenario_to_rank.assign(N, 0);
  row.v.resize(N);
  row.pi.resize(N);
  row.gamma.resize(N);
  double cum = 0.0;
  for (int r = 0; r < N; ++r) {
    int q = row.rank_to_scenario[r];
    row.scenario_to_rank[q] = r;
    row.v[r] = losses[q];
    row.pi[r] = probs[q];
    cum += probs[q];
    row.gamma[r] = cum;
  }
  return row;
}

SortedLoss sort_losses(const LossTable& losses, const ScenarioSet& set) {
  const int N = losses.num_scenarios;
  std::vector<double> probs(N);
  for (int q = 0; q < N; ++q) probs[q] = set.scenarios[q].prob;
  SortedLoss out;
  out.rows.reserve(losses.num_flows);
  std::vector<double> row(N);
  for (int f = 0; f < losses.num_flows; ++f) {
    for (int q = 0; q < N; ++q) row[q] = losses.at(f, q);
    out.rows.push_back(sort_row(row, probs));
  }
  return out;
}

std::vector<double> risk_mask(const RiskSpec& spec, const SortedRow& row) {
  const int N = static_cast<int>(row.v.size());
  std::vector<double> mask(N, 0.0);
  switch (spec.kind) {
    case RiskKind::expectation:
      std::fill(mask.begin(), mask.end(), 1.0);
      break;
    case RiskKind::robust:
      if (N > 0) mask[0] = 1.0;
      break;
    case RiskKind::cvar: {
      const double budget = 1.0 - spec.beta;
      for (int r = 0; r < N; ++r)
        if (row.gamma[r] <= budget) mask[r] = 1.0;
      if (spec.exact_cvar) {
        for (int r = 0; r < N; ++r) {
          double prev = (r == 0) ? 0.0 : row.gamma[r - 1];
          if (prev < budget && budget <= row.gamma[r] && mask[r] == 0.0 &&
              row.pi[r] > 0.0) {
            mask[r] = (budget - prev) / row.pi[r];
            break;
          }
        }
      }
      break;
    }
    case RiskKind::quantile: {
      const double budget = 1.0 - spec.beta;
      for (int r = 0; r < N; ++r) {
        double prev = (r == 0) ? 0.0 : row.gamma[r - 1];
        if (prev < budget && budget <= row.gamma[r]) {
          mask[r] = 1.0;
          break;
        }
      }
      break;
    }
  }
  return mask;
}

namespace {

// Shared by risk_weights and objective_eval. Returns, per unit (one row at
// scenario granularity, one per flow otherwise), the mask mapped back to
// scenario ids, and optionally the aggregation weight used by the objective:
// pi * mask normally, plain mask for robust (top rank counts with weight 1).
struct MaskedRows {
  Granularity granularity;
  std::vector<std::vector<double>> mask_by_scenario;  // per unit, size N
};

MaskedRows masked_rows(const RiskSpec& spec, const LossTable& losses,
                       const ScenarioSet& set) {
  const int N = losses.num_scenarios;
  std::vector<double> probs(N);
  for (int q = 0; q < N; ++q) probs[q] = set.scenarios[q].prob;

  MaskedRows out;
  out.granularity = spec.granularity;
  auto map_back = [&](const SortedRow& row) {
    std::vector<double> mask = risk_mask(spec, row);
    std::vector<double> by_scenario(N, 0.0);
    for (int r = 0; r < N; ++r) by_scenario[row.rank_to_scenario[r]] = mask[r];
    return by_scenario;
  };
  if (spec.granularity == Granularity::scenario) {
    out.mask_by_scenario.push_back(map_back(sort_row(losses.scenario_loss, probs)));
  } else {
    std::vector<double> row(N);
    for (int f = 0; f < losses.num_flows; ++f) {
      for (int q = 0; q < N; ++q) row[q] = losses.at(f, q);
      out.mask_by_scenario.push_back(map_back(sort_row(row, probs)));
    }
  }
  return out;
}

}  // namespace

RiskWeights risk_weights(const RiskSpec& spec, const LossTable& losses,
                         const ScenarioSet& set) {
  const int N = losses.num_scenarios;
  MaskedRows rows = masked_rows(spec, losses, set);
  RiskWeights out;
  out.granularity = spec.granularity;
  out.num_scenarios = N;
  if (spec.granularity == Granularity::scenario) {
    out.w.resize(N);
    for (int q = 0; q < N; ++q)
      out.w[q] = set.scenarios[q].prob * rows.mask_by_scenario[0][q];
  } else {
    out.w.resize(static_cast<std::size_t>(losses.num_flows) * N);
    for (int f = 0; f < losses.num_flows; ++f)
      for (int q = 0; q < N; ++q)
        out.w[static_cast<std::size_t>(f) * N + q] =
            set.scenarios[q].prob * rows.mask_by_scenario[f][q];
  }
  return out;
}

ObjectiveEval objective_eval(const LossTable& losses, const ScenarioSet& set,
                             const RiskSpec& spec) {
  const int F = losses.num_flows;
  const int N = losses.num_scenarios;
  MaskedRows rows = masked_rows(spec, losses, set);
  ObjectiveEval out;
  out.dvalue_dloss.assign(static_cast<std::size_t>(F) * N, 0.0);

  // robust counts the selected rank with unit weight (J is the worst loss);
  // the other kinds weight by scenario probability.
  const bool unit_weight = spec.kind == RiskKind::robust;
  if (spec.granularity == Granularity::scenario) {
    for (int q = 0; q < N; ++q) {
      double m = rows.mask_by_scenario[0][q];
      if (m == 0.0) continue;
      double wq = unit_weight ? m : set.scenarios[q].prob * m;
      out.value += wq * losses.scenario_loss[q];
      if (F > 0) {
        for (int f = 0; f < F; ++f)
          out.dvalue_dloss[static_cast<std::size_t>(f) * N + q] += wq / F;
      }
    }
  } else {
    for (int f = 0; f < F; ++f) {
      for (int q = 0; q < N; ++q) {
        double m = rows.mask_by_scenario[f][q];
        if (m == 0.0) continue;
        double wq = unit_weight ? m : set.scenarios[q].prob * m;
        out.value += wq * losses.at(f, q);
        out.dvalue_dloss[static_cast<std::size_t>(f) * N + q] += wq;
      }
    }
  }
  return out;
}

double objective(const Instance& inst, const Allocation& alloc,
                 const ScenarioSet& set, const RiskSpec& spec) {
  LossTable losses = compute_losses(inst, alloc, set);
  return objective_eval(losses, set, spec).value;
}

Allocation load_allocation(const std::string& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open allocation file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": allocation parse error: " + e.what());
  }
  std::unordered_map<std::string, int> tidx;
  for (int t = 0; t < static_cast<int>(inst.tunnels.size()); ++t)
    tidx[inst.tunnels[t].id] = t;
  Allocation alloc;
  alloc.x.assign(inst.tunnels.size(), 0.0);
  for (const auto& je : j.at("x")) {
    auto it = tidx.find(je.at("tunnel").get<std::string>());
    if (it == tidx.end())
      throw std::runtime_error(path + ": unknown tunnel " +
                               je.at("tunnel").get<std::string>());
    alloc.x[it->second] = je.at("value").get<double>();
  }
  return alloc;
}

void save_allocation(const Allocation& alloc, const Instance& inst,
                     const std::string& path) {
  nlohmann::json j;
  j["x"] = nlohmann::json::array();
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t)
    j["x"].push_back({{"tunnel", inst.tunnels[t].id}, {"value", alloc.x[t]}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write allocation file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace riskte
