#include "riskte/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "riskte/rng.hpp"

namespace riskte {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double evaluate_reservation(const Instance& inst, const ScenarioSet& set,
                            const RiskSpec& spec, const Reservation& y,
                            AllocationResult* rec_out = nullptr) {
  AllocationResult rec = recover_allocation(inst, y);
  LossTable losses = compute_losses(inst, rec.alloc, set);
  double value = objective_eval(losses, set, spec).value;
  if (rec_out) *rec_out = std::move(rec);
  return value;
}

// Number of compositions of m units into n parts: C(m+n-1, n-1).
double composition_count(int m, int n) {
  double c = 1.0;
  for (int i = 1; i < n; ++i) c = c * (m + i) / i;
  return c;
}

}  // namespace

void project_to_simplex(std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < n; ++i) {
    cum += u[i];
    double t = (cum - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(0.0, x - theta);
}

OracleResult grid_search(const Instance& inst, const ScenarioSet& set,
                         const RiskSpec& spec, const OracleConfig& cfg) {
  if (!(cfg.step > 0.0) || cfg.step > 1.0) fail("grid step must be in (0, 1]");
  const int m = static_cast<int>(std::lround(1.0 / cfg.step));
  if (std::abs(m * cfg.step - 1.0) > 1e-9)
    fail("grid step must divide 1 exactly");

  // Free edges are those carrying at least two tunnels; single-tunnel edges
  // are pinned at y = 1 and empty edges carry no variable at all.
  std::vector<int> free_edges;
  double total = 1.0;
  for (int e = 0; e < static_cast<int>(inst.net.edges.size()); ++e) {
    if (inst.edge_slots[e].size() > 1) {
      free_edges.push_back(e);
      total *= composition_count(m, static_cast<int>(inst.edge_slots[e].size()));
      if (total > static_cast<double>(cfg.eval_cap))
        fail("reservation grid exceeds the evaluation cap; use a coarser step");
    }
  }

  Reservation y;
  y.y.assign(inst.num_slots(), 0.0);
  for (int e = 0; e < static_cast<int>(inst.net.edges.size()); ++e)
    if (inst.edge_slots[e].size() == 1) y.y[inst.edge_slots[e][0]] = 1.0;

  // Odometer over compositions, ascending lexicographic per edge starting at
  // (0, ..., 0, m); strict-improvement tracking therefore resolves objective
  // ties to the lexicographically smallest grid point.
  std::vector<std::vector<int>> counts;
  for (int e : free_edges) {
    std::vector<int> c(inst.edge_slots[e].size(), 0);
    c.back() = m;
    counts.push_back(std::move(c));
  }
  auto apply = [&](std::size_t which) {
    int e = free_edges[which];
    for (std::size_t i = 0; i < counts[which].size(); ++i)
      y.y[inst.edge_slots[e][i]] = counts[which][i] * cfg.step;
  };
  for (std::size_t i = 0; i < free_edges.size(); ++i) apply(i);

  // Lex successor: bump the rightmost position that still has suffix mass,
  // pushing the remainder into the last slot. Returns false (and resets to
  // the first composition) after (m, 0, ..., 0).
  auto next_composition = [m](std::vector<int>& c) {
    const int n = static_cast<int>(c.size());
    int suffix = 0;
    for (int i = n - 2; i >= 0; --i) {
      suffix += c[i + 1];
      if (suffix > 0) {
        c[i] += 1;
        for (int j = i + 1; j < n; ++j) c[j] = 0;
        c[n - 1] = suffix - 1;
        return true;
      }
    }
    c.assign(c.size(), 0);
    c.back() = m;
    return false;
  };

  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  bool more = true;
  while (more) {
    double value = evaluate_reservation(inst, set, spec, y);
    ++best.evaluations;
    if (value < best.objective) {  // lex-first tie winner: strict improvement only
      best.objective = value;
      best.y = y;
    }
    // odometer: advance the last free edge; carry on wrap.
    more = false;
    for (int i = static_cast<int>(free_edges.size()) - 1; i >= 0; --i) {
      if (next_composition(counts[i])) {
        apply(i);
        more = true;
        break;
      }
      apply(i);  // wrapped back to the first composition
    }
  }
  if (best.evaluations == 0 || !std::isfinite(best.objective))
    fail("grid search evaluated no points");
  AllocationResult rec;
  best.objective = evaluate_reservation(inst, set, spec, best.y, &rec);
  best.alloc = std::move(rec.alloc);
  return best;
}

namespace {

// Subgradient of J with respect to y, matching the unrolled optimizer's
// conventions: masks and sort fixed, clamp inactive side 0, min routed to the
// recorded bottleneck slot.
std::vector<double> reservation_subgradient(const Instance& inst,
                                            const ScenarioSet& set,
                                            const RiskSpec& spec,
                                            const Reservation& y) {
  AllocationResult rec = recover_allocation(inst, y);
  LossTable losses = compute_losses(inst, rec.alloc, set);
  ObjectiveEval obj = objective_eval(losses, set, spec);
  const int T = static_cast<int>(inst.tunnels.size());
  const int N = set.size();
  std::vector<double> dx(T, 0.0);
  for (int f = 0; f < losses.num_flows; ++f) {
    if (inst.flows[f].demand <= 0.0) continue;
    for (int q = 0; q < N; ++q) {
      double g = obj.dvalue_dloss[static_cast<std::size_t>(f) * N + q];
      if (g == 0.0 || losses.at(f, q) <= 0.0) continue;
      for (int t : inst.flow_tunnels[f])
        if (set.survives(t, q)) dx[t] -= g;
    }
  }
  std::vector<double> dy(inst.num_slots(), 0.0);
  for (int t = 0; t < T; ++t) {
    double demand = inst.flows[inst.tunnels[t].flow].demand;
    if (demand <= 0.0 || dx[t] == 0.0) continue;
    int s = rec.bottleneck_slot[t];
    dy[s] += dx[t] / demand * inst.net.edges[inst.slot_edge[s]].capacity;
  }
  return dy;
}

void project_reservation(const Instance& inst, Reservation& y) {
  std::vector<double> buf;
  for (const auto& slots : inst.edge_slots) {
    if (slots.empty()) continue;
    if (slots.size() == 1) {
      y.y[slots[0]] = 1.0;
      continue;
    }
    buf.clear();
    for (int s : slots) buf.push_back(y.y[s]);
    project_to_simplex(buf);
    for (std::size_t i = 0; i < slots.size(); ++i) y.y[slots[i]] = buf[i];
  }
}

}  // namespace

OracleResult subgradient_refine(const Reservation& start, const Instance& inst,
                                const ScenarioSet& set, const RiskSpec& spec,
                                const OracleConfig& cfg) {
  OracleResult out;
  out.y = start;
  project_reservation(inst, out.y);
  out.objective = evaluate_reservation(inst, set, spec, out.y);
  ++out.evaluations;

  for (int it = 0; it < cfg.refine_iterations; ++it) {
    std::vector<double> g = reservation_subgradient(inst, set, spec, out.y);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    if (norm <= 1e-24) break;
    double step = cfg.refine_step;
    bool accepted = false;
    for (int bt = 0; bt < 20; ++bt, step *= 0.5) {
      Reservation cand = out.y;
      for (std::size_t i = 0; i < cand.y.size(); ++i)
        cand.y[i] -= step * g[i];
      project_reservation(inst, cand);
      double value = evaluate_reservation(inst, set, spec, cand);
      ++out.evaluations;
      if (value < out.objective - 1e-15) {
        out.y = std::move(cand);
        out.objective = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  AllocationResult rec;
  out.objective = evaluate_reservation(inst, set, spec, out.y, &rec);
  out.alloc = std::move(rec.alloc);
  return out;
}

OracleResult oracle_solve(const Instance& inst, const ScenarioSet& set,
                          const RiskSpec& spec, const OracleConfig& cfg) {
  OracleResult best = grid_search(inst, set, spec, cfg);
  OracleResult refined = subgradient_refine(best.y, inst, set, spec, cfg);
  refined.evaluations += best.evaluations;
  if (refined.objective <= best.objective) best = std::move(refined);

  Rng rng(cfg.seed);
  for (int r = 0; r < cfg.restarts; ++r) {
    Reservation y;
    y.y.assign(inst.num_slots(), 0.0);
    for (double& v : y.y) v = rng.uniform();
    project_reservation(inst, y);
    OracleResult cand = subgradient_refine(y, inst, set, spec, cfg);
    best.evaluations += cand.evaluations;
    if (cand.objective < best.objective) {
      cand.evaluations = best.evaluations;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace riskte
