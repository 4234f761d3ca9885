#include "riskte/unroll.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskte/rng.hpp"

namespace riskte {

Variant parse_variant(const std::string& name) {
  if (name == "GR" || name == "gr") return Variant::GR;
  if (name == "BR" || name == "br") return Variant::BR;
  if (name == "GS" || name == "gs") return Variant::GS;
  if (name == "LS" || name == "ls") return Variant::LS;
  throw std::runtime_error("unknown variant: " + name);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::GR: return "GR";
    case Variant::BR: return "BR";
    case Variant::GS: return "GS";
    case Variant::LS: return "LS";
  }
  return "?";
}

int variant_input_dim(Variant v) {
  return (v == Variant::GS || v == Variant::LS) ? kFeatureDimScaled
                                                : kFeatureDim;
}

int variant_output_dim(Variant v) {
  return (v == Variant::GS || v == Variant::LS) ? 1 : 2;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double clip(double v, double limit) {
  return std::max(-limit, std::min(limit, v));
}

// ---------------------------------------------------------------------------
// Reservation-based rollout (GR / BR)
// ---------------------------------------------------------------------------

struct ResStep {
  LatentState state;  // latent entering the step
  Reservation y;
  AllocationResult rec;
  std::vector<double> margins;
  LossTable losses;
  RiskWeights rho;
  std::vector<double> sum_z;  // pre-clip per-slot update accumulators
  std::vector<double> sum_w;  // pre-clip per-tunnel gate accumulators
};

struct ResTape {
  std::vector<ResStep> steps;
  LatentState final_state;
  Reservation final_y;
  AllocationResult final_rec;
  LossTable final_losses;
};

struct ResScratch {
  std::vector<double> features;
};

void res_perceive(const Instance& inst, const ScenarioSet& set,
                  const RiskSpec& spec, const LatentState& state, bool gated,
                  ResStep& out) {
  out.state = state;
  out.y = gated ? project_gated(inst, state) : project_br(inst, state);
  out.rec = recover_allocation(inst, out.y);
  out.margins = bottleneck_margin(inst, out.y, out.rec);
  out.losses = compute_losses(inst, out.rec.alloc, set);
  out.rho = risk_weights(spec, out.losses, set);
}

void res_update_sums(const Instance& inst, const ScenarioSet& set,
                     const PolicyParams& params, const FeatureNorms& norms,
                     ResStep& step, ResScratch& scratch) {
  const int S = inst.num_slots();
  const int N = set.size();
  step.sum_z.assign(S, 0.0);
  step.sum_w.assign(inst.tunnels.size(), 0.0);
  double out[2];
  for (int q = 0; q < N; ++q) {
    extract_features(inst, step.y, step.rec, step.margins, step.losses, set, q,
                     norms, scratch.features);
    for (int s = 0; s < S; ++s) {
      const int t = inst.slot_tunnel[s];
      const int f = inst.tunnels[t].flow;
      const double w = step.rho.at(f, q);
      if (w == 0.0) continue;
      policy_forward(params, &scratch.features[static_cast<std::size_t>(s) *
                                               kFeatureDim],
                     out);
      step.sum_z[s] += w * out[0];
      step.sum_w[t] += w * out[1];
    }
  }
}

RolloutResult res_forward(const PolicyParams& params, const Instance& inst,
                          const ScenarioSet& set, const RolloutConfig& cfg,
                          ResTape* tape) {
  const bool gated = cfg.variant == Variant::GR;
  const FeatureNorms norms = FeatureNorms::of(inst);
  LatentState state = LatentState::zeros(inst);
  ResScratch scratch;
  RolloutResult result;

  auto step_objective = [&](const LatentState& st) {
    Reservation y = gated ? project_gated(inst, st) : project_br(inst, st);
    AllocationResult rec = recover_allocation(inst, y);
    LossTable losses = compute_losses(inst, rec.alloc, set);
    return objective_eval(losses, set, cfg.spec).value;
  };
  if (cfg.record_trajectory) result.trajectory.push_back(step_objective(state));

  for (int k = 0; k < cfg.K; ++k) {
    ResStep step;
    res_perceive(inst, set, cfg.spec, state, gated, step);
    res_update_sums(inst, set, params, norms, step, scratch);
    for (int s = 0; s < inst.num_slots(); ++s)
      state.z[s] += clip(step.sum_z[s], cfg.update_clip);
    if (gated)
      for (std::size_t t = 0; t < inst.tunnels.size(); ++t)
        state.w[t] += clip(step.sum_w[t], cfg.update_clip);
    if (!all_finite(state.z) || !all_finite(state.w))
      fail("non-finite latent state at iteration " + std::to_string(k));
    if (tape) tape->steps.push_back(std::move(step));
    if (cfg.record_trajectory) result.trajectory.push_back(step_objective(state));
  }

  Reservation y = gated ? project_gated(inst, state) : project_br(inst, state);
  AllocationResult rec = recover_allocation(inst, y);
  LossTable losses = compute_losses(inst, rec.alloc, set);
  ObjectiveEval obj = objective_eval(losses, set, cfg.spec);
  if (!std::isfinite(obj.value))
    fail("non-finite objective after " + std::to_string(cfg.K) + " iterations");

  result.y = y;
  result.alloc = rec.alloc;
  result.objective = obj.value;
  result.scenario_loss = losses.scenario_loss;
  result.final_state = state;
  if (tape) {
    tape->final_state = state;
    tape->final_y = std::move(y);
    tape->final_rec = std::move(rec);
    tape->final_losses = std::move(losses);
  }
  return result;
}

// dJ/dloss -> dJ/dx, using the active side of the loss clamp.
void losses_backward(const Instance& inst, const ScenarioSet& set,
                     const LossTable& losses, const std::vector<double>& dloss,
                     std::vector<double>& dx) {
  const int N = losses.num_scenarios;
  for (int f = 0; f < losses.num_flows; ++f) {
    if (inst.flows[f].demand <= 0.0) continue;
    for (int q = 0; q < N; ++q) {
      double g = dloss[static_cast<std::size_t>(f) * N + q];
      if (g == 0.0 || losses.at(f, q) <= 0.0) continue;
      for (int t : inst.flow_tunnels[f])
        if (set.survives(t, q)) dx[t] -= g;
    }
  }
}

// dJ/dx -> dJ/dy via b_t = C*y at the recorded bottleneck slot.
void recover_backward(const Instance& inst, const AllocationResult& rec,
                      const std::vector<double>& dx, std::vector<double>& db,
                      std::vector<double>& dy) {
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t) {
    double demand = inst.flows[inst.tunnels[t].flow].demand;
    double g = db[t] + (demand > 0.0 ? dx[t] / demand : 0.0);
    if (g == 0.0) continue;
    int s = rec.bottleneck_slot[t];
    dy[s] += g * inst.net.edges[inst.slot_edge[s]].capacity;
  }
}

// dJ/dy -> dJ/dz (and dJ/dw for the gated variant) via the softmax Jacobian.
void softmax_backward(const Instance& inst, const Reservation& y,
                      const std::vector<double>& dy, bool gated,
                      std::vector<double>& dz, std::vector<double>& dw) {
  for (const auto& slots : inst.edge_slots) {
    if (slots.empty()) continue;
    double dot = 0.0;
    for (int s : slots) dot += y.y[s] * dy[s];
    for (int s : slots) {
      double g = y.y[s] * (dy[s] - dot);
      dz[s] += g;
      if (gated) dw[inst.slot_tunnel[s]] += g;
    }
  }
}

void res_backward(const PolicyParams& params, const Instance& inst,
                  const ScenarioSet& set, const RolloutConfig& cfg,
                  const ResTape& tape, PolicyGrad& grad) {
  const bool gated = cfg.variant == Variant::GR;
  const FeatureNorms norms = FeatureNorms::of(inst);
  const int S = inst.num_slots();
  const int T = static_cast<int>(inst.tunnels.size());
  const int F = static_cast<int>(inst.flows.size());
  const int N = set.size();

  std::vector<double> dz(S, 0.0), dw(T, 0.0);

  // Terminal objective through the final projection.
  {
    ObjectiveEval obj = objective_eval(tape.final_losses, set, cfg.spec);
    std::vector<double> dx(T, 0.0), db(T, 0.0), dy(S, 0.0);
    losses_backward(inst, set, tape.final_losses, obj.dvalue_dloss, dx);
    recover_backward(inst, tape.final_rec, dx, db, dy);
    softmax_backward(inst, tape.final_y, dy, gated, dz, dw);
  }

  ResScratch scratch;
  std::vector<double> ds(kFeatureDim);
  double upstream[2];
  for (int k = cfg.K - 1; k >= 0; --k) {
    const ResStep& step = tape.steps[k];

    // Gate the clip, then push the aggregated update gradient through the
    // policy into both the parameters and the step-k state.
    std::vector<double> dsum_z(S, 0.0), dsum_w(T, 0.0);
    for (int s = 0; s < S; ++s)
      if (std::abs(step.sum_z[s]) < cfg.update_clip) dsum_z[s] = dz[s];
    if (gated)
      for (int t = 0; t < T; ++t)
        if (std::abs(step.sum_w[t]) < cfg.update_clip) dsum_w[t] = dw[t];

    std::vector<double> dloss(static_cast<std::size_t>(F) * N, 0.0);
    std::vector<double> dlq(N, 0.0);
    std::vector<double> dx(T, 0.0), db(T, 0.0), dy(S, 0.0), dm(S, 0.0);

    for (int q = 0; q < N; ++q) {
      extract_features(inst, step.y, step.rec, step.margins, step.losses, set,
                       q, norms, scratch.features);
      for (int s = 0; s < S; ++s) {
        const int t = inst.slot_tunnel[s];
        const int f = inst.tunnels[t].flow;
        const double rho = step.rho.at(f, q);
        if (rho == 0.0) continue;
        upstream[0] = rho * dsum_z[s];
        upstream[1] = gated ? rho * dsum_w[t] : 0.0;
        if (upstream[0] == 0.0 && upstream[1] == 0.0) continue;
        policy_backward(params,
                        &scratch.features[static_cast<std::size_t>(s) *
                                          kFeatureDim],
                        upstream, grad, ds.data());
        // Feature order: alpha, l_f, l_q, x, m, C^, D^, y. alpha and the
        // normalized constants carry no gradient.
        dloss[static_cast<std::size_t>(f) * N + q] += ds[1];
        dlq[q] += ds[2];
        dx[t] += ds[3];
        dm[s] += ds[4];
        dy[s] += ds[7];
      }
    }

    if (F > 0)
      for (int q = 0; q < N; ++q) {
        if (dlq[q] == 0.0) continue;
        for (int f = 0; f < F; ++f)
          dloss[static_cast<std::size_t>(f) * N + q] += dlq[q] / F;
      }
    for (int s = 0; s < S; ++s) {
      if (dm[s] == 0.0) continue;
      dy[s] += dm[s] * inst.net.edges[inst.slot_edge[s]].capacity;
      db[inst.slot_tunnel[s]] -= dm[s];
    }
    losses_backward(inst, set, step.losses, dloss, dx);
    recover_backward(inst, step.rec, dx, db, dy);
    // dz/dw accumulate in place: the identity path Z_{k+1} = Z_k + ... keeps
    // the incoming gradient, the softmax path adds the step-k contribution.
    softmax_backward(inst, step.y, dy, gated, dz, dw);
  }
}

// ---------------------------------------------------------------------------
// Scaling-based rollout (GS / LS)
// ---------------------------------------------------------------------------

struct ScaledState {
  std::vector<double> x_raw;  // exp(xi)
  Allocation alloc;           // after the feasibility repair
  double gamma = 0.0;         // GS factor
  int gamma_edge = -1;
  std::vector<double> gamma_t;   // LS factors
  std::vector<int> gamma_edge_t;
};

struct ScaledStep {
  std::vector<double> xi;
  ScaledState st;
  LossTable losses;
  RiskWeights rho;
  std::vector<double> sum;  // pre-clip per-tunnel update accumulators
};

struct ScaledTape {
  std::vector<ScaledStep> steps;
  std::vector<double> final_xi;
  ScaledState final_st;
  LossTable final_losses;
};

ScaledState scaled_project(const Instance& inst, const std::vector<double>& xi,
                           Variant variant) {
  const int T = static_cast<int>(inst.tunnels.size());
  ScaledState st;
  st.x_raw.resize(T);
  for (int t = 0; t < T; ++t) st.x_raw[t] = std::exp(xi[t]);
  Allocation raw{st.x_raw};
  std::vector<double> load = edge_loads(inst, raw);
  if (variant == Variant::GS) {
    st.gamma = 0.0;
    for (std::size_t e = 0; e < load.size(); ++e) {
      double u = load[e] / inst.net.edges[e].capacity;
      if (u > st.gamma) {
        st.gamma = u;
        st.gamma_edge = static_cast<int>(e);
      }
    }
    st.alloc = raw;
    if (st.gamma > 1.0)
      for (double& v : st.alloc.x) v /= st.gamma;
  } else {
    st.gamma_t.assign(T, 0.0);
    st.gamma_edge_t.assign(T, -1);
    st.alloc = raw;
    for (int t = 0; t < T; ++t) {
      for (int ei : inst.tunnels[t].path) {
        double u = load[ei] / inst.net.edges[ei].capacity;
        if (u > st.gamma_t[t]) {
          st.gamma_t[t] = u;
          st.gamma_edge_t[t] = ei;
        }
      }
      if (st.gamma_t[t] > 1.0) st.alloc.x[t] /= st.gamma_t[t];
    }
  }
  return st;
}

RolloutResult scaled_forward(const PolicyParams& params, const Instance& inst,
                             const ScenarioSet& set, const RolloutConfig& cfg,
                             ScaledTape* tape) {
  const int T = static_cast<int>(inst.tunnels.size());
  const int N = set.size();
  const FeatureNorms norms = FeatureNorms::of(inst);
  std::vector<double> xi(T, 0.0);
  std::vector<double> features;
  RolloutResult result;

  auto step_objective = [&](const std::vector<double>& cur) {
    ScaledState st = scaled_project(inst, cur, cfg.variant);
    LossTable losses = compute_losses(inst, st.alloc, set);
    return objective_eval(losses, set, cfg.spec).value;
  };
  if (cfg.record_trajectory) result.trajectory.push_back(step_objective(xi));

  double out[1];
  for (int k = 0; k < cfg.K; ++k) {
    ScaledStep step;
    step.xi = xi;
    step.st = scaled_project(inst, xi, cfg.variant);
    step.losses = compute_losses(inst, step.st.alloc, set);
    step.rho = risk_weights(cfg.spec, step.losses, set);
    step.sum.assign(T, 0.0);
    for (int q = 0; q < N; ++q) {
      extract_features_scaled(inst, step.st.alloc, step.losses, set, q, norms,
                              features);
      for (int t = 0; t < T; ++t) {
        const double rho = step.rho.at(inst.tunnels[t].flow, q);
        if (rho == 0.0) continue;
        policy_forward(params,
                       &features[static_cast<std::size_t>(t) *
                                 kFeatureDimScaled],
                       out);
        step.sum[t] += rho * out[0];
      }
    }
    for (int t = 0; t < T; ++t) xi[t] += clip(step.sum[t], cfg.update_clip);
    if (!all_finite(xi))
      fail("non-finite latent state at iteration " + std::to_string(k));
    if (tape) tape->steps.push_back(std::move(step));
    if (cfg.record_trajectory) result.trajectory.push_back(step_objective(xi));
  }

  ScaledState st = scaled_project(inst, xi, cfg.variant);
  LossTable losses = compute_losses(inst, st.alloc, set);
  ObjectiveEval obj = objective_eval(losses, set, cfg.spec);
  if (!std::isfinite(obj.value))
    fail("non-finite objective after " + std::to_string(cfg.K) + " iterations");
  result.alloc = st.alloc;
  result.objective = obj.value;
  result.scenario_loss = losses.scenario_loss;
  result.final_xi = xi;
  if (tape) {
    tape->final_xi = xi;
    tape->final_st = std::move(st);
    tape->final_losses = std::move(losses);
  }
  return result;
}

// dJ/dx (post-repair) -> dJ/dxi, through the scaling repair and the exp.
void scaled_project_backward(const Instance& inst, const ScaledState& st,
                             Variant variant, const std::vector<double>& dx,
                             std::vector<double>& dxi) {
  const int T = static_cast<int>(inst.tunnels.size());
  std::vector<double> dxraw(T, 0.0);
  if (variant == Variant::GS) {
    if (st.gamma > 1.0) {
      double dgamma = 0.0;
      for (int t = 0; t < T; ++t) {
        dxraw[t] += dx[t] / st.gamma;
        dgamma -= dx[t] * st.x_raw[t] / (st.gamma * st.gamma);
      }
      if (dgamma != 0.0) {
        const int e = st.gamma_edge;
        const double cap = inst.net.edges[e].capacity;
        for (int t : inst.edge_tunnels[e])
          dxraw[t] += dgamma * inst.flows[inst.tunnels[t].flow].demand / cap;
      }
    } else {
      dxraw = dx;
    }
  } else {
    for (int t = 0; t < T; ++t) {
      if (st.gamma_t[t] > 1.0) {
        dxraw[t] += dx[t] / st.gamma_t[t];
        double dgamma = -dx[t] * st.x_raw[t] / (st.gamma_t[t] * st.gamma_t[t]);
        if (dgamma != 0.0) {
          const int e = st.gamma_edge_t[t];
          const double cap = inst.net.edges[e].capacity;
          for (int tau : inst.edge_tunnels[e])
            dxraw[tau] +=
                dgamma * inst.flows[inst.tunnels[tau].flow].demand / cap;
        }
      } else {
        dxraw[t] += dx[t];
      }
    }
  }
  for (int t = 0; t < T; ++t) dxi[t] += dxraw[t] * st.x_raw[t];
}

void scaled_backward(const PolicyParams& params, const Instance& inst,
                     const ScenarioSet& set, const RolloutConfig& cfg,
                     const ScaledTape& tape, PolicyGrad& grad) {
  const FeatureNorms norms = FeatureNorms::of(inst);
  const int T = static_cast<int>(inst.tunnels.size());
  const int F = static_cast<int>(inst.flows.size());
  const int N = set.size();

  std::vector<double> dxi(T, 0.0);
  {
    ObjectiveEval obj = objective_eval(tape.final_losses, set, cfg.spec);
    std::vector<double> dx(T, 0.0);
    losses_backward(inst, set, tape.final_losses, obj.dvalue_dloss, dx);
    scaled_project_backward(inst, tape.final_st, cfg.variant, dx, dxi);
  }

  std::vector<double> features;
  std::vector<double> ds(kFeatureDimScaled);
  double upstream[1];
  for (int k = cfg.K - 1; k >= 0; --k) {
    const ScaledStep& step = tape.steps[k];
    std::vector<double> dsum(T, 0.0);
    for (int t = 0; t < T; ++t)
      if (std::abs(step.sum[t]) < cfg.update_clip) dsum[t] = dxi[t];

    std::vector<double> dloss(static_cast<std::size_t>(F) * N, 0.0);
    std::vector<double> dlq(N, 0.0);
    std::vector<double> dx(T, 0.0);

    for (int q = 0; q < N; ++q) {
      extract_features_scaled(inst, step.st.alloc, step.losses, set, q, norms,
                              features);
      for (int t = 0; t < T; ++t) {
        const int f = inst.tunnels[t].flow;
        const double rho = step.rho.at(f, q);
        if (rho == 0.0 || dsum[t] == 0.0) continue;
        upstream[0] = rho * dsum[t];
        policy_backward(params,
                        &features[static_cast<std::size_t>(t) *
                                  kFeatureDimScaled],
                        upstream, grad, ds.data());
        dloss[static_cast<std::size_t>(f) * N + q] += ds[1];
        dlq[q] += ds[2];
        dx[t] += ds[3];
      }
    }
    if (F > 0)
      for (int q = 0; q < N; ++q) {
        if (dlq[q] == 0.0) continue;
        for (int f = 0; f < F; ++f)
          dloss[static_cast<std::size_t>(f) * N + q] += dlq[q] / F;
      }
    losses_backward(inst, set, step.losses, dloss, dx);
    scaled_project_backward(inst, step.st, cfg.variant, dx, dxi);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

RolloutResult unroll(const PolicyParams& params, const Instance& inst,
                     const ScenarioSet& set, const RolloutConfig& cfg) {
  if (set.num_tunnels != static_cast<int>(inst.tunnels.size()))
    fail("scenario set survival matrix does not match the instance");
  if (params.input_dim != variant_input_dim(cfg.variant))
    fail("policy input dimension does not match the variant");
  if (cfg.variant == Variant::GS || cfg.variant == Variant::LS)
    return scaled_forward(params, inst, set, cfg, nullptr);
  return res_forward(params, inst, set, cfg, nullptr);
}

GradResult loss_and_grad(const PolicyParams& params,
                         const std::vector<const DatasetItem*>& batch,
                         const RolloutConfig& cfg) {
  if (batch.empty()) fail("empty batch");
  GradResult out;
  out.grad = PolicyGrad::zeros_like(params);
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const DatasetItem* item : batch) {
    PolicyGrad g = PolicyGrad::zeros_like(params);
    if (cfg.variant == Variant::GS || cfg.variant == Variant::LS) {
      ScaledTape tape;
      RolloutResult r =
          scaled_forward(params, item->instance, item->scenarios, cfg, &tape);
      scaled_backward(params, item->instance, item->scenarios, cfg, tape, g);
      out.mean_objective += inv * r.objective;
    } else {
      ResTape tape;
      RolloutResult r =
          res_forward(params, item->instance, item->scenarios, cfg, &tape);
      res_backward(params, item->instance, item->scenarios, cfg, tape, g);
      out.mean_objective += inv * r.objective;
    }
    out.grad.add_scaled(g, inv);
  }
  return out;
}

namespace {

struct Adam {
  double lr, beta1, beta2, eps;
  std::vector<double> m, v;
  double b1t = 1.0, b2t = 1.0;

  Adam(std::size_t n, const TrainConfig& tc)
      : lr(tc.learning_rate),
        beta1(tc.adam_beta1),
        beta2(tc.adam_beta2),
        eps(tc.adam_eps),
        m(n, 0.0),
        v(n, 0.0) {}

  void step(PolicyParams& p, PolicyGrad& g) {
    b1t *= beta1;
    b2t *= beta2;
    for (std::size_t i = 0; i < m.size(); ++i) {
      double gi = g.coord(i);
      m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
      v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
      double mhat = m[i] / (1.0 - b1t);
      double vhat = v[i] / (1.0 - b2t);
      p.coord(i) -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
};

}  // namespace

TrainResult train(const PolicyParams& init, const Dataset& data,
                  const TrainConfig& tc, const RolloutConfig& rc,
                  void (*epoch_sink)(const EpochLog&, void*), void* sink_arg) {
  if (data.train.empty()) fail("training dataset is empty");
  if (tc.batch_size < 1 || tc.epochs < 1 || tc.patience < 0 ||
      !(tc.learning_rate > 0.0))
    fail("invalid training configuration");
  const std::vector<DatasetItem>& val_items =
      data.val.empty() ? data.train : data.val;

  TrainResult result;
  result.params = init;
  PolicyParams params = init;
  Adam adam(params.size(), tc);
  Rng rng(tc.seed);

  auto mean_val = [&](const PolicyParams& p) {
    double sum = 0.0;
    for (const DatasetItem& item : val_items)
      sum += unroll(p, item.instance, item.scenarios, rc).objective;
    return sum / static_cast<double>(val_items.size());
  };

  std::vector<int> order(data.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  double best = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    rng.shuffle(order);
    double train_sum = 0.0;
    for (std::size_t at = 0; at < order.size(); at += tc.batch_size) {
      std::vector<const DatasetItem*> batch;
      for (std::size_t i = at; i < order.size() &&
                               i < at + static_cast<std::size_t>(tc.batch_size);
           ++i)
        batch.push_back(&data.train[order[i]]);
      GradResult g = loss_and_grad(params, batch, rc);
      if (!std::isfinite(g.mean_objective))
        fail("training diverged (non-finite loss) at epoch " +
             std::to_string(epoch));
      train_sum += g.mean_objective * static_cast<double>(batch.size());
      adam.step(params, g.grad);
    }

    EpochLog row;
    row.epoch = epoch;
    row.train_objective = train_sum / static_cast<double>(order.size());
    row.val_objective = mean_val(params);
    row.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.log.push_back(row);
    if (epoch_sink) epoch_sink(row, sink_arg);

    if (row.val_objective < best) {
      best = row.val_objective;
      result.params = params;
      result.best_epoch = epoch;
      result.best_val_objective = best;
      bad_epochs = 0;
    } else if (++bad_epochs > tc.patience) {
      break;
    }
  }
  return result;
}

EvalReport evaluate(const PolicyParams& params, const Instance& inst,
                    const ScenarioSet& set, const RiskSpec& spec, int k_deploy,
                    std::optional<double> reference, Variant variant) {
  RolloutConfig cfg;
  cfg.K = k_deploy;
  cfg.spec = spec;
  cfg.variant = variant;
  EvalReport report;
  report.rollout = unroll(params, inst, set, cfg);
  report.objective = report.rollout.objective;
  report.scenario_loss = report.rollout.scenario_loss;
  report.reference = reference;
  if (reference)
    report.relative_error =
        (report.objective - *reference) / std::max(*reference, 1e-9);
  return report;
}

}  // namespace riskte
