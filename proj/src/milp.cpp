#include "riskte/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace riskte {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

constexpr double kBoundaryEps = 1e-9;  // open-interval slack for mask indicators

std::string tag(const char* stem, int a) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%d", stem, a);
  return buf;
}
std::string tag2(const char* stem, int a, const char* mid, int b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%d%s%d", stem, a, mid, b);
  return buf;
}
std::string tag3(const char* stem, int a, int b, int c) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%s%d_q%d_r%d", stem, a, b, c);
  return buf;
}

class Builder {
 public:
  explicit Builder(MilpModel& m) : m_(m) {}

  int var(const std::string& name, double lo, double hi, bool binary = false,
          bool free_hi = false) {
    MilpVar v;
    v.name = name;
    v.lo = lo;
    v.hi = hi;
    v.binary = binary;
    v.free_hi = free_hi;
    m_.vars.push_back(std::move(v));
    return static_cast<int>(m_.vars.size()) - 1;
  }

  MilpConstraint& row(const std::string& name, char sense, double rhs) {
    MilpConstraint c;
    c.name = name;
    c.sense = sense;
    c.rhs = rhs;
    m_.cons.push_back(std::move(c));
    return m_.cons.back();
  }

 private:
  MilpModel& m_;
};

void add(MilpConstraint& c, int var, double coef) {
  if (coef != 0.0) c.terms.push_back({var, coef});
}

// Mask indicator rows for the tail test [G <= budget], boundary-exact:
//   I=1 => G <= budget + eps,   I=0 => G >= budget + eps.
// Values in (budget, budget + eps] are classified as selected; the window is
// documented in the file header.
void tail_indicator(Builder& b, MilpModel& m, const std::string& stem, int g_var,
                    int i_var, double budget) {
  MilpConstraint& on = b.row(stem + "_on", '<', budget + kBoundaryEps + 1.0);
  add(on, g_var, 1.0);
  add(on, i_var, 1.0);
  MilpConstraint& off = b.row(stem + "_off", '>', budget + kBoundaryEps);
  add(off, g_var, 1.0);
  add(off, i_var, 1.0);
  (void)m;
}

// u = I * v with v in [0, M]: u >= v - M(1-I), u <= v, u <= M*I.
void product_bin_cont(Builder& b, const std::string& stem, int u_var, int i_var,
                      int v_var, double big_m) {
  MilpConstraint& lb = b.row(stem + "_lb", '>', -big_m);
  add(lb, u_var, 1.0);
  add(lb, v_var, -1.0);
  add(lb, i_var, -big_m);
  MilpConstraint& ub1 = b.row(stem + "_ubv", '<', 0.0);
  add(ub1, u_var, 1.0);
  add(ub1, v_var, -1.0);
  MilpConstraint& ub2 = b.row(stem + "_ubi", '<', 0.0);
  add(ub2, u_var, 1.0);
  add(ub2, i_var, -big_m);
}

// One sorting block over N losses: permutation binaries, sorted values,
// rank masses and cumulative masses, Eq-style Big-M rows. Returns the
// variable indices in `out_*`. `unit` is the name infix ("f3" or "s").
struct SortBlock {
  std::vector<int> delta;  // q-major: delta[q*N + r]
  std::vector<int> v, pi, gamma;
};

SortBlock sorting_block(Builder& b, const std::string& unit,
                        const std::vector<int>& loss_vars,
                        const std::vector<double>& probs, double big_m,
                        bool flow_level) {
  const int N = static_cast<int>(loss_vars.size());
  SortBlock blk;
  blk.delta.resize(static_cast<std::size_t>(N) * N);
  blk.v.resize(N);
  blk.pi.resize(N);
  blk.gamma.resize(N);
  const char* dstem = flow_level ? "d_" : "ds_";
  const char* vstem = flow_level ? "v_" : "vs_";
  const char* pstem = flow_level ? "pi_" : "pis_";
  const char* gstem = flow_level ? "G_" : "Gs_";
  for (int q = 0; q < N; ++q)
    for (int r = 0; r < N; ++r)
      blk.delta[static_cast<std::size_t>(q) * N + r] =
          b.var(dstem + unit + "_q" + std::to_string(q) + "_r" +
                    std::to_string(r),
                0.0, 1.0, true);
  for (int r = 0; r < N; ++r) {
    blk.v[r] = b.var(vstem + unit + "_r" + std::to_string(r), 0.0, 1.0);
    blk.pi[r] = b.var(pstem + unit + "_r" + std::to_string(r), 0.0, 1.0);
    blk.gamma[r] = b.var(gstem + unit + "_r" + std::to_string(r), 0.0, 1.0);
  }

  for (int q = 0; q < N; ++q) {
    MilpConstraint& c =
        b.row("permq_" + unit + "_q" + std::to_string(q), '=', 1.0);
    for (int r = 0; r < N; ++r)
      add(c, blk.delta[static_cast<std::size_t>(q) * N + r], 1.0);
  }
  for (int r = 0; r < N; ++r) {
    MilpConstraint& c =
        b.row("permr_" + unit + "_r" + std::to_string(r), '=', 1.0);
    for (int q = 0; q < N; ++q)
      add(c, blk.delta[static_cast<std::size_t>(q) * N + r], 1.0);
  }
  for (int q = 0; q < N; ++q)
    for (int r = 0; r < N; ++r) {
      int d = blk.delta[static_cast<std::size_t>(q) * N + r];
      // v_r <= l_q + M(1 - d)
      MilpConstraint& ub = b.row("vub_" + unit + "_q" + std::to_string(q) +
                                     "_r" + std::to_string(r),
                                 '<', big_m);
      add(ub, blk.v[r], 1.0);
      add(ub, loss_vars[q], -1.0);
      add(ub, d, big_m);
      // v_r >= l_q - M(1 - d)
      MilpConstraint& lb = b.row("vlb_" + unit + "_q" + std::to_string(q) +
                                     "_r" + std::to_string(r),
                                 '>', -big_m);
      add(lb, blk.v[r], 1.0);
      add(lb, loss_vars[q], -1.0);
      add(lb, d, -big_m);
    }
  for (int r = 0; r + 1 < N; ++r) {
    MilpConstraint& c = b.row("ord_" + unit + "_r" + std::to_string(r), '>', 0.0);
    add(c, blk.v[r], 1.0);
    add(c, blk.v[r + 1], -1.0);
  }
  for (int r = 0; r < N; ++r) {
    MilpConstraint& c =
        b.row("pidef_" + unit + "_r" + std::to_string(r), '=', 0.0);
    add(c, blk.pi[r], 1.0);
    for (int q = 0; q < N; ++q)
      add(c, blk.delta[static_cast<std::size_t>(q) * N + r], -probs[q]);
  }
  for (int r = 0; r < N; ++r) {
    MilpConstraint& c =
        b.row("gdef_" + unit + "_r" + std::to_string(r), '=', 0.0);
    add(c, blk.gamma[r], 1.0);
    for (int j = 0; j <= r; ++j) add(c, blk.pi[j], -1.0);
  }
  return blk;
}

// Masked tail objective terms over one sorting block (cvar or quantile):
// indicator binaries from Gamma, u = I*v, g = delta*u; the objective picks up
// sum_q p_q * g_{q,r}. Appends the terms to the model objective.
void masked_objective(Builder& b, MilpModel& m, const std::string& unit,
                      const SortBlock& blk, const std::vector<double>& probs,
                      const RiskSpec& spec, double big_m) {
  const int N = static_cast<int>(blk.v.size());
  const double budget = 1.0 - spec.beta;
  std::vector<int> mask(N);
  if (spec.kind == RiskKind::cvar) {
    for (int r = 0; r < N; ++r) {
      mask[r] = b.var("I_" + unit + "_r" + std::to_string(r), 0.0, 1.0, true);
      tail_indicator(b, m, "ind_" + unit + "_r" + std::to_string(r),
                     blk.gamma[r], mask[r], budget);
    }
  } else {  // quantile: I_r = A_r - A_{r-1}, A_r = [Gamma_r >= budget]
    std::vector<int> a(N);
    for (int r = 0; r < N; ++r) {
      a[r] = b.var("A_" + unit + "_r" + std::to_string(r), 0.0, 1.0, true);
      // A=1 => Gamma >= budget ; A=0 => Gamma <= budget (tie may pick either;
      // exactness at the boundary is documented in the header).
      MilpConstraint& on =
          b.row("aon_" + unit + "_r" + std::to_string(r), '>', budget - 1.0);
      add(on, blk.gamma[r], 1.0);
      add(on, a[r], -1.0);
      MilpConstraint& off =
          b.row("aoff_" + unit + "_r" + std::to_string(r), '<', budget);
      add(off, blk.gamma[r], 1.0);
      add(off, a[r], -1.0);
    }
    for (int r = 0; r < N; ++r) {
      mask[r] = b.var("I_" + unit + "_r" + std::to_string(r), 0.0, 1.0, true);
      MilpConstraint& c =
          b.row("idef_" + unit + "_r" + std::to_string(r), '=', 0.0);
      add(c, mask[r], 1.0);
      add(c, a[r], -1.0);
      if (r > 0) add(c, a[r - 1], 1.0);
    }
  }
  for (int r = 0; r < N; ++r) {
    int u = b.var("u_" + unit + "_r" + std::to_string(r), 0.0, 1.0);
    product_bin_cont(b, "u_" + unit + "_r" + std::to_string(r), u, mask[r],
                     blk.v[r], big_m);
    for (int q = 0; q < N; ++q) {
      int g = b.var("g_" + unit + "_q" + std::to_string(q) + "_r" +
                        std::to_string(r),
                    0.0, 1.0);
      product_bin_cont(
          b, "g_" + unit + "_q" + std::to_string(q) + "_r" + std::to_string(r),
          g, blk.delta[static_cast<std::size_t>(q) * N + r], u, big_m);
      m.objective.push_back({g, probs[q]});
    }
  }
}

}  // namespace

int MilpModel::num_binary() const {
  int n = 0;
  for (const MilpVar& v : vars) n += v.binary ? 1 : 0;
  return n;
}

int MilpModel::num_delta() const {
  int n = 0;
  for (const MilpVar& v : vars)
    if (v.binary && v.name.size() > 2 && v.name[0] == 'd' && v.name[1] == '_')
      ++n;
  return n;
}

int MilpModel::var_index(const std::string& name) const {
  for (int i = 0; i < static_cast<int>(vars.size()); ++i)
    if (vars[i].name == name) return i;
  return -1;
}

MilpModel build_milp(const Instance& inst, const ScenarioSet& set,
                     const RiskSpec& spec, double big_m, bool strict_clamp) {
  const int F = static_cast<int>(inst.flows.size());
  const int N = set.size();
  const int T = static_cast<int>(inst.tunnels.size());
  if (N < 1) fail("milp export requires at least one scenario");
  if (big_m < 1.0) fail("big-M must be >= 1 (losses are bounded by 1)");
  if (spec.exact_cvar)
    fail("unsupported spec combination: exact cvar masks are fractional and "
         "cannot be exported as a binary-mask model");

  MilpModel m;
  m.big_m = big_m;
  m.spec = spec;
  Builder b(m);
  std::vector<double> probs(N);
  for (int q = 0; q < N; ++q) probs[q] = set.scenarios[q].prob;

  // x_{f,t} >= 0, bounded by the tightest single-edge capacity argument.
  std::vector<int> xvar(T, -1);
  for (int t = 0; t < T; ++t) {
    const Tunnel& tn = inst.tunnels[t];
    const double demand = inst.flows[tn.flow].demand;
    double ub = 1.0;
    bool free_hi = false;
    if (demand > 0.0) {
      ub = std::numeric_limits<double>::infinity();
      for (int ei : tn.path)
        ub = std::min(ub, inst.net.edges[ei].capacity / demand);
    }
    xvar[t] = b.var(tag2("x_f", tn.flow, "_t", t), 0.0, ub, false, free_hi);
  }

  // l_{f,q} in [0,1]; zero-demand flows are fully served by convention and
  // their losses are pinned to 0.
  std::vector<int> lvar(static_cast<std::size_t>(F) * N, -1);
  for (int f = 0; f < F; ++f)
    for (int q = 0; q < N; ++q) {
      double hi = inst.flows[f].demand > 0.0 ? 1.0 : 0.0;
      lvar[static_cast<std::size_t>(f) * N + q] =
          b.var(tag2("l_f", f, "_q", q), 0.0, hi);
    }

  // Capacity rows for edges that carry at least one tunnel.
  for (int e = 0; e < static_cast<int>(inst.net.edges.size()); ++e) {
    if (inst.edge_tunnels[e].empty()) continue;
    MilpConstraint& c = b.row(tag("cap_e", e), '<', inst.net.edges[e].capacity);
    for (int t : inst.edge_tunnels[e])
      add(c, xvar[t], inst.flows[inst.tunnels[t].flow].demand);
  }

  // Loss definition, one-sided: l >= 1 - sum alpha x.
  for (int f = 0; f < F; ++f) {
    if (inst.flows[f].demand <= 0.0) continue;
    for (int q = 0; q < N; ++q) {
      MilpConstraint& c = b.row(tag2("loss_f", f, "_q", q), '>', 1.0);
      add(c, lvar[static_cast<std::size_t>(f) * N + q], 1.0);
      for (int t : inst.flow_tunnels[f])
        if (set.survives(t, q)) add(c, xvar[t], 1.0);
      if (strict_clamp) {
        // zc = 1 <=> the clamp is active (served >= 1, l = 0).
        double served_ub = 0.0;
        for (int t : inst.flow_tunnels[f]) served_ub += m.vars[xvar[t]].hi;
        double ma = std::max(1.0, served_ub);
        int zc = b.var(tag2("zc_f", f, "_q", q), 0.0, 1.0, true);
        MilpConstraint& cu = b.row(tag2("clampub_f", f, "_q", q), '<', 1.0);
        add(cu, lvar[static_cast<std::size_t>(f) * N + q], 1.0);
        for (int t : inst.flow_tunnels[f])
          if (set.survives(t, q)) add(cu, xvar[t], 1.0);
        add(cu, zc, -ma);
        MilpConstraint& cz = b.row(tag2("clampz_f", f, "_q", q), '<', 1.0);
        add(cz, lvar[static_cast<std::size_t>(f) * N + q], 1.0);
        add(cz, zc, 1.0);
      }
    }
  }

  // Per-flow sorting blocks (always emitted; the objective may not use them).
  std::vector<SortBlock> flow_blocks;
  flow_blocks.reserve(F);
  for (int f = 0; f < F; ++f) {
    std::vector<int> losses(N);
    for (int q = 0; q < N; ++q)
      losses[q] = lvar[static_cast<std::size_t>(f) * N + q];
    flow_blocks.push_back(
        sorting_block(b, "f" + std::to_string(f), losses, probs, big_m, true));
  }

  // Objective per kind and granularity.
  std::ostringstream doc;
  doc << "unified sort-and-select model: objective " << to_string(spec.kind)
      << ", beta " << spec.beta << ", granularity "
      << (spec.granularity == Granularity::scenario ? "scenario" : "flow")
      << "\n";
  if (spec.granularity == Granularity::scenario) {
    std::vector<int> lq(N);
    for (int q = 0; q < N; ++q) {
      lq[q] = b.var(tag("lq_q", q), 0.0, 1.0);
      MilpConstraint& c = b.row(tag("lqdef_q", q), '=', 0.0);
      add(c, lq[q], 1.0);
      for (int f = 0; f < F; ++f)
        add(c, lvar[static_cast<std::size_t>(f) * N + q],
            F > 0 ? -1.0 / F : 0.0);
    }
    switch (spec.kind) {
      case RiskKind::robust: {
        int jmax = b.var("Jmax", 0.0, 1.0);
        for (int q = 0; q < N; ++q) {
          MilpConstraint& c = b.row(tag("epi_q", q), '>', 0.0);
          add(c, jmax, 1.0);
          add(c, lq[q], -1.0);
        }
        m.objective.push_back({jmax, 1.0});
        doc << "robust: epigraph Jmax >= lq_q, minimize Jmax\n";
        break;
      }
      case RiskKind::expectation:
        for (int q = 0; q < N; ++q) m.objective.push_back({lq[q], probs[q]});
        doc << "expectation: minimize sum_q p_q lq_q\n";
        break;
      case RiskKind::cvar:
      case RiskKind::quantile: {
        SortBlock blk = sorting_block(b, "s", lq, probs, big_m, false);
        masked_objective(b, m, "s", blk, probs, spec, big_m);
        doc << "masked tail over the scenario-level sorting block:\n";
        break;
      }
    }
  } else {
    switch (spec.kind) {
      case RiskKind::robust:
        for (int f = 0; f < F; ++f)
          m.objective.push_back({flow_blocks[f].v[0], 1.0});
        doc << "robust: minimize sum_f v_f_r0\n";
        break;
      case RiskKind::expectation:
        for (int f = 0; f < F; ++f)
          for (int q = 0; q < N; ++q)
            m.objective.push_back(
                {lvar[static_cast<std::size_t>(f) * N + q], probs[q]});
        doc << "expectation: minimize sum_f sum_q p_q l_f_q\n";
        break;
      case RiskKind::cvar:
      case RiskKind::quantile:
        for (int f = 0; f < F; ++f)
          masked_objective(b, m, "f" + std::to_string(f), flow_blocks[f], probs,
                           spec, big_m);
        doc << "masked tail per flow sorting block:\n";
        break;
    }
  }
  if (spec.kind == RiskKind::cvar || spec.kind == RiskKind::quantile) {
    doc << "mask linearization: I from Gamma via indicator rows (boundary\n"
        << "window " << kBoundaryEps << "), u = I*v via u >= v - M(1-I),\n"
        << "u <= v, u <= M*I, u >= 0; g = delta*u likewise; objective\n"
        << "sum p_q g_q_r. loss rows are one-sided (l >= 1 - sum alpha x);\n"
        << "off-optimum audits need strict_clamp.\n";
  }
  m.header = doc.str();
  return m;
}

// ---------------------------------------------------------------------------
// LP text
// ---------------------------------------------------------------------------

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void append_terms(std::string& out, const std::vector<MilpTerm>& terms,
                  const std::vector<MilpVar>& vars) {
  bool first = true;
  for (const MilpTerm& t : terms) {
    double c = t.coef;
    if (first) {
      if (c < 0.0) out += "- ";
      first = false;
    } else {
      out += (c < 0.0) ? " - " : " + ";
    }
    double a = std::fabs(c);
    if (a != 1.0) {
      out += num(a);
      out += " ";
    }
    out += vars[t.var].name;
  }
}

}  // namespace

std::string lp_text(const MilpModel& model) {
  std::string out;
  out += "\\ unified sort-and-select risk model\n";
  std::istringstream doc(model.header);
  for (std::string line; std::getline(doc, line);) out += "\\ " + line + "\n";
  out += "Minimize\n obj: ";
  append_terms(out, model.objective, model.vars);
  out += "\nSubject To\n";
  for (const MilpConstraint& c : model.cons) {
    out += " " + c.name + ": ";
    append_terms(out, c.terms, model.vars);
    switch (c.sense) {
      case '<': out += " <= "; break;
      case '>': out += " >= "; break;
      default: out += " = "; break;
    }
    out += num(c.rhs) + "\n";
  }
  out += "Bounds\n";
  for (const MilpVar& v : model.vars) {
    if (v.binary) continue;  // declared below
    if (v.free_hi)
      out += " " + num(v.lo) + " <= " + v.name + "\n";
    else
      out += " " + num(v.lo) + " <= " + v.name + " <= " + num(v.hi) + "\n";
  }
  bool any_bin = false;
  for (const MilpVar& v : model.vars) any_bin = any_bin || v.binary;
  if (any_bin) {
    out += "Binaries\n";
    std::string line = " ";
    for (const MilpVar& v : model.vars) {
      if (!v.binary) continue;
      if (line.size() + v.name.size() > 78) {
        out += line + "\n";
        line = " ";
      }
      line += v.name + " ";
    }
    if (line.size() > 1) out += line + "\n";
  }
  out += "End\n";
  return out;
}

void write_lp(const MilpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write LP file: " + path);
  out << lp_text(model);
}

std::unordered_map<std::string, double> read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open solution file: " + path);
  std::unordered_map<std::string, double> sol;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == '\\') continue;
    std::istringstream ss(line);
    std::string name;
    double value;
    if (ss >> name >> value) sol[name] = value;
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Solution verification
// ---------------------------------------------------------------------------

VerifyReport verify_solution(const MilpModel& model, const Instance& inst,
                             const ScenarioSet& set,
                             const std::unordered_map<std::string, double>& sol,
                             double tol) {
  VerifyReport report;
  const int F = static_cast<int>(inst.flows.size());
  const int N = set.size();

  std::vector<double> value(model.vars.size(), 0.0);
  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    auto it = sol.find(model.vars[i].name);
    if (it == sol.end()) {
      report.violations.push_back("missing value for variable " +
                                  model.vars[i].name);
      continue;
    }
    value[i] = it->second;
  }
  if (!report.violations.empty()) return report;

  for (std::size_t i = 0; i < model.vars.size(); ++i) {
    const MilpVar& v = model.vars[i];
    if (value[i] < v.lo - tol || (!v.free_hi && value[i] > v.hi + tol))
      report.violations.push_back("bound violated: " + v.name + " = " +
                                  std::to_string(value[i]));
    if (v.binary && std::fabs(value[i] - std::lround(value[i])) > tol)
      report.violations.push_back("binary violated: " + v.name + " = " +
                                  std::to_string(value[i]));
  }
  for (const MilpConstraint& c : model.cons) {
    double lhs = 0.0;
    for (const MilpTerm& t : c.terms) lhs += t.coef * value[t.var];
    bool ok = c.sense == '<'   ? lhs <= c.rhs + tol
              : c.sense == '>' ? lhs >= c.rhs - tol
                               : std::fabs(lhs - c.rhs) <= tol;
    if (!ok)
      report.violations.push_back("constraint violated: " + c.name + " (lhs " +
                                  std::to_string(lhs) + ", rhs " +
                                  std::to_string(c.rhs) + ")");
  }

  // Permutation audit and independent sort check per flow block.
  for (int f = 0; f < F; ++f) {
    std::vector<double> losses(N), v_sol(N);
    for (int q = 0; q < N; ++q) {
      int li = model.var_index(tag2("l_f", f, "_q", q));
      losses[q] = value[li];
    }
    for (int r = 0; r < N; ++r) {
      int vi = model.var_index("v_f" + std::to_string(f) + "_r" +
                               std::to_string(r));
      v_sol[r] = value[vi];
    }
    std::vector<int> assigned(N, -1);
    for (int q = 0; q < N; ++q) {
      int hits = 0;
      for (int r = 0; r < N; ++r) {
        int di = model.var_index("d_f" + std::to_string(f) + "_q" +
                                 std::to_string(q) + "_r" + std::to_string(r));
        if (std::fabs(value[di] - 1.0) <= tol) {
          ++hits;
          if (assigned[r] >= 0)
            report.violations.push_back("rank assigned twice: flow " +
                                        std::to_string(f) + " rank " +
                                        std::to_string(r));
          assigned[r] = q;
        }
      }
      if (hits != 1)
        report.violations.push_back("scenario " + std::to_string(q) +
                                    " of flow " + std::to_string(f) +
                                    " is ranked " + std::to_string(hits) +
                                    " times");
    }
    std::vector<double> sorted = losses;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    for (int r = 0; r < N; ++r)
      if (std::fabs(sorted[r] - v_sol[r]) > tol) {
        report.violations.push_back(
            "v does not match the sorted losses: flow " + std::to_string(f) +
            " rank " + std::to_string(r));
        break;
      }
  }

  report.model_objective = 0.0;
  for (const MilpTerm& t : model.objective)
    report.model_objective += t.coef * value[t.var];

  Allocation x;
  x.x.assign(inst.tunnels.size(), 0.0);
  for (std::size_t t = 0; t < inst.tunnels.size(); ++t) {
    int xi = model.var_index(
        tag2("x_f", inst.tunnels[t].flow, "_t", static_cast<int>(t)));
    x.x[t] = value[xi];
  }
  report.recomputed_objective = objective(inst, x, set, model.spec);
  report.objectives_match =
      std::fabs(report.recomputed_objective - report.model_objective) <= tol;
  report.ok = report.violations.empty() && report.objectives_match;
  return report;
}

}  // namespace riskte
