// riskte: risk-aware traffic engineering over probabilistic failure
// scenarios. Subcommands generate synthetic instances, train and deploy the
// unrolled optimizer, run the brute-force oracle, export the sort-and-select
// MILP, and aggregate evaluation reports.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "riskte/milp.hpp"
#include "riskte/oracle.hpp"
#include "riskte/runio.hpp"
#include "riskte/unroll.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riskte;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += " ";
    s += argv[i];
  }
  return s;
}

RiskSpec make_spec(const std::string& objective, double beta,
                   const std::string& granularity, bool exact_cvar) {
  RiskSpec spec = RiskSpec::make(parse_risk_kind(objective), beta);
  if (granularity == "flow") spec.granularity = Granularity::flow;
  if (granularity == "scenario") spec.granularity = Granularity::scenario;
  spec.exact_cvar = exact_cvar;
  return spec;
}

void dump_reservation_csv(const Instance& inst, const Reservation& y,
                          const std::string& path) {
  AllocationResult rec = recover_allocation(inst, y);
  std::vector<double> margins = bottleneck_margin(inst, y, rec);
  std::vector<std::string> rows;
  for (int s = 0; s < inst.num_slots(); ++s) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.12g,%.12g",
                  inst.tunnels[inst.slot_tunnel[s]].id.c_str(),
                  inst.net.edges[inst.slot_edge[s]].id.c_str(), y.y[s],
                  margins[s]);
    rows.push_back(buf);
  }
  write_csv(path, "tunnel,edge,y,margin", rows);
}

void dump_losses_csv(const Instance& inst, const LossTable& losses,
                     const ScenarioSet& set, const std::string& path) {
  std::vector<std::string> rows;
  for (int f = 0; f < losses.num_flows; ++f)
    for (int q = 0; q < losses.num_scenarios; ++q) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%s,%d,%.12g", inst.flows[f].id.c_str(),
                    set.scenarios[q].id, losses.at(f, q));
      rows.push_back(buf);
    }
  write_csv(path, "flow,scenario,loss", rows);
}

void dump_sorted_csv(const LossTable& losses, const ScenarioSet& set,
                     const std::string& path) {
  SortedLoss sorted = sort_losses(losses, set);
  std::vector<std::string> rows;
  for (std::size_t f = 0; f < sorted.rows.size(); ++f) {
    const SortedRow& row = sorted.rows[f];
    for (std::size_t r = 0; r < row.v.size(); ++r) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%d,%.12g,%.12g,%.12g", f, r,
                    row.rank_to_scenario[r], row.v[r], row.pi[r], row.gamma[r]);
      rows.push_back(buf);
    }
  }
  write_csv(path, "flow,rank,scenario,v,pi,gamma", rows);
}

void write_eval_json(const std::string& dir, const std::string& name,
                     const std::string& topology, const RiskSpec& spec,
                     int k_deploy, double j, std::optional<double> jstar,
                     double rel_err, double wall_ms) {
  json out;
  out["topology"] = topology;
  out["objective"] = to_string(spec.kind);
  out["beta"] = spec.beta;
  out["k_deploy"] = k_deploy;
  out["J"] = j;
  if (jstar)
    out["Jstar"] = *jstar;
  else
    out["Jstar"] = nullptr;
  out["rel_err"] = rel_err;
  out["wall_ms"] = wall_ms;
  std::ofstream f(fs::path(dir) / ("eval_" + name + ".json"));
  f << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"risk-aware traffic engineering toolkit"};
  app.require_subcommand(1);
  int threads = 1;  // computations are deterministic regardless
  app.add_option("--threads", threads, "worker threads (reserved)");

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance + scenarios");
  std::string g_topology = "ring";
  int g_nodes = 8, g_chords = 4, g_rows = 3, g_cols = 3, g_ksp = 3;
  double g_cap_lo = 5.0, g_cap_hi = 20.0, g_capacity = 10.0;
  double g_total_demand = 60.0;
  double g_cutoff_c = 100.0, g_weibull_s = 2.0, g_shape = 0.8;
  int g_max_failures = 2;
  int g_train_items = 0, g_val_items = 0;
  double g_sigma = 0.1;
  std::uint64_t g_seed = 1;
  std::string g_out = "out";
  gen->add_option("--topology", g_topology, "complete | ring | grid");
  gen->add_option("--nodes", g_nodes);
  gen->add_option("--chords", g_chords);
  gen->add_option("--rows", g_rows);
  gen->add_option("--cols", g_cols);
  gen->add_option("--k-sp", g_ksp, "tunnels per flow");
  gen->add_option("--capacity", g_capacity, "uniform capacity (complete/grid)");
  gen->add_option("--cap-lo", g_cap_lo);
  gen->add_option("--cap-hi", g_cap_hi);
  gen->add_option("--total-demand", g_total_demand);
  gen->add_option("--cutoff-c", g_cutoff_c, "pruning cutoff c (tau = c*1e-5)");
  gen->add_option("--weibull-s", g_weibull_s, "Weibull scale s (lambda = s*1e-3)");
  gen->add_option("--shape", g_shape, "Weibull shape");
  gen->add_option("--max-failures", g_max_failures);
  gen->add_option("--train-items", g_train_items, "perturbed training copies");
  gen->add_option("--val-items", g_val_items);
  gen->add_option("--demand-sigma", g_sigma);
  gen->add_option("--seed", g_seed);
  gen->add_option("--out", g_out)->required();

  // ---- train --------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "train the update policy");
  std::string t_data, t_out = "params.json";
  std::string t_objective = "cvar", t_granularity = "default", t_variant = "GR";
  double t_beta = 0.95, t_lr = 1e-3, t_clip = 10.0;
  bool t_exact_cvar = false;
  int t_k = 7, t_batch = 16, t_epochs = 30, t_patience = 10;
  std::uint64_t t_seed = 1;
  tr->add_option("--data", t_data, "dataset dir with train/ and val/")->required();
  tr->add_option("--objective", t_objective);
  tr->add_option("--beta", t_beta);
  tr->add_option("--granularity", t_granularity, "scenario | flow | default");
  tr->add_flag("--exact-cvar", t_exact_cvar);
  tr->add_option("-K,--unroll", t_k);
  tr->add_option("--variant", t_variant, "GR | BR | GS | LS");
  tr->add_option("--clip", t_clip);
  tr->add_option("--lr", t_lr);
  tr->add_option("--batch", t_batch);
  tr->add_option("--epochs", t_epochs);
  tr->add_option("--patience", t_patience);
  tr->add_option("--seed", t_seed);
  tr->add_option("--out", t_out)->required();

  // ---- infer --------------------------------------------------------------
  auto* inf = app.add_subcommand("infer", "deploy trained parameters");
  std::string i_params, i_instance, i_scenarios, i_csv = "",
              i_features = "", i_out = "";
  std::string i_objective = "cvar", i_granularity = "default",
              i_variant = "GR";
  double i_beta = 0.95;
  int i_k1 = 7;
  std::optional<double> i_jstar;
  double i_jstar_val = 0.0;
  inf->add_option("--params", i_params)->required();
  inf->add_option("--instance", i_instance)->required();
  inf->add_option("--scenarios", i_scenarios)->required();
  inf->add_option("-K,--k1", i_k1, "deployment iterations");
  inf->add_option("--objective", i_objective);
  inf->add_option("--beta", i_beta);
  inf->add_option("--granularity", i_granularity);
  inf->add_option("--variant", i_variant);
  inf->add_option("--csv", i_csv, "reservation dump CSV");
  inf->add_option("--dump-features", i_features, "per-iteration feature CSV");
  auto* jstar_opt = inf->add_option("--jstar", i_jstar_val, "reference optimum");
  inf->add_option("--out", i_out, "output dir for eval row + allocation");

  // ---- eval ---------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "evaluate an allocation file");
  std::string e_instance, e_scenarios, e_alloc, e_out = "";
  std::string e_objective = "expectation", e_granularity = "default";
  double e_beta = 0.95;
  bool e_exact_cvar = false;
  ev->add_option("--instance", e_instance)->required();
  ev->add_option("--scenarios", e_scenarios)->required();
  ev->add_option("--alloc", e_alloc)->required();
  ev->add_option("--objective", e_objective);
  ev->add_option("--beta", e_beta);
  ev->add_option("--granularity", e_granularity);
  ev->add_flag("--exact-cvar", e_exact_cvar);
  ev->add_option("--out", e_out, "output dir for CSV tables");

  // ---- oracle -------------------------------------------------------------
  auto* orc = app.add_subcommand("oracle", "brute-force reservation optimum");
  std::string o_instance, o_scenarios, o_out = "jstar.json";
  std::string o_objective = "expectation", o_granularity = "default";
  double o_beta = 0.95, o_step = 0.05;
  int o_refine = 200, o_restarts = 0;
  std::uint64_t o_seed = 1;
  std::size_t o_cap = 10'000'000;
  orc->add_option("--instance", o_instance)->required();
  orc->add_option("--scenarios", o_scenarios)->required();
  orc->add_option("--objective", o_objective);
  orc->add_option("--beta", o_beta);
  orc->add_option("--granularity", o_granularity);
  orc->add_option("--step", o_step);
  orc->add_option("--refine-iters", o_refine);
  orc->add_option("--restarts", o_restarts);
  orc->add_option("--eval-cap", o_cap);
  orc->add_option("--seed", o_seed);
  orc->add_option("--out", o_out)->required();

  // ---- ablate -------------------------------------------------------------
  auto* ab = app.add_subcommand("ablate", "compare feasibility variants");
  std::string a_instance, a_scenarios, a_out = "ablate";
  std::string a_objective = "expectation", a_granularity = "default";
  std::string a_variants = "GR,BR,GS,LS";
  double a_beta = 0.95, a_sigma = 0.1, a_lr = 1e-3;
  int a_k = 7, a_items = 32, a_epochs = 30, a_batch = 16, a_patience = 10;
  std::uint64_t a_seed = 1;
  ab->add_option("--instance", a_instance)->required();
  ab->add_option("--scenarios", a_scenarios)->required();
  ab->add_option("--objective", a_objective);
  ab->add_option("--beta", a_beta);
  ab->add_option("--granularity", a_granularity);
  ab->add_option("--variants", a_variants);
  ab->add_option("-K,--unroll", a_k);
  ab->add_option("--items", a_items);
  ab->add_option("--sigma", a_sigma);
  ab->add_option("--lr", a_lr);
  ab->add_option("--epochs", a_epochs);
  ab->add_option("--batch", a_batch);
  ab->add_option("--patience", a_patience);
  ab->add_option("--seed", a_seed);
  ab->add_option("--out", a_out)->required();

  // ---- export-milp ----------------------------------------------------------
  auto* mx = app.add_subcommand("export-milp", "emit the LP-format model");
  std::string m_instance, m_scenarios, m_out = "model.lp", m_verify = "";
  std::string m_objective = "robust", m_granularity = "default";
  double m_beta = 0.95, m_bigm = 1.0;
  bool m_strict = false;
  mx->add_option("--instance", m_instance)->required();
  mx->add_option("--scenarios", m_scenarios)->required();
  mx->add_option("--objective", m_objective);
  mx->add_option("--beta", m_beta);
  mx->add_option("--granularity", m_granularity);
  mx->add_option("--big-m", m_bigm);
  mx->add_flag("--strict-clamp", m_strict);
  mx->add_option("--verify", m_verify, "check a solver solution file");
  mx->add_option("--out", m_out)->required();

  // ---- report -------------------------------------------------------------
  auto* rp = app.add_subcommand("report", "aggregate eval outputs into CSV");
  std::string r_in, r_out = "report.csv";
  rp->add_option("--in", r_in)->required();
  rp->add_option("--out", r_out)->required();

  CLI11_PARSE(app, argc, argv);
  Timer timer;

  try {
    if (*gen) {
      Network net;
      json cfg;
      cfg["topology"] = g_topology;
      if (g_topology == "complete") {
        net = make_complete_graph(g_nodes, g_capacity);
      } else if (g_topology == "ring") {
        net = make_ring_with_chords(g_nodes, g_chords, g_cap_lo, g_cap_hi, g_seed);
      } else if (g_topology == "grid") {
        net = make_grid_graph(g_rows, g_cols, g_capacity);
      } else {
        throw std::runtime_error("unknown topology kind: " + g_topology);
      }
      Instance inst;
      inst.net = net;
      inst.flows = gravity_demands(net, g_total_demand);
      inst.tunnels = generate_tunnels(net, inst.flows, g_ksp);
      inst.build_index();

      FailureModel fm;
      fm.cutoff_c = g_cutoff_c;
      fm.weibull_s = g_weibull_s;
      fm.shape = g_shape;
      fm.max_failures = g_max_failures;
      fm.seed = g_seed;
      ScenarioSet set = generate_scenarios(net, fm);
      build_survival(inst, set);

      fs::create_directories(g_out);
      save_instance(inst, (fs::path(g_out) / "instance.json").string());
      save_scenarios(set, inst, (fs::path(g_out) / "scenarios.json").string());
      if (g_train_items > 0)
        save_dataset_split(
            perturbed_items(inst, set, g_train_items, g_sigma, g_seed, "item"),
            (fs::path(g_out) / "train").string());
      if (g_val_items > 0)
        save_dataset_split(perturbed_items(inst, set, g_val_items, g_sigma,
                                           g_seed + 777, "item"),
                           (fs::path(g_out) / "val").string());
      cfg["seed"] = g_seed;
      cfg["nodes"] = static_cast<int>(net.nodes.size());
      cfg["edges"] = static_cast<int>(net.edges.size());
      cfg["tunnels"] = static_cast<int>(inst.tunnels.size());
      cfg["scenarios"] = set.size();
      RunManifest man;
      man.command_line = join_args(argc, argv);
      man.config_json = cfg.dump();
      man.seeds = {g_seed};
      man.wall_ms = timer.ms();
      write_manifest(man, g_out);
      std::printf("gen: %zu nodes, %zu edges, %zu tunnels, %d scenarios -> %s\n",
                  net.nodes.size(), net.edges.size(), inst.tunnels.size(),
                  set.size(), g_out.c_str());
    } else if (*tr) {
      Dataset data = load_dataset(t_data);
      RiskSpec spec = make_spec(t_objective, t_beta, t_granularity, t_exact_cvar);
      RolloutConfig rc;
      rc.K = t_k;
      rc.spec = spec;
      rc.update_clip = t_clip;
      rc.variant = parse_variant(t_variant);
      TrainConfig tc;
      tc.learning_rate = t_lr;
      tc.batch_size = t_batch;
      tc.epochs = t_epochs;
      tc.patience = t_patience;
      tc.seed = t_seed;
      PolicyParams init = init_params(t_seed, variant_input_dim(rc.variant), 64,
                                      variant_output_dim(rc.variant));

      fs::path out_dir = fs::path(t_out).parent_path();
      if (out_dir.empty()) out_dir = ".";
      fs::create_directories(out_dir);
      std::ofstream log_csv(out_dir / "train_log.csv");
      log_csv << "epoch,train_J,val_J,wall_ms\n";
      auto sink = [](const EpochLog& row, void* arg) {
        auto* s = static_cast<std::ofstream*>(arg);
        (*s) << row.epoch << "," << row.train_objective << ","
             << row.val_objective << "," << row.wall_ms << "\n";
        s->flush();
      };
      TrainResult result = train(init, data, tc, rc, sink, &log_csv);

      json meta;
      meta["objective"] = t_objective;
      meta["beta"] = t_beta;
      meta["K"] = t_k;
      meta["variant"] = t_variant;
      meta["seed"] = t_seed;
      meta["best_epoch"] = result.best_epoch;
      meta["best_val_J"] = result.best_val_objective;
      save_params(result.params, t_out, meta.dump());
      RunManifest man;
      man.command_line = join_args(argc, argv);
      man.config_json = meta.dump();
      man.seeds = {t_seed};
      man.input_digests.push_back({t_data, "dir"});
      man.wall_ms = timer.ms();
      write_manifest(man, out_dir.string());
      std::printf("train: best epoch %d, val J %.6g -> %s\n", result.best_epoch,
                  result.best_val_objective, t_out.c_str());
    } else if (*inf) {
      Instance inst = load_instance(i_instance);
      ScenarioSet set = load_scenarios(i_scenarios, inst);
      PolicyParams params = load_params(i_params);
      RiskSpec spec = make_spec(i_objective, i_beta, i_granularity, false);
      Variant variant = parse_variant(i_variant);
      if (jstar_opt->count()) i_jstar = i_jstar_val;

      RolloutConfig rc;
      rc.K = i_k1;
      rc.spec = spec;
      rc.variant = variant;
      rc.record_trajectory = true;
      RolloutResult roll = unroll(params, inst, set, rc);
      double rel = i_jstar ? (roll.objective - *i_jstar) / std::max(*i_jstar, 1e-9)
                           : 0.0;
      std::printf("infer: J = %.9g", roll.objective);
      if (i_jstar) std::printf("  (rel err %.4g vs J* %.9g)", rel, *i_jstar);
      std::printf("\n");

      if (!i_csv.empty() && !roll.y.y.empty())
        dump_reservation_csv(inst, roll.y, i_csv);
      if (!i_features.empty()) {
        // Feature dump per deployed iteration: replay the rollout prefixes.
        std::vector<std::string> rows;
        FeatureNorms norms = FeatureNorms::of(inst);
        for (int k = 0; k <= i_k1; ++k) {
          RolloutConfig prefix = rc;
          prefix.K = k;
          prefix.record_trajectory = false;
          RolloutResult r = unroll(params, inst, set, prefix);
          if (r.y.y.empty()) continue;
          AllocationResult rec = recover_allocation(inst, r.y);
          std::vector<double> margins = bottleneck_margin(inst, r.y, rec);
          LossTable losses = compute_losses(inst, rec.alloc, set);
          std::vector<double> feats;
          for (int q = 0; q < set.size(); ++q) {
            extract_features(inst, r.y, rec, margins, losses, set, q, norms,
                             feats);
            for (int s = 0; s < inst.num_slots(); ++s) {
              char buf[320];
              const double* row = &feats[static_cast<std::size_t>(s) * kFeatureDim];
              std::snprintf(buf, sizeof(buf),
                            "%d,%d,%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g",
                            k, q, inst.tunnels[inst.slot_tunnel[s]].id.c_str(),
                            inst.net.edges[inst.slot_edge[s]].id.c_str(), row[0],
                            row[1], row[2], row[3], row[4], row[5], row[6],
                            row[7]);
              rows.push_back(buf);
            }
          }
        }
        write_csv(i_features,
                  "k,scenario,tunnel,edge,alpha,loss_f,loss_q,x,margin,cap_n,"
                  "demand_n,y",
                  rows);
      }
      if (!i_out.empty()) {
        fs::create_directories(i_out);
        save_allocation(roll.alloc, inst,
                        (fs::path(i_out) / "allocation.json").string());
        write_eval_json(i_out, "infer", fs::path(i_instance).stem().string(),
                        spec, i_k1, roll.objective, i_jstar, rel, timer.ms());
        RunManifest man;
        man.command_line = join_args(argc, argv);
        man.seeds = {};
        man.input_digests = {{i_instance, hex64(fnv1a_file(i_instance))},
                             {i_scenarios, hex64(fnv1a_file(i_scenarios))},
                             {i_params, hex64(fnv1a_file(i_params))}};
        man.wall_ms = timer.ms();
        write_manifest(man, i_out);
      }
    } else if (*ev) {
      Instance inst = load_instance(e_instance);
      ScenarioSet set = load_scenarios(e_scenarios, inst);
      Allocation alloc = load_allocation(e_alloc, inst);
      RiskSpec spec = make_spec(e_objective, e_beta, e_granularity, e_exact_cvar);
      LossTable losses = compute_losses(inst, alloc, set);
      double j = objective_eval(losses, set, spec).value;
      std::printf("eval: J = %.9g (%s, beta %.4g)\n", j, e_objective.c_str(),
                  e_beta);
      if (!e_out.empty()) {
        fs::create_directories(e_out);
        dump_losses_csv(inst, losses, set,
                        (fs::path(e_out) / "losses.csv").string());
        dump_sorted_csv(losses, set,
                        (fs::path(e_out) / "sorted_losses.csv").string());
        write_eval_json(e_out, "alloc", fs::path(e_instance).stem().string(),
                        spec, 0, j, std::nullopt, 0.0, timer.ms());
        RunManifest man;
        man.command_line = join_args(argc, argv);
        man.input_digests = {{e_instance, hex64(fnv1a_file(e_instance))},
                             {e_scenarios, hex64(fnv1a_file(e_scenarios))},
                             {e_alloc, hex64(fnv1a_file(e_alloc))}};
        man.wall_ms = timer.ms();
        write_manifest(man, e_out);
      }
    } else if (*orc) {
      Instance inst = load_instance(o_instance);
      ScenarioSet set = load_scenarios(o_scenarios, inst);
      RiskSpec spec = make_spec(o_objective, o_beta, o_granularity, false);
      OracleConfig cfg;
      cfg.step = o_step;
      cfg.refine_iterations = o_refine;
      cfg.restarts = o_restarts;
      cfg.seed = o_seed;
      cfg.eval_cap = o_cap;
      OracleResult result = oracle_solve(inst, set, spec, cfg);
      json out;
      out["J"] = result.objective;
      out["evaluations"] = result.evaluations;
      out["objective"] = o_objective;
      out["beta"] = o_beta;
      out["step"] = o_step;
      json xs = json::array();
      for (std::size_t t = 0; t < inst.tunnels.size(); ++t)
        xs.push_back({{"tunnel", inst.tunnels[t].id},
                      {"value", result.alloc.x[t]}});
      out["x"] = xs;
      std::ofstream f(o_out);
      f << out.dump(2) << "\n";
      std::printf("oracle: J* = %.9g after %zu evaluations -> %s\n",
                  result.objective, result.evaluations, o_out.c_str());
    } else if (*ab) {
      Instance inst = load_instance(a_instance);
      ScenarioSet set = load_scenarios(a_scenarios, inst);
      RiskSpec spec = make_spec(a_objective, a_beta, a_granularity, false);
      std::vector<Variant> variants;
      std::stringstream ss(a_variants);
      for (std::string name; std::getline(ss, name, ',');)
        variants.push_back(parse_variant(name));
      TrainConfig tc;
      tc.learning_rate = a_lr;
      tc.batch_size = a_batch;
      tc.epochs = a_epochs;
      tc.patience = a_patience;
      tc.seed = a_seed;
      auto rows = run_ablation(inst, set, spec, variants, tc, a_k, a_items,
                               a_sigma);
      fs::create_directories(a_out);
      std::vector<std::string> lines;
      for (const AblationRow& row : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%.12g,%.6g,%d",
                      to_string(row.variant).c_str(), row.final_objective,
                      row.direct, row.best_epoch);
        lines.push_back(buf);
        std::printf("ablate %s: J = %.9g direct ratio %.4g\n",
                    to_string(row.variant).c_str(), row.final_objective,
                    row.direct);
      }
      write_csv((fs::path(a_out) / "ablate.csv").string(),
                "variant,final_J,direct_ratio,best_epoch", lines);
      RunManifest man;
      man.command_line = join_args(argc, argv);
      man.seeds = {a_seed};
      man.input_digests = {{a_instance, hex64(fnv1a_file(a_instance))},
                           {a_scenarios, hex64(fnv1a_file(a_scenarios))}};
      man.wall_ms = timer.ms();
      write_manifest(man, a_out);
    } else if (*mx) {
      Instance inst = load_instance(m_instance);
      ScenarioSet set = load_scenarios(m_scenarios, inst);
      RiskSpec spec = make_spec(m_objective, m_beta, m_granularity, false);
      MilpModel model = build_milp(inst, set, spec, m_bigm, m_strict);
      write_lp(model, m_out);
      std::printf("export-milp: %zu vars (%d binary), %zu rows -> %s\n",
                  model.vars.size(), model.num_binary(), model.cons.size(),
                  m_out.c_str());
      if (!m_verify.empty()) {
        auto sol = read_solution(m_verify);
        VerifyReport report = verify_solution(model, inst, set, sol);
        std::printf("verify: %s (model J %.9g, recomputed J %.9g)\n",
                    report.ok ? "OK" : "VIOLATIONS", report.model_objective,
                    report.recomputed_objective);
        for (const std::string& v : report.violations)
          std::printf("  %s\n", v.c_str());
        if (!report.ok) return 2;
      }
    } else if (*rp) {
      auto rows = collect_reports(r_in);
      write_report_csv(rows, r_out);
      std::printf("report: %zu rows -> %s\n", rows.size(), r_out.c_str());
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
