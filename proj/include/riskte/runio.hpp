#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "riskte/scenario.hpp"
#include "riskte/unroll.hpp"

namespace riskte {

// 64-bit FNV-1a, used for config hashes and input digests in run manifests.
std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t fnv1a_file(const std::string& path);
std::string hex64(std::uint64_t v);

// Every command writes exactly one manifest.json into its output directory:
// command line, config hash, seeds, input digests and wall-clock. Re-running
// with the same seeds and inputs reproduces byte-identical outputs.
struct RunManifest {
  std::string command_line;
  std::string config_json = "{}";
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> input_digests;
  double wall_ms = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& out_dir);

// Gravity-model demands: D_{s,d} proportional to w_s * w_d over all ordered
// pairs, scaled so the demands sum to total_demand. Weights default to node
// degree (out-degree + in-degree); zero-weight pairs get zero demand.
std::vector<Flow> gravity_demands(const Network& net, double total_demand,
                                  const std::vector<double>& node_weights = {});

// Dataset directory layout: <dir>/{train,val}/item_*.instance.json with a
// shared scenarios.json per split (or per-item *.scenarios.json overrides).
Dataset load_dataset(const std::string& dir);
void save_dataset_split(const std::vector<DatasetItem>& items,
                        const std::string& split_dir);

// Perturbed-demand copies of a base instance sharing one scenario set.
std::vector<DatasetItem> perturbed_items(const Instance& base,
                                         const ScenarioSet& set, int count,
                                         double sigma, std::uint64_t seed,
                                         const std::string& prefix);

// Fraction of carried traffic on 1-hop tunnels. Per flow, carried traffic is
// D_f * x capped at D_f (proportionally when over-provisioned).
double direct_ratio(const Instance& inst, const Allocation& alloc);

struct AblationRow {
  Variant variant = Variant::GR;
  double final_objective = 0.0;
  double direct = 0.0;
  int best_epoch = -1;
};

// Trains each variant with the same budget and data, then evaluates at K.
std::vector<AblationRow> run_ablation(const Instance& inst,
                                      const ScenarioSet& set,
                                      const RiskSpec& spec,
                                      const std::vector<Variant>& variants,
                                      const TrainConfig& tc, int unroll_k,
                                      int items, double sigma);

// CSV helpers (UTF-8, '\n' line endings, header row included).
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);

struct ReportRow {
  std::string topology;
  std::string objective;
  double beta = 0.0;
  int k_deploy = 0;
  double j = 0.0;
  std::optional<double> jstar;
  double rel_err = 0.0;
  double wall_ms = 0.0;
};

// Aggregates eval_*.json outputs under a directory into one CSV table.
std::vector<ReportRow> collect_reports(const std::string& dir);
void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path);

}  // namespace riskte
