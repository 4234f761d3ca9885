#include "riskte/runio.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace riskte {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open file for digest: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a(ss.str());
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::string& out_dir) {
  fs::create_directories(out_dir);
  json j;
  j["command_line"] = manifest.command_line;
  j["config"] = json::parse(manifest.config_json);
  j["config_hash"] = hex64(fnv1a(manifest.config_json));
  j["seeds"] = manifest.seeds;
  j["inputs"] = json::array();
  for (const auto& [path, digest] : manifest.input_digests)
    j["inputs"].push_back({{"path", path}, {"digest", digest}});
  j["wall_ms"] = manifest.wall_ms;
  std::ofstream out(fs::path(out_dir) / "manifest.json");
  if (!out) fail("cannot write manifest in " + out_dir);
  out << j.dump(2) << "\n";
}

std::vector<Flow> gravity_demands(const Network& net, double total_demand,
                                  const std::vector<double>& node_weights) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<double> w = node_weights;
  if (w.empty()) {
    w.assign(n, 0.0);
    for (int v = 0; v < n; ++v)
      w[v] = static_cast<double>(net.out_edges[v].size() +
                                 net.in_edges[v].size());
  }
  if (static_cast<int>(w.size()) != n) fail("node weight vector size mismatch");
  double denom = 0.0;
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < n; ++d)
      if (s != d) denom += w[s] * w[d];
  std::vector<Flow> flows;
  for (int s = 0; s < n; ++s)
    for (int d = 0; d < n; ++d) {
      if (s == d) continue;
      Flow f;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "f_%s_%s", net.nodes[s].c_str(),
                    net.nodes[d].c_str());
      f.id = buf;
      f.src = s;
      f.dst = d;
      f.demand = denom > 0.0 ? total_demand * w[s] * w[d] / denom : 0.0;
      flows.push_back(std::move(f));
    }
  return flows;
}

std::vector<DatasetItem> perturbed_items(const Instance& base,
                                         const ScenarioSet& set, int count,
                                         double sigma, std::uint64_t seed,
                                         const std::string& prefix) {
  std::vector<DatasetItem> items;
  for (int i = 0; i < count; ++i) {
    DatasetItem item;
    item.instance = base;
    item.instance.flows = perturb_demands(base.flows, sigma, seed + i);
    item.instance.build_index();
    item.scenarios = set;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s_%03d", prefix.c_str(), i);
    item.name = buf;
    items.push_back(std::move(item));
  }
  return items;
}

void save_dataset_split(const std::vector<DatasetItem>& items,
                        const std::string& split_dir) {
  fs::create_directories(split_dir);
  for (const DatasetItem& item : items) {
    save_instance(item.instance,
                  (fs::path(split_dir) / (item.name + ".instance.json")).string());
  }
  if (!items.empty())
    save_scenarios(items.front().scenarios, items.front().instance,
                   (fs::path(split_dir) / "scenarios.json").string());
}

namespace {

std::vector<DatasetItem> load_split(const std::string& dir) {
  std::vector<DatasetItem> items;
  if (!fs::is_directory(dir)) return items;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.size() > 14 &&
        name.substr(name.size() - 14) == ".instance.json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    DatasetItem item;
    item.instance = load_instance(file.string());
    std::string stem = file.filename().string();
    stem = stem.substr(0, stem.size() - 14);
    item.name = stem;
    fs::path per_item = fs::path(dir) / (stem + ".scenarios.json");
    fs::path shared = fs::path(dir) / "scenarios.json";
    if (fs::exists(per_item))
      item.scenarios = load_scenarios(per_item.string(), item.instance);
    else if (fs::exists(shared))
      item.scenarios = load_scenarios(shared.string(), item.instance);
    else
      fail("no scenario file for dataset item " + file.string());
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

Dataset load_dataset(const std::string& dir) {
  Dataset data;
  data.train = load_split((fs::path(dir) / "train").string());
  data.val = load_split((fs::path(dir) / "val").string());
  if (data.train.empty()) fail("dataset has no training items under " + dir);
  return data;
}

double direct_ratio(const Instance& inst, const Allocation& alloc) {
  double direct = 0.0, total = 0.0;
  for (std::size_t f = 0; f < inst.flows.size(); ++f) {
    double demand = inst.flows[f].demand;
    if (demand <= 0.0) continue;
    double sum = 0.0;
    for (int t : inst.flow_tunnels[f]) sum += std::max(0.0, alloc.x[t]);
    if (sum <= 0.0) continue;
    double scale = sum > 1.0 ? 1.0 / sum : 1.0;  // deliver at most D_f
    for (int t : inst.flow_tunnels[f]) {
      double carried = demand * std::max(0.0, alloc.x[t]) * scale;
      total += carried;
      if (inst.tunnels[t].path.size() == 1) direct += carried;
    }
  }
  return total > 0.0 ? direct / total : 0.0;
}

std::vector<AblationRow> run_ablation(const Instance& inst,
                                      const ScenarioSet& set,
                                      const RiskSpec& spec,
                                      const std::vector<Variant>& variants,
                                      const TrainConfig& tc, int unroll_k,
                                      int items, double sigma) {
  Dataset data;
  data.train = perturbed_items(inst, set, items, sigma, tc.seed, "ab_train");
  data.val = perturbed_items(inst, set, std::max(1, items / 4), sigma,
                             tc.seed + 100000, "ab_val");

  std::vector<AblationRow> rows;
  for (Variant variant : variants) {
    RolloutConfig rc;
    rc.K = unroll_k;
    rc.spec = spec;
    rc.variant = variant;
    PolicyParams init = init_params(tc.seed, variant_input_dim(variant), 64,
                                    variant_output_dim(variant));
    TrainResult trained = train(init, data, tc, rc);
    RolloutResult final = unroll(trained.params, inst, set, rc);
    AblationRow row;
    row.variant = variant;
    row.final_objective = final.objective;
    row.direct = direct_ratio(inst, final.alloc);
    row.best_epoch = trained.best_epoch;
    rows.push_back(row);
  }
  return rows;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write CSV file: " + path);
  out << header << "\n";
  for (const std::string& row : rows) out << row << "\n";
}

std::vector<ReportRow> collect_reports(const std::string& dir) {
  std::vector<ReportRow> rows;
  if (!fs::is_directory(dir)) return rows;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::string name = entry.path().filename().string();
    if (name.rfind("eval_", 0) == 0 && name.size() > 5 &&
        name.substr(name.size() - 5) == ".json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    json j;
    in >> j;
    ReportRow row;
    row.topology = j.value("topology", "");
    row.objective = j.value("objective", "");
    row.beta = j.value("beta", 0.0);
    row.k_deploy = j.value("k_deploy", 0);
    row.j = j.value("J", 0.0);
    if (j.contains("Jstar") && !j["Jstar"].is_null())
      row.jstar = j["Jstar"].get<double>();
    row.rel_err = j.value("rel_err", 0.0);
    row.wall_ms = j.value("wall_ms", 0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows,
                      const std::string& path) {
  std::vector<std::string> lines;
  for (const ReportRow& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%d,%.12g,%s,%.12g,%.6g",
                  r.topology.c_str(), r.objective.c_str(), r.beta, r.k_deploy,
                  r.j, r.jstar ? std::to_string(*r.jstar).c_str() : "",
                  r.rel_err, r.wall_ms);
    lines.push_back(buf);
  }
  write_csv(path, "topology,objective,beta,K1,J,Jstar,rel_err,wall_ms", lines);
}

}  // namespace riskte
