#include "riskte/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "riskte/rng.hpp"
#include "json.hpp"

namespace riskte {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

}  // namespace

void ScenarioSet::canonicalize() {
  for (Scenario& s : scenarios) {
    std::sort(s.failed.begin(), s.failed.end());
    s.failed.erase(std::unique(s.failed.begin(), s.failed.end()), s.failed.end());
    if (!(s.prob > 0.0)) fail("scenario probability must be positive");
  }
  std::sort(scenarios.begin(), scenarios.end(),
            [](const Scenario& a, const Scenario& b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.failed < b.failed;
            });
  nominal = -1;
  std::set<std::vector<int>> seen;
  for (int i = 0; i < static_cast<int>(scenarios.size()); ++i) {
    if (!seen.insert(scenarios[i].failed).second)
      fail("duplicate failure set in scenario list");
    scenarios[i].id = i;
    if (scenarios[i].failed.empty()) nominal = i;
  }
  if (nominal < 0) fail("scenario set is missing the nominal (no-failure) scenario");

  double total = 0.0;
  for (const Scenario& s : scenarios) total += s.prob;
  if (!(total > 0.0)) fail("scenario probabilities sum to zero");
  for (Scenario& s : scenarios) s.prob /= total;
}

std::vector<double> sample_link_probs(const Network& net,
                                      const FailureModel& model) {
  if (!(model.scale() > 0.0) || !(model.shape > 0.0))
    fail("failure model requires positive Weibull scale and shape");
  Rng rng(model.seed);
  std::vector<double> probs(net.edges.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    probs[i] = rng.weibull_truncated(model.scale(), model.shape);
  return probs;
}

ScenarioSet enumerate_scenarios(const std::vector<double>& edge_probs,
                                double cutoff, int max_failures,
                                std::size_t hard_cap) {
  if (!(cutoff > 0.0)) fail("cutoff must be positive");
  if (max_failures < 0) fail("max_failures must be >= 0");

  constexpr double kEps = 1e-15;
  const int n = static_cast<int>(edge_probs.size());
  std::vector<double> p(edge_probs);
  for (double& v : p) v = std::min(std::max(v, kEps), 1.0 - kEps);

  double nominal_prob = 1.0;
  for (double v : p) nominal_prob *= 1.0 - v;
  std::vector<double> odds(n);
  double max_odds = 0.0;
  for (int i = 0; i < n; ++i) {
    odds[i] = p[i] / (1.0 - p[i]);
    max_odds = std::max(max_odds, odds[i]);
  }

  ScenarioSet set;
  Scenario nominal;
  nominal.raw_prob = nominal_prob;
  nominal.prob = nominal_prob;
  set.scenarios.push_back(nominal);

  // DFS over edge indices. A partial subset with probability `prob` can only
  // reach prob * max_odds^(remaining slots), which gives an exact prune.
  std::vector<int> stack;
  auto emit = [&](double prob) {
    if (set.scenarios.size() >= hard_cap)
      fail("scenario count exceeds the hard cap (" + std::to_string(hard_cap) +
           "); increase the pruning cutoff");
    Scenario s;
    s.failed = stack;
    s.raw_prob = prob;
    s.prob = prob;
    set.scenarios.push_back(std::move(s));
  };
  auto dfs = [&](auto&& self, int start, double prob) -> void {
    if (static_cast<int>(stack.size()) >= max_failures) return;
    for (int i = start; i < n; ++i) {
      double next = prob * odds[i];
      int slots_left = max_failures - static_cast<int>(stack.size()) - 1;
      double bound = next * std::pow(std::max(max_odds, 1.0), slots_left);
      if (bound < cutoff) continue;  // no superset of stack+{i} can reach the cutoff
      stack.push_back(i);
      if (next >= cutoff) emit(next);
      self(self, i + 1, next);
      stack.pop_back();
    }
  };
  dfs(dfs, 0, nominal_prob);

  set.canonicalize();
  return set;
}

ScenarioSet generate_scenarios(const Network& net, const FailureModel& model,
                               std::size_t hard_cap) {
  std::vector<double> probs = sample_link_probs(net, model);
  return enumerate_scenarios(probs, model.cutoff(), model.max_failures, hard_cap);
}

void build_survival(const Instance& inst, ScenarioSet& set) {
  const int T = static_cast<int>(inst.tunnels.size());
  const int N = set.size();
  set.num_tunnels = T;
  set.alpha.assign(static_cast<std::size_t>(T) * N, 1);
  std::vector<char> failed(inst.net.edges.size(), 0);
  for (int q = 0; q < N; ++q) {
    for (int ei : set.scenarios[q].failed) {
      if (ei < 0 || ei >= static_cast<int>(inst.net.edges.size()))
        fail("scenario references an unknown edge");
      failed[ei] = 1;
    }
    for (int t = 0; t < T; ++t) {
      for (int ei : inst.tunnels[t].path) {
        if (failed[ei]) {
          set.alpha[static_cast<std::size_t>(t) * N + q] = 0;
          break;
        }
      }
    }
    for (int ei : set.scenarios[q].failed) failed[ei] = 0;
  }
}

std::vector<Flow> perturb_demands(const std::vector<Flow>& flows, double sigma,
                                  std::uint64_t seed) {
  if (sigma < 0.0) fail("demand noise sigma must be >= 0");
  std::vector<Flow> out = flows;
  std::sort(out.begin(), out.end(),
            [](const Flow& a, const Flow& b) { return a.id < b.id; });
  Rng rng(seed);
  for (Flow& f : out) {
    double eta = rng.gaussian() * sigma * f.demand;
    f.demand = std::max(0.0, f.demand + eta);
  }
  return out;
}

ScenarioSet parse_scenarios(const std::string& json_text, const Instance& inst) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("scenario parse error: ") + e.what());
  }
  ScenarioSet set;
  for (const auto& js : j.at("scenarios")) {
    Scenario s;
    s.id = js.value("id", static_cast<int>(set.scenarios.size()));
    for (const auto& je : js.at("failed_edges"))
      s.failed.push_back(inst.net.edge(je.get<std::string>()));
    s.prob = js.at("prob").get<double>();
    s.raw_prob = s.prob;
    set.scenarios.push_back(std::move(s));
  }
  set.canonicalize();
  build_survival(inst, set);
  return set;
}

ScenarioSet load_scenarios(const std::string& path, const Instance& inst) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_scenarios(ss.str(), inst);
  } catch (const std::runtime_error& e) {
    fail(path + ": " + e.what());
  }
}

void save_scenarios(const ScenarioSet& set, const Instance& inst,
                    const std::string& path) {
  json j;
  j["scenarios"] = json::array();
  for (const Scenario& s : set.scenarios) {
    json failed = json::array();
    for (int ei : s.failed) failed.push_back(inst.net.edges[ei].id);
    j["scenarios"].push_back(
        {{"id", s.id}, {"failed_edges", failed}, {"prob", s.prob}});
  }
  std::ofstream out(path);
  if (!out) fail("cannot write scenario file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace riskte
