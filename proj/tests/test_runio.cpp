#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "riskte/runio.hpp"
#include "test_helpers.hpp"

using namespace riskte;
namespace fs = std::filesystem;

TEST_CASE("gravity demands: equal weights are uniform, total scales linearly") {
  Network net = make_complete_graph(4, 10.0);
  std::vector<double> equal(4, 1.0);
  auto flows = gravity_demands(net, 24.0, equal);
  REQUIRE(flows.size() == 12);
  for (const Flow& f : flows) CHECK(f.demand == doctest::Approx(2.0));

  auto doubled = gravity_demands(net, 48.0, equal);
  for (std::size_t i = 0; i < flows.size(); ++i)
    CHECK(doubled[i].demand == doctest::Approx(2.0 * flows[i].demand));

  // default weights (degree) on a complete graph are equal too
  auto by_degree = gravity_demands(net, 24.0);
  for (const Flow& f : by_degree) CHECK(f.demand == doctest::Approx(2.0));
}

TEST_CASE("fnv digest is stable and content-sensitive") {
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") != fnv1a("b"));
  CHECK(hex64(fnv1a("riskte")).size() == 16);
}

TEST_CASE("manifest lands in the output directory") {
  std::string dir = "/tmp/riskte_manifest_test";
  fs::remove_all(dir);
  RunManifest man;
  man.command_line = "riskte gen --seed 1";
  man.config_json = R"({"seed": 1})";
  man.seeds = {1};
  write_manifest(man, dir);
  CHECK(fs::exists(fs::path(dir) / "manifest.json"));
  std::ifstream in(fs::path(dir) / "manifest.json");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("config_hash") != std::string::npos);
}

TEST_CASE("dataset save/load round-trip") {
  Instance inst = riskte_test::tri3();
  ScenarioSet set = riskte_test::tri3_scenarios(inst);
  std::string dir = "/tmp/riskte_dataset_test";
  fs::remove_all(dir);
  save_dataset_split(perturbed_items(inst, set, 3, 0.1, 5, "item"),
                     dir + "/train");
  save_dataset_split(perturbed_items(inst, set, 2, 0.1, 6, "item"),
                     dir + "/val");
  Dataset data = load_dataset(dir);
  CHECK(data.train.size() == 3);
  CHECK(data.val.size() == 2);
  CHECK(data.train[0].scenarios.size() == set.size());
  // perturbed copies differ from the base but keep the structure
  CHECK(data.train[0].instance.tunnels.size() == inst.tunnels.size());
}

TEST_CASE("direct ratio splits carried traffic by hop count") {
  Instance inst = riskte_test::tri3();
  Allocation alloc;
  alloc.x = {0.5, 0.5, 1.0};  // t_ac_direct, t_ac_via_b (2-hop), t_bc_direct
  // flow f_ac: 5 direct + 5 via; flow f_bc: 8 direct
  double expect = (5.0 + 8.0) / 18.0;
  CHECK(direct_ratio(inst, alloc) == doctest::Approx(expect).epsilon(1e-12));

  // over-provisioned flows are capped at their demand, pro rata
  Allocation over;
  over.x = {1.0, 1.0, 1.0};  // f_ac sums to 2: carried 5 + 5
  CHECK(direct_ratio(inst, over) == doctest::Approx((5.0 + 8.0) / 18.0));
}

TEST_CASE("report rows aggregate eval outputs") {
  std::string dir = "/tmp/riskte_report_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "eval_a.json");
    out << R"({"topology": "tri3", "objective": "cvar", "beta": 0.9,
               "k_deploy": 3, "J": 0.125, "Jstar": 0.120,
               "rel_err": 0.0417, "wall_ms": 4.2})";
  }
  auto rows = collect_reports(dir);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].topology == "tri3");
  CHECK(rows[0].jstar.has_value());
  std::string csv = dir + "/report.csv";
  write_report_csv(rows, csv);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "topology,objective,beta,K1,J,Jstar,rel_err,wall_ms");

  // empty input dir still yields a header-only CSV
  auto none = collect_reports(dir + "/missing");
  CHECK(none.empty());
}
