#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ctxml/error.hpp"
#include "ctxml/evaluation.hpp"
#include "ctxml/io.hpp"
#include "oracles.hpp"

using namespace ctxml;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ctxml_test_eval_" + name);
  fs::remove_all(p);
  return p;
}

TrainTrace fake_trace(std::uint64_t seed, double final_kl) {
  TrainTrace t;
  t.seed = seed;
  t.rows.push_back({0, 10.0, 0.5});
  t.rows.push_back({1, 9.0, std::nullopt});
  t.rows.push_back({2, 8.5, final_kl});
  return t;
}

}  // namespace

TEST_CASE("kl_binary") {
  CHECK(kl_binary({0.3, 0.7}, {0.3, 0.7}) == 0.0);
  CHECK(kl_binary({1, 0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK(kl_binary({1, 0}, {1e-12, 1 - 1e-12}) == doctest::Approx(-std::log(1e-12)));
  CHECK(kl_binary({1, 0}, {0.0, 1.0}) == doctest::Approx(-std::log(1e-12)));
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const double p = rng.uniform01(), q = rng.uniform(0.001, 0.999);
    const double v = kl_binary({p, 1 - p}, {q, 1 - q});
    CHECK(v >= 0.0);
    CHECK(v == doctest::Approx(oracle::bernoulli_kl(p, q)).epsilon(1e-10));
  }
}

TEST_CASE("average_kl of the oracle is zero") {
  const auto test = make_test_set(200, 3);
  const auto r = average_kl([](const Strategy& x, const FeatureMatrix&) { return oracle_marginals(x); }, test);
  CHECK(r.avg_kl == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.n_test == 200);
  CHECK(r.test_seed == 3);
}

TEST_CASE("average_kl of the uniform model by brute force") {
  const auto test = make_test_set(500, 4);
  const Model uniform = Model::create(ModelKind::Surrogate, 1, 0);
  const auto r = average_kl(uniform, test);
  Rng rng(4);
  double expected = 0.0;
  std::array<double, 3> per{};
  for (int i = 0; i < 500; ++i) {
    const auto m = oracle_marginals(sample_strategy(rng));
    for (int k = 0; k < 3; ++k) {
      const double v = oracle::bernoulli_kl(m[k], 0.5);
      per[k] += v / 500;
      expected += v / 1500;
    }
  }
  CHECK(r.avg_kl > 0.0);
  CHECK(r.avg_kl == doctest::Approx(expected).epsilon(1e-12));
  for (int k = 0; k < 3; ++k) CHECK(r.per_task_kl[k] == doctest::Approx(per[k]).epsilon(1e-12));
  CHECK(r.avg_kl == doctest::Approx((r.per_task_kl[0] + r.per_task_kl[1] + r.per_task_kl[2]) / 3));
}

TEST_CASE("average_kl is order invariant and repeatable") {
  auto test = make_test_set(300, 5);
  Model m = Model::create(ModelKind::BiasedQuantum, 1, 1);
  Rng rng(6);
  for (double& v : m.params()) v = rng.uniform(0, 6.28);
  const auto a = average_kl(m, test);
  const auto b = average_kl(m, make_test_set(300, 5));
  CHECK(a.avg_kl == b.avg_kl);
  std::reverse(test.strategies.begin(), test.strategies.end());
  std::reverse(test.features.begin(), test.features.end());
  std::reverse(test.oracle.begin(), test.oracle.end());
  CHECK(average_kl(m, test).avg_kl == doctest::Approx(a.avg_kl).epsilon(1e-12));
  Rng r1(5);
  CHECK(average_kl(m, 300, r1).avg_kl == a.avg_kl);
  CHECK_THROWS_AS(make_test_set(0, 1), DomainError);
}

TEST_CASE("emit_report writes one csv per trace and a summary") {
  const auto dir = scratch("report");
  ModelRunReport run;
  run.label = "biased-quantum";
  run.kind = ModelKind::BiasedQuantum;
  run.layers = 2;
  run.blocks = 2;
  run.test_seed = 17;
  for (std::uint64_t s = 0; s < 20; ++s) run.traces.push_back(fake_trace(s, 0.01 * (s + 1)));
  ModelRunReport sur = run;
  sur.label = "surrogate-L1";
  sur.kind = ModelKind::Surrogate;
  sur.layers = 1;
  sur.blocks = 0;
  sur.traces = {fake_trace(0, 0.001)};
  const std::vector<ModelRunReport> runs{run, sur};
  emit_report(runs, dir);

  std::size_t csvs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir)) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 21);

  // Recompute the mean from the csv files.
  double mean = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    std::ifstream in(dir / "biased-quantum" / ("seed_" + std::to_string(s) + ".csv"));
    std::string line, last;
    std::getline(in, line);
    CHECK(line == "epoch,nll,avg_kl");
    while (std::getline(in, line)) last = line;
    mean += std::stod(last.substr(last.rfind(',') + 1)) / 20;
  }
  const auto summary = nlohmann::json::parse(read_text_file(dir / "summary.json"));
  const auto& e0 = summary["entries"][0];
  CHECK(e0["model_kind"] == "biased-quantum");
  CHECK(e0["n_seeds"] == 20);
  CHECK(e0["test_seed"] == 17);
  CHECK(std::abs(e0["final_avg_kl_mean"].get<double>() - mean) <= 1e-12);
  CHECK(e0["final_avg_kl_min"].get<double>() == 0.01);
  CHECK(e0["final_avg_kl_max"].get<double>() == doctest::Approx(0.2));
  CHECK(summary["ordering_by_final_avg_kl"][0] == "surrogate-L1");
  fs::remove_all(dir);
}

TEST_CASE("emit_report errors") {
  CHECK_THROWS_AS(emit_report(std::vector<ModelRunReport>{}, scratch("empty")), DomainError);
  ModelRunReport run;
  run.label = "x";
  CHECK_THROWS_AS(emit_report(std::vector<ModelRunReport>{run}, scratch("notrace")), DomainError);
  run.traces = {fake_trace(0, 0.1)};
  const auto blocker = scratch("blocker");
  write_text_file(blocker, "not a directory\n");
  CHECK_THROWS_AS(emit_report(std::vector<ModelRunReport>{run}, blocker / "out"), IoError);
  fs::remove_all(blocker);
}

TEST_CASE("trace csv leaves missing avg_kl empty") {
  CHECK(trace_to_csv(fake_trace(0, 0.25)) == "epoch,nll,avg_kl\n0,10,0.5\n1,9,\n2,8.5,0.25\n");
}
