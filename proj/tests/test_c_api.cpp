#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "ctxml/ctxml.h"

namespace fs = std::filesystem;

TEST_CASE("status names and last error") {
  CHECK(std::string(ctxml_status_name(CTXML_OK)) == "ok");
  CHECK(std::string(ctxml_status_name(CTXML_ERR_IO)) == "i/o error");
  ctxml_model* m = nullptr;
  CHECK(ctxml_model_load("/nonexistent/model.json", &m) == CTXML_ERR_IO);
  CHECK(m == nullptr);
  CHECK(std::strlen(ctxml_last_error()) > 0);
  CHECK(ctxml_model_load(nullptr, &m) == CTXML_ERR_DOMAIN);
}

TEST_CASE("oracle marginals through the c api") {
  const double spp[9] = {0, 0, 1, 0, 1, 0, 0, 1, 0};
  double out[3];
  REQUIRE(ctxml_oracle_marginals(spp, out) == CTXML_OK);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.5);
  CHECK(out[2] == 0.0);
  const double bad[9] = {0.5, 0.6, 0, 0, 0, 1, 0, 0, 1};
  CHECK(ctxml_oracle_marginals(bad, out) == CTXML_ERR_DOMAIN);
}

TEST_CASE("certify behaviours") {
  const double vertices[18] = {1, 0, 0.5, 0, 1, 0.5, 0.5, 1, 0, 0.5, 0, 1, 0, 0.5, 1, 1, 0.5, 0};
  ctxml_certificate cert{};
  REQUIRE(ctxml_certify_behaviours(vertices, 6, 1e-6, &cert) == CTXML_OK);
  CHECK(cert.eta_star == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cert.contextual == 1);
  CHECK(cert.n_behaviours == 6);
  const double inside[6] = {0.5, 0.5, 0.5, 0.6, 0.4, 0.5};
  REQUIRE(ctxml_certify_behaviours(inside, 2, 1e-6, &cert) == CTXML_OK);
  CHECK(cert.contextual == 0);
  const double biased[3] = {1, 1, 1};
  CHECK(ctxml_certify_behaviours(biased, 1, 1e-6, &cert) == CTXML_ERR_DOMAIN);
}

TEST_CASE("nc feasibility and measurements") {
  double targets[18];
  for (int i = 0; i < 6; ++i) {
    const double hex[6][3] = {{1, 0, .5}, {0, 1, .5}, {.5, 1, 0}, {.5, 0, 1}, {0, .5, 1}, {1, .5, 0}};
    for (int k = 0; k < 3; ++k) targets[3 * i + k] = 0.5 + 0.6 * (hex[i][k] - 0.5);
  }
  int feasible = -1;
  REQUIRE(ctxml_nc_feasible(targets, &feasible) == CTXML_OK);
  CHECK(feasible == 1);
  for (double& t : targets) t = 0.5 + (t - 0.5) / 0.6 * 0.7;
  REQUIRE(ctxml_nc_feasible(targets, &feasible) == CTXML_OK);
  CHECK(feasible == 0);

  ctxml_measurement_report rep{};
  REQUIRE(ctxml_verify_measurements("trine", 0, &rep) == CTXML_OK);
  CHECK(rep.dim == 2);
  CHECK(rep.max_sum_deviation <= 1e-12);
  REQUIRE(ctxml_verify_measurements("even-dim", 6, &rep) == CTXML_OK);
  CHECK(rep.dim == 6);
  CHECK(rep.max_square_deviation <= 1e-12);
  CHECK(ctxml_verify_measurements("even-dim", 5, &rep) == CTXML_ERR_DOMAIN);
}

TEST_CASE("train, load and evaluate through the c api") {
  const fs::path dir = fs::temp_directory_path() / "ctxml_test_c_api";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto data = (dir / "data.jsonl").string();
  REQUIRE(ctxml_gen_data(40, 9, data.c_str()) == CTXML_OK);
  const auto cfg = (dir / "config.json").string();
  FILE* f = std::fopen(cfg.c_str(), "w");
  REQUIRE(f != nullptr);
  std::fputs("{\"model_kind\": \"biased-quantum\", \"L\": 1, \"B\": 1, \"epochs\": 3, \"seeds\": [5], \"n_test\": 50}\n", f);
  std::fclose(f);
  const auto out = (dir / "run").string();
  REQUIRE(ctxml_train(cfg.c_str(), data.c_str(), out.c_str(), nullptr) == CTXML_OK);
  CHECK(ctxml_train(cfg.c_str(), data.c_str(), out.c_str(), "{\"epochs\": 0}") == CTXML_ERR_CONFIG);

  fs::path model_path;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.path().filename().string().rfind("model_seed_", 0) == 0) model_path = e.path();
  REQUIRE(!model_path.empty());

  ctxml_model* m = nullptr;
  REQUIRE(ctxml_model_load(model_path.string().c_str(), &m) == CTXML_OK);
  size_t count = 0;
  REQUIRE(ctxml_model_param_count(m, &count) == CTXML_OK);
  CHECK(count == 10);
  char kind[32];
  REQUIRE(ctxml_model_kind(m, kind, sizeof kind) == CTXML_OK);
  CHECK(std::string(kind) == "biased-quantum");
  char tiny[4];
  REQUIRE(ctxml_model_kind(m, tiny, sizeof tiny) == CTXML_OK);
  CHECK(std::string(tiny) == "bia");
  const double x[9] = {0.2, 0.3, 0.5, 0.1, 0.1, 0.8, 0.6, 0.2, 0.2};
  double b[3];
  REQUIRE(ctxml_model_behaviour(m, x, b) == CTXML_OK);
  for (double v : b) CHECK((v >= 0 && v <= 1));
  CHECK(b[0] + b[1] + b[2] == doctest::Approx(1.5).epsilon(1e-9));
  ctxml_model_free(m);

  ctxml_eval_report rep{};
  REQUIRE(ctxml_eval(model_path.string().c_str(), 100, 3, nullptr, &rep) == CTXML_OK);
  CHECK(rep.n_test == 100);
  CHECK(rep.avg_kl >= 0);
  CHECK(rep.avg_kl == doctest::Approx((rep.per_task_kl[0] + rep.per_task_kl[1] + rep.per_task_kl[2]) / 3));

  ctxml_certificate cert{};
  REQUIRE(ctxml_certify_model(model_path.string().c_str(), 1, &cert) == CTXML_OK);
  CHECK(cert.n_behaviours == 206);
  const auto cert_path = (dir / "cert.json").string();
  CHECK(ctxml_certificate_write(&cert, cert_path.c_str()) == CTXML_OK);
  CHECK(fs::exists(cert_path));
  fs::remove_all(dir);
}
