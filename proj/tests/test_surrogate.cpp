#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ctxml/error.hpp"
#include "ctxml/game.hpp"
#include "ctxml/quantum.hpp"
#include "ctxml/surrogate.hpp"
#include "oracles.hpp"

using namespace ctxml;

namespace {

constexpr double kPi = std::numbers::pi;

FeatureMatrix random_features(Rng& rng) {
  FeatureMatrix f;
  for (double& v : f.x) v = rng.uniform(-kPi / 2, kPi / 2);
  return f;
}

// Direct evaluation of the Fourier sum by looping over frequencies.
double direct_sum(const SurrogateParams& p, int task, const FeatureMatrix& f) {
  const FrequencyLattice lat(p.degree);
  const auto z = feature_map(f);
  double g = 0.0;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto w = lat.frequency(i);
    double dot = 0.0;
    for (int j = 0; j < 6; ++j) dot += w[j] * z[j];
    g += p.alpha(task)[i] * std::cos(dot) + p.beta(task)[i] * std::sin(dot);
  }
  return g;
}

}  // namespace

TEST_CASE("frequency lattice") {
  for (int L : {1, 2, 3}) {
    const FrequencyLattice lat(L);
    CHECK(lat.size() == static_cast<std::size_t>(std::pow(2 * L + 1, 6)));
    for (std::size_t i = 0; i < lat.size(); i += 37) CHECK(lat.index_of(lat.frequency(i)) == i);
  }
  const FrequencyLattice one(1);
  CHECK(one.frequency(0) == std::array<int, 6>{-1, -1, -1, -1, -1, -1});
  CHECK(one.frequency(1) == std::array<int, 6>{-1, -1, -1, -1, -1, 0});
  CHECK(one.frequency(364) == std::array<int, 6>{0, 0, 0, 0, 0, 0});
  CHECK_THROWS_AS(FrequencyLattice(0), DomainError);
  CHECK_THROWS_AS(FrequencyLattice(5), DomainError);
  CHECK(SurrogateParams::per_task(1) == 1458);
  CHECK(SurrogateParams::per_task(2) == 31250);
}

TEST_CASE("feature map") {
  CHECK(feature_map(FeatureMatrix{}) == std::array<double, 6>{});
  const auto z = feature_map(encode_features(Strategy::uniform()));
  for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(kPi / 6));
  for (int i = 3; i < 6; ++i) CHECK(z[i] == doctest::Approx(0.0));
  FeatureMatrix f;
  f[3] = f[4] = f[5] = kPi / 2;
  const auto w = feature_map(f);
  for (int i = 3; i < 6; ++i) CHECK(w[i] == doctest::Approx(kPi * kPi / 4));
}

TEST_CASE("evaluate") {
  Rng rng(1);
  const FeatureMatrix f = random_features(rng);
  auto p = SurrogateParams::zeros(1);
  CHECK(evaluate(p, 0, f) == 0.0);
  const FrequencyLattice lat(1);
  p.alpha(1)[lat.index_of({0, 0, 0, 0, 0, 0})] = 0.3;
  CHECK(evaluate(p, 1, f) == doctest::Approx(0.3));
  p = SurrogateParams::zeros(1);
  const std::array<int, 6> w{1, 0, -1, 0, 1, 1};
  const std::array<int, 6> mw{-1, 0, 1, 0, -1, -1};
  p.alpha(2)[lat.index_of(w)] = 0.5;
  p.alpha(2)[lat.index_of(mw)] = 0.5;
  const auto z = feature_map(f);
  double dot = 0.0;
  for (int j = 0; j < 6; ++j) dot += w[j] * z[j];
  CHECK(evaluate(p, 2, f) == doctest::Approx(std::cos(dot)));

  const auto q = init_params(rng, 1);
  for (int k = 0; k < 3; ++k) CHECK(evaluate(q, k, f) == doctest::Approx(direct_sum(q, k, f)).epsilon(1e-12));
}

TEST_CASE("evaluate is linear in the coefficients") {
  Rng rng(2);
  const auto p1 = init_params(rng, 1);
  const auto p2 = init_params(rng, 1);
  const double a = 0.75, b = -2.5;
  SurrogateParams mix = SurrogateParams::zeros(1);
  for (std::size_t i = 0; i < mix.coefficients.size(); ++i) {
    mix.coefficients[i] = a * p1.coefficients[i] + b * p2.coefficients[i];
  }
  const auto f = random_features(rng);
  for (int k = 0; k < 3; ++k) {
    CHECK(evaluate(mix, k, f) == doctest::Approx(a * evaluate(p1, k, f) + b * evaluate(p2, k, f)).epsilon(1e-12));
  }
}

TEST_CASE("hard tanh") {
  CHECK(hard_tanh(0.0) == 0.0);
  CHECK(hard_tanh(2.0) == 1.0);
  CHECK(hard_tanh(-1.0) == -1.0);
  CHECK(hard_tanh(-3.0) == -1.0);
  CHECK(hard_tanh(0.25) == 0.25);
}

TEST_CASE("task probabilities") {
  Rng rng(3);
  const auto f = random_features(rng);
  CHECK(task_probabilities(SurrogateParams::zeros(1), f) == Behaviour{{0.5, 0.5, 0.5}});
  auto p = SurrogateParams::zeros(1);
  p.alpha(0)[FrequencyLattice(1).index_of({})] = 4.0;
  CHECK(task_probabilities(p, f)[0] == 1.0);
  bool off_plane = false;
  for (int t = 0; t < 20; ++t) {
    auto q = init_params(rng, 1);
    for (double& c : q.coefficients) c *= 500;
    const auto b = task_probabilities(q, random_features(rng));
    for (int k = 0; k < 3; ++k) CHECK((b[k] >= 0.0 && b[k] <= 1.0));
    off_plane = off_plane || std::abs(b.sum() - 1.5) > 1e-3;
  }
  CHECK(off_plane);
}

TEST_CASE("gradient") {
  Rng rng(4);
  const auto f = random_features(rng);
  const FrequencyLattice lat(1);
  const std::size_t origin = lat.index_of({});
  auto g = gradient(SurrogateParams::zeros(1), 0, f, 1);
  CHECK(g[origin] == doctest::Approx(1.0));
  CHECK(g[lat.size() + origin] == 0.0);

  auto sat = SurrogateParams::zeros(1);
  sat.alpha(0)[origin] = 1.5;
  for (double v : gradient(sat, 0, f, 1)) CHECK(v == 0.0);

  auto p = init_params(rng, 1);
  for (double& c : p.coefficients) c *= 20;
  for (int label : {1, -1}) {
    const int task = 1;
    const double gval = evaluate(p, task, f);
    REQUIRE(std::abs(gval) < 0.9);
    g = gradient(p, task, f, label);
    const auto coeffs = std::vector<double>(p.task(task).begin(), p.task(task).end());
    for (std::size_t j = 0; j < coeffs.size(); j += 97) {
      auto q = p;
      const double h = 1e-6;
      q.task(task)[j] = coeffs[j] + h;
      const double up = std::log(0.5 * (1 + label * hard_tanh(evaluate(q, task, f))));
      q.task(task)[j] = coeffs[j] - h;
      const double down = std::log(0.5 * (1 + label * hard_tanh(evaluate(q, task, f))));
      CHECK(g[j] == doctest::Approx((up - down) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    // beta at omega = 0 never moves.
    CHECK(g[lat.size() + origin] == 0.0);
  }
  CHECK_THROWS_AS(gradient(p, 0, f, 0), DomainError);
}

TEST_CASE("init params") {
  Rng a(5), b(5);
  const auto p = init_params(a, 1);
  CHECK(p.coefficients.size() == 3 * 1458);
  for (double c : p.coefficients) CHECK(std::abs(c) <= 1.0 / 1458);
  CHECK(p.coefficients == init_params(b, 1).coefficients);
  CHECK(init_params(a, 2).coefficients.size() == 3 * 31250);
}

TEST_CASE("surrogate reproduces a biased quantum model along one coordinate") {
  Rng rng(6);
  const auto m = build_biased_ansatz(1, 2);
  std::vector<double> params(m.circuit.params());
  for (double& v : params) v = rng.uniform(0, 2 * kPi);
  const FrequencyLattice lat(1);
  for (int coord = 0; coord < 3; ++coord) {
    SurrogateParams s = SurrogateParams::zeros(1);
    for (int task = 0; task < 3; ++task) {
      auto f_of = [&](double t) {
        FeatureMatrix f;
        f[coord] = t;
        return 2 * task_probabilities(m, f, params)[task] - 1;
      };
      // Least squares on an equispaced grid reduces to the DFT.
      const auto c = oracle::dft(f_of, 16);
      std::array<int, 6> w{};
      s.alpha(task)[lat.index_of(w)] = c[0].real();
      w[coord] = 1;
      s.alpha(task)[lat.index_of(w)] = 2 * c[1].real();
      s.beta(task)[lat.index_of(w)] = -2 * c[1].imag();
      for (int t = 0; t < 50; ++t) {
        const double x = rng.uniform(-kPi / 2, kPi / 2);
        FeatureMatrix f;
        f[coord] = x;
        CHECK(std::abs(evaluate(s, task, f) - f_of(x)) <= 1e-6);
      }
    }
  }
}
