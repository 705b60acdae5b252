#include "doctest.h"

#include <cmath>

#include "ctxml/contextuality.hpp"
#include "ctxml/error.hpp"
#include "ctxml/game.hpp"

using namespace ctxml;

namespace {

const Behaviour kCentre{{0.5, 0.5, 0.5}};

// Max violation of the NC equalities by a witness, recomputed here.
double witness_error(const NcFeasibility& r, const BiasHexagon& targets) {
  const auto verts = response_vertices();
  double err = 0.0;
  for (int j = 0; j < 6; ++j) {
    double mass = 0.0;
    for (int i = 0; i < 6; ++i) {
      err = std::max(err, -r.nu[j][i]);
      mass += r.nu[j][i];
    }
    err = std::max(err, std::abs(mass - 1.0));
    for (int k = 0; k < 3; ++k) {
      double v = 0.0;
      for (int i = 0; i < 6; ++i) v += r.nu[j][i] * verts[i].xi[k];
      err = std::max(err, std::abs(v - targets[j][k]));
    }
  }
  for (int i = 0; i < 6; ++i) {
    const double a = r.nu[0][i] + r.nu[1][i];
    err = std::max(err, std::abs(a - r.nu[2][i] - r.nu[3][i]));
    err = std::max(err, std::abs(a - r.nu[4][i] - r.nu[5][i]));
  }
  return err;
}

}  // namespace

TEST_CASE("bias hexagon vertices") {
  const auto v = bias_hexagon();
  CHECK(v[0] == Behaviour{{1, 0, 0.5}});
  CHECK(v[3] == Behaviour{{0.5, 0, 1}});
  for (const auto& b : v) CHECK(b.sum() == 1.5);
}

TEST_CASE("extremal strategies land on the hexagon in order") {
  const auto v = bias_hexagon();
  const auto a = extremal_action_triples();
  for (int i = 0; i < 6; ++i) CHECK(oracle_marginals(Strategy::deterministic(a[i])) == v[i]);
}

TEST_CASE("shrunken vertices") {
  CHECK(shrunken_vertices(1.0) == bias_hexagon());
  for (const auto& b : shrunken_vertices(0.0)) CHECK(b == kCentre);
  const auto u = shrunken_vertices(2.0 / 3);
  CHECK(u[0][0] == doctest::Approx(5.0 / 6));
  CHECK(u[0][1] == doctest::Approx(1.0 / 6));
  CHECK(u[0][2] == doctest::Approx(0.5));
  CHECK_THROWS_AS(shrunken_vertices(-0.1), DomainError);
  CHECK_THROWS_AS(shrunken_vertices(1.1), DomainError);
  const auto e = shrunken_vertices_exact(Rational(2, 3));
  CHECK(e[0][0] == Rational(5, 6));
  CHECK(e[0][1] == Rational(1, 6));
}

TEST_CASE("check_bias") {
  CHECK(check_bias(kCentre, 1e-9));
  CHECK(check_bias({{1, 0, 0.5}}, 1e-9));
  CHECK_FALSE(check_bias({{1, 0, 0}}, 1e-9));
}

TEST_CASE("hull_contains") {
  const auto v = bias_hexagon();
  CHECK(hull_contains(v, kCentre));
  const auto u = shrunken_vertices(0.5);
  CHECK_FALSE(hull_contains(u, v[0]));
  CHECK(hull_contains(std::vector<Behaviour>{kCentre}, kCentre));
  CHECK(hull_contains(v, shrunken_vertices(0.9)[2]));
  CHECK_THROWS_AS(hull_contains(std::vector<Behaviour>{{{1, 0, 0}}}, kCentre), DomainError);
}

TEST_CASE("response vertices") {
  const auto r = response_vertices();
  const auto v = bias_hexagon();
  for (int i = 0; i < 6; ++i) {
    CHECK(r[i].plus_part() == v[i]);
    CHECK(r[i].xi[6] == 1.0);
    CHECK(r[i].xi[7] == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(r[i].xi[k] + r[i].xi[k + 3] == 1.0);
    CHECK(r[i].xi[0] + r[i].xi[1] + r[i].xi[2] == 1.5);
  }
}

TEST_CASE("nc_feasible threshold sweep") {
  for (int t = 0; t <= 66; t += 6) {
    const double eta = t / 100.0;
    const auto targets = shrunken_vertices(eta);
    const auto r = nc_feasible(targets);
    CHECK_MESSAGE(r.feasible, "eta " << eta);
    CHECK(witness_error(r, targets) <= 1e-9);
    CHECK(r.residual <= 1e-9);
  }
  for (double eta : {0.6666, 0.66659}) CHECK(nc_feasible(shrunken_vertices(eta)).feasible);
  for (double eta : {0.6667, 0.67, 0.7, 0.8, 0.9, 1.0}) {
    CHECK_FALSE_MESSAGE(nc_feasible(shrunken_vertices(eta)).feasible, "eta " << eta);
  }
}

TEST_CASE("nc_feasible centre witness") {
  const auto r = nc_feasible(shrunken_vertices(0.0));
  REQUIRE(r.feasible);
  CHECK(witness_error(r, shrunken_vertices(0.0)) <= 1e-9);
  // The uniform weights are one witness; check it satisfies the system too.
  NcFeasibility uniform;
  for (auto& row : uniform.nu) row.fill(1.0 / 6);
  CHECK(witness_error(uniform, shrunken_vertices(0.0)) <= 1e-12);
}

TEST_CASE("nc_feasible rejects bias violations") {
  auto t = shrunken_vertices(0.3);
  t[2] = {{1, 0, 0}};
  CHECK_THROWS_AS(nc_feasible(t), DomainError);
}

TEST_CASE("exact feasibility at the boundary") {
  CHECK(nc_feasible_exact(shrunken_vertices_exact(Rational(2, 3))).feasible);
  CHECK_FALSE(nc_feasible_exact(shrunken_vertices_exact(Rational(2, 3) + Rational(1, 1000000))).feasible);
  CHECK_FALSE(nc_feasible_exact(shrunken_vertices_exact(Rational(1))).feasible);
  const auto r = nc_feasible_exact(shrunken_vertices_exact(Rational(1, 2)));
  REQUIRE(r.feasible);
  const auto targets = shrunken_vertices_exact(Rational(1, 2));
  const auto verts = response_vertices();
  for (int j = 0; j < 6; ++j) {
    Rational mass = 0;
    for (int i = 0; i < 6; ++i) {
      CHECK(r.nu[j][i] >= 0);
      mass += r.nu[j][i];
    }
    CHECK(mass == 1);
    for (int k = 0; k < 3; ++k) {
      Rational v = 0;
      for (int i = 0; i < 6; ++i) v += r.nu[j][i] * Rational(verts[i].xi[k]);
      CHECK(v == targets[j][k]);
    }
  }
}

TEST_CASE("inequality value") {
  for (int t = 0; t <= 100; ++t) {
    const double eta = t / 100.0;
    const auto u = shrunken_vertices(eta);
    CHECK(std::abs(inequality_value(u[0], u[2], u[4]) - 1.5 * (eta + 1)) <= 1e-12);
  }
  const auto v = bias_hexagon();
  CHECK(inequality_value(v[0], v[2], v[4]) == 3.0);
  const auto b = shrunken_vertices_exact(Rational(2, 3));
  CHECK(b[0][0] + b[2][1] + b[4][2] == Rational(5, 2));
  CHECK(inequality_value(kCentre, kCentre, kCentre) == 1.5);
}

TEST_CASE("certify") {
  const auto v = bias_hexagon();
  auto c = certify(v);
  CHECK(c.eta_star == 1.0);
  CHECK(c.verdict == Verdict::Contextual);
  CHECK(c.inequality_value == doctest::Approx(3.0));

  c = certify(std::vector<Behaviour>{kCentre});
  CHECK(c.eta_star == 0.0);
  CHECK(c.verdict == Verdict::NotCertified);

  c = certify(shrunken_vertices(0.6));
  CHECK(c.eta_star == doctest::Approx(0.6).epsilon(1e-5));
  CHECK(c.verdict == Verdict::NotCertified);

  c = certify(shrunken_vertices(0.8));
  CHECK(c.eta_star == doctest::Approx(0.8).epsilon(1e-5));
  CHECK(c.verdict == Verdict::Contextual);
  CHECK(c.inequality_value > kNoncontextualBound);

  c = certify(shrunken_vertices(2.0 / 3));
  CHECK(c.verdict == Verdict::NotCertified);

  CHECK_THROWS_AS(certify(std::vector<Behaviour>{}), DomainError);
}

TEST_CASE("certify is monotone in the behaviour set") {
  std::vector<Behaviour> set{kCentre};
  double last = certify(set).eta_star;
  for (double eta : {0.2, 0.5, 0.3, 0.9}) {
    for (const auto& b : shrunken_vertices(eta)) set.push_back(b);
    const double now = certify(set).eta_star;
    CHECK(now >= last - 1e-12);
    last = now;
  }
}

TEST_CASE("coarse-grained oracle behaviours satisfy the bias") {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) CHECK(check_bias(oracle_distribution(sample_strategy(rng)).marginals(), 1e-9));
}

TEST_CASE("joint equivalence counterexample") {
  const auto v = bias_hexagon();
  std::array<JointLabelDistribution, 6> joints;
  for (int i = 0; i < 6; ++i) joints[i] = JointLabelDistribution::product(v[i]);
  const auto r = joint_equivalence_check(joints);
  CHECK(r.marginals_equal);
  CHECK_FALSE(r.joints_equal);
  auto mix = [&](std::size_t i) { return 0.5 * (joints[0].probs[i] + joints[1].probs[i]); };
  CHECK(mix(JointLabelDistribution::index_of(-1, -1, 1)) == 0.0);
  CHECK(mix(JointLabelDistribution::index_of(1, 1, 1)) == 0.0);
  CHECK(mix(JointLabelDistribution::index_of(1, -1, 1)) == 0.25);
  CHECK(mix(JointLabelDistribution::index_of(-1, 1, -1)) == 0.25);
  std::array<JointLabelDistribution, 6> same;
  same.fill(joints[0]);
  const auto s = joint_equivalence_check(same);
  CHECK(s.marginals_equal);
  CHECK(s.joints_equal);

  joints[3].probs[0] = -0.1;
  CHECK_THROWS_AS(joint_equivalence_check(joints), DomainError);
}

TEST_CASE("generalized bias residual") {
  CHECK(generalized_bias_residual({{0.5, 0, 0.5}, {0.5, 0, 0.5}, {0.5, 0, 0.5}}, 1) == 0.0);
  CHECK(generalized_bias_residual({{0, 0, 1}, {0, 0, 1}, {0, 0, 1}}, 1) == 3.0);
  CHECK(generalized_bias_residual({{0, 0, 1, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 1, 0, 0}}, 2) == 0.0);
  CHECK_THROWS_AS(generalized_bias_residual({{0.5, 0.5}}, 1), DomainError);
  CHECK_THROWS_AS(generalized_bias_residual({{0.5, 0, 0.5}, {0.7, 0, 0.5}}, 1), DomainError);
  CHECK_THROWS_AS(generalized_bias_residual({{0.5, 0, 0.5}, {0.5, 0, 0.5}}, 0), DomainError);
}
