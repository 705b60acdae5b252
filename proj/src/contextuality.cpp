#include "ctxml/contextuality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxml/error.hpp"

namespace ctxml {
namespace {

constexpr double kLpTolerance = 1e-9;

// Builds the 36-variable system. Variable j*6+i is nu_j(i).
template <class Scalar>
EqualityProblem<Scalar> nc_system(const std::array<std::array<Scalar, 3>, 6>& targets,
                                  const std::array<std::array<Scalar, 3>, 6>& xi_plus) {
  EqualityProblem<Scalar> p;
  auto add_row = [&p](std::vector<Scalar> row, Scalar rhs) {
    p.a.push_back(std::move(row));
    p.b.push_back(std::move(rhs));
  };
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<Scalar> row(36, Scalar(0));
      for (std::size_t i = 0; i < 6; ++i) row[j * 6 + i] = xi_plus[i][k];
      add_row(std::move(row), targets[j][k]);
    }
    std::vector<Scalar> norm(36, Scalar(0));
    for (std::size_t i = 0; i < 6; ++i) norm[j * 6 + i] = Scalar(1);
    add_row(std::move(norm), Scalar(1));
  }
  // nu_1(i)+nu_2(i) = nu_3(i)+nu_4(i) and nu_3(i)+nu_4(i) = nu_5(i)+nu_6(i).
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t pair = 0; pair < 2; ++pair) {
      std::vector<Scalar> row(36, Scalar(0));
      const std::size_t a = 2 * pair;
      const std::size_t b = 2 * pair + 2;
      row[a * 6 + i] = Scalar(1);
      row[(a + 1) * 6 + i] = Scalar(1);
      row[b * 6 + i] = Scalar(-1);
      row[(b + 1) * 6 + i] = Scalar(-1);
      add_row(std::move(row), Scalar(0));
    }
  }
  return p;
}

template <class Scalar>
std::array<std::array<Scalar, 3>, 6> hexagon_as() {
  const Scalar one(1), zero(0), half = Scalar(1) / Scalar(2);
  return {{{one, zero, half},
           {zero, one, half},
           {half, one, zero},
           {half, zero, one},
           {zero, half, one},
           {one, half, zero}}};
}

void require_bias(const Behaviour& b, double tol, const char* what) {
  if (!check_bias(b, tol)) {
    throw DomainError(std::string(what) + ": behaviour violates the bias p1+p2+p3=3/2");
  }
}

bool all_shrunken_inside(std::span<const Behaviour> points, double eta, double bias_tol) {
  for (const auto& u : shrunken_vertices(eta)) {
    if (!hull_contains(points, u, bias_tol)) return false;
  }
  return true;
}

}  // namespace

BiasHexagon bias_hexagon() {
  BiasHexagon h;
  const auto v = hexagon_as<double>();
  for (std::size_t i = 0; i < 6; ++i) h[i].p = v[i];
  return h;
}

BiasHexagon shrunken_vertices(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("shrunken_vertices: eta outside [0,1]");
  BiasHexagon u = bias_hexagon();
  for (auto& b : u) {
    for (double& p : b.p) p = eta * p + (1.0 - eta) * 0.5;
  }
  return u;
}

std::array<RationalBehaviour, 6> shrunken_vertices_exact(const Rational& eta) {
  if (eta < 0 || eta > 1) throw DomainError("shrunken_vertices_exact: eta outside [0,1]");
  auto u = hexagon_as<Rational>();
  const Rational half = Rational(1) / 2;
  for (auto& b : u) {
    for (auto& p : b) p = eta * p + (1 - eta) * half;
  }
  return u;
}

bool check_bias(const Behaviour& b, double tol) {
  return std::abs(b.sum() - kBiasSum) <= tol;
}

bool hull_contains(std::span<const Behaviour> points, const Behaviour& target, double bias_tol) {
  for (const auto& p : points) require_bias(p, bias_tol, "hull_contains");
  if (points.empty() || !check_bias(target, bias_tol)) return false;
  // All points live on the bias plane, which (p1, p2) parametrises.
  EqualityProblem<double> prob;
  const std::size_t n = points.size();
  prob.a.assign(3, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    prob.a[0][j] = points[j][0];
    prob.a[1][j] = points[j][1];
    prob.a[2][j] = 1.0;
  }
  prob.b = {target[0], target[1], 1.0};
  return find_feasible_point(prob, ScalarTraits<double>{kLpTolerance}).feasible;
}

std::array<ResponseVertex, 6> response_vertices() {
  // Corners of the (a, b) polygon, walked so that the lifted plus-parts come
  // out in hexagon order.
  const std::array<std::array<double, 2>, 6> corners{
      {{1.0, 0.0}, {0.0, 1.0}, {0.5, 1.0}, {0.5, 0.0}, {0.0, 0.5}, {1.0, 0.5}}};
  std::array<ResponseVertex, 6> out;
  for (std::size_t i = 0; i < 6; ++i) {
    const double a = corners[i][0];
    const double b = corners[i][1];
    const double c = kBiasSum - a - b;
    out[i].xi = {a, b, c, 1.0 - a, 1.0 - b, 1.0 - c, 1.0, 0.0};
  }
  return out;
}

NcFeasibility nc_feasible(const std::array<Behaviour, 6>& targets) {
  for (const auto& t : targets) require_bias(t, 1e-9, "nc_feasible");
  std::array<std::array<double, 3>, 6> tgt{};
  std::array<std::array<double, 3>, 6> xi{};
  const auto vertices = response_vertices();
  for (std::size_t j = 0; j < 6; ++j) {
    tgt[j] = targets[j].p;
    xi[j] = vertices[j].plus_part().p;
  }
  const auto system = nc_system<double>(tgt, xi);
  const auto res = find_feasible_point(system, ScalarTraits<double>{kLpTolerance});

  NcFeasibility out;
  out.feasible = res.feasible;
  if (!res.feasible) return out;
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t i = 0; i < 6; ++i) out.nu[j][i] = res.x[j * 6 + i];
  }
  for (std::size_t r = 0; r < system.rows(); ++r) {
    double lhs = 0.0;
    for (std::size_t c = 0; c < 36; ++c) lhs += system.a[r][c] * res.x[c];
    out.residual = std::max(out.residual, std::abs(lhs - system.b[r]));
  }
  return out;
}

NcFeasibilityExact nc_feasible_exact(const std::array<RationalBehaviour, 6>& targets) {
  for (const auto& t : targets) {
    if (t[0] + t[1] + t[2] != Rational(3, 2)) {
      throw DomainError("nc_feasible_exact: behaviour violates the bias exactly");
    }
  }
  const auto system = nc_system<Rational>(targets, hexagon_as<Rational>());
  const auto res = find_feasible_point(system, ScalarTraits<Rational>{});
  NcFeasibilityExact out;
  out.feasible = res.feasible;
  if (res.feasible) {
    for (std::size_t j = 0; j < 6; ++j) {
      for (std::size_t i = 0; i < 6; ++i) out.nu[j][i] = res.x[j * 6 + i];
    }
  }
  return out;
}

double inequality_value(const Behaviour& s1, const Behaviour& s3, const Behaviour& s5) {
  return s1[0] + s3[1] + s5[2];
}

ContextualityCertificate certify(std::span<const Behaviour> behaviours, double bias_tol) {
  if (behaviours.empty()) throw DomainError("certify: no behaviours given");
  for (const auto& b : behaviours) require_bias(b, bias_tol, "certify");

  ContextualityCertificate cert;
  if (all_shrunken_inside(behaviours, 1.0, bias_tol)) {
    cert.eta_star = 1.0;
  } else if (all_shrunken_inside(behaviours, 0.0, bias_tol)) {
    double lo = 0.0;
    double hi = 1.0;
    for (int iter = 0; iter < 60 && hi - lo > 1e-6; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (all_shrunken_inside(behaviours, mid, bias_tol) ? lo : hi) = mid;
    }
    cert.eta_star = lo;
  }
  const auto u = shrunken_vertices(cert.eta_star);
  cert.inequality_value = inequality_value(u[0], u[2], u[4]);
  cert.verdict = cert.eta_star > 2.0 / 3.0 + 1e-6 ? Verdict::Contextual : Verdict::NotCertified;
  return cert;
}

JointEquivalence joint_equivalence_check(const std::array<JointLabelDistribution, 6>& joints) {
  constexpr double tol = 1e-9;
  for (const auto& j : joints) {
    double sum = 0.0;
    for (double p : j.probs) {
      if (!(p >= -tol)) throw DomainError("joint_equivalence_check: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw DomainError("joint_equivalence_check: distribution does not sum to 1");
    }
  }
  std::array<JointLabelDistribution, 3> mix;
  for (std::size_t pair = 0; pair < 3; ++pair) {
    for (std::size_t i = 0; i < 8; ++i) {
      mix[pair].probs[i] = 0.5 * (joints[2 * pair].probs[i] + joints[2 * pair + 1].probs[i]);
    }
  }
  JointEquivalence out{true, true};
  for (std::size_t pair = 1; pair < 3; ++pair) {
    const auto m0 = mix[0].marginals();
    const auto m = mix[pair].marginals();
    for (std::size_t k = 0; k < 3; ++k) {
      if (std::abs(m0[k] - m[k]) > tol) out.marginals_equal = false;
    }
    for (std::size_t i = 0; i < 8; ++i) {
      if (std::abs(mix[0].probs[i] - mix[pair].probs[i]) > tol) out.joints_equal = false;
    }
  }
  return out;
}

double generalized_bias_residual(const std::vector<std::vector<double>>& marginals, int c) {
  if (c < 1) throw DomainError("generalized_bias_residual: C must be at least 1");
  if (marginals.size() < 2) throw DomainError("generalized_bias_residual: need N >= 2 rows");
  const std::size_t width = 2 * static_cast<std::size_t>(c) + 1;
  double total = 0.0;
  for (const auto& row : marginals) {
    if (row.size() != width) {
      throw DomainError("generalized_bias_residual: each row needs 2C+1 entries");
    }
    double sum = 0.0;
    for (std::size_t y = 0; y < width; ++y) {
      if (!(row[y] >= -1e-12)) throw DomainError("generalized_bias_residual: negative entry");
      sum += row[y];
      total += row[y] * static_cast<double>(y);
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw DomainError("generalized_bias_residual: row does not sum to 1");
    }
  }
  return total - static_cast<double>(marginals.size()) * c;
}

}  // namespace ctxml
