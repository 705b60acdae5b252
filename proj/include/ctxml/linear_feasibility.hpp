#pragma once

// Phase-I simplex for equality-form feasibility problems
//
//   find x >= 0 with A x = b.
//
// Dense tableau, Bland's smallest-index rule for both the entering and the
// leaving variable, so the method terminates on degenerate problems. The
// scalar type is a template parameter: double uses an absolute tolerance,
// Rational is exact.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ctxml/error.hpp"

namespace ctxml {

using Rational = boost::multiprecision::cpp_rational;

template <class Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  double tolerance = 1e-9;
  bool positive(double v) const { return v > tolerance; }
  bool negative(double v) const { return v < -tolerance; }
  double abs(double v) const { return std::abs(v); }
};

template <>
struct ScalarTraits<Rational> {
  bool positive(const Rational& v) const { return v > 0; }
  bool negative(const Rational& v) const { return v < 0; }
  Rational abs(const Rational& v) const { return v < 0 ? Rational(-v) : v; }
};

template <class Scalar>
struct EqualityProblem {
  std::vector<std::vector<Scalar>> a;  // rows x cols
  std::vector<Scalar> b;

  std::size_t rows() const { return a.size(); }
  std::size_t cols() const { return a.empty() ? 0 : a.front().size(); }
};

template <class Scalar>
struct FeasibilityResult {
  bool feasible = false;
  std::vector<Scalar> x;       // filled when feasible
  Scalar infeasibility{};      // Phase-I optimum: sum of artificial values
  std::size_t pivots = 0;
};

template <class Scalar>
FeasibilityResult<Scalar> find_feasible_point(const EqualityProblem<Scalar>& problem,
                                               ScalarTraits<Scalar> traits = {},
                                               std::size_t max_pivots = 20000) {
  const std::size_t m = problem.rows();
  const std::size_t n = problem.cols();
  if (problem.b.size() != m) throw DomainError("feasibility: b has wrong length");
  for (const auto& row : problem.a) {
    if (row.size() != n) throw DomainError("feasibility: ragged constraint matrix");
  }

  // Tableau columns: n originals, m artificials, rhs. Row m is the Phase-I
  // objective (reduced costs of minimising the artificial sum).
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<std::vector<Scalar>> t(m + 1, std::vector<Scalar>(width, Scalar(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = problem.b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Scalar(-problem.a[i][j]) : problem.a[i][j];
    t[i][rhs] = flip ? Scalar(-problem.b[i]) : problem.b[i];
    t[i][n + i] = Scalar(1);
    basis[i] = n + i;
    for (std::size_t j = 0; j < n; ++j) t[m][j] -= t[i][j];
    t[m][rhs] -= t[i][rhs];
  }

  FeasibilityResult<Scalar> result;
  while (true) {
    std::optional<std::size_t> entering;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (traits.negative(t[m][j])) {
        entering = j;
        break;
      }
    }
    if (!entering) break;
    const std::size_t col = *entering;

    std::optional<std::size_t> leaving;
    Scalar best_ratio{};
    for (std::size_t i = 0; i < m; ++i) {
      if (!traits.positive(t[i][col])) continue;
      Scalar ratio = t[i][rhs] / t[i][col];
      if (!leaving || ratio < best_ratio ||
          (!(best_ratio < ratio) && basis[i] < basis[*leaving])) {
        leaving = i;
        best_ratio = ratio;
      }
    }
    // Phase-I is bounded below by 0, so an entering column always has a
    // positive entry; a missing one means tolerance trouble.
    if (!leaving) throw SolverError("feasibility: unbounded Phase-I direction");

    const std::size_t r = *leaving;
    const Scalar pivot = t[r][col];
    for (std::size_t j = 0; j < width; ++j) t[r][j] /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      const Scalar factor = t[i][col];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= factor * t[r][j];
    }
    basis[r] = col;
    if (++result.pivots > max_pivots) {
      throw SolverError("feasibility: exceeded " + std::to_string(max_pivots) + " pivots");
    }
  }

  result.infeasibility = -t[m][rhs];
  result.feasible = !traits.positive(result.infeasibility);
  if (result.feasible) {
    result.x.assign(n, Scalar(0));
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n && t[i][rhs] > 0) result.x[basis[i]] = t[i][rhs];
    }
  }
  return result;
}

}  // namespace ctxml
