#pragma once

// Behaviour geometry of zero-sum-biased three-task models and the
// noncontextuality test.
//
// A model encoding the bias p1 + p2 + p3 = 3/2 has all its behaviours on a
// hexagon. If the hull of a model's behaviours contains the hexagon shrunk
// towards its centre by a factor eta > 2/3, no noncontextual ontological
// model reproduces it. The test is a linear feasibility problem in the
// 36 weights nu_j(i) (preparation j, response vertex i).

#include <array>
#include <span>
#include <vector>

#include "ctxml/linear_feasibility.hpp"
#include "ctxml/types.hpp"

namespace ctxml {

inline constexpr double kBiasSum = 1.5;
inline constexpr double kNoncontextualBound = 2.5;

using BiasHexagon = std::array<Behaviour, 6>;

/// v1..v6 in order: (1,0,1/2), (0,1,1/2), (1/2,1,0), (1/2,0,1), (0,1/2,1),
/// (1,1/2,0).
BiasHexagon bias_hexagon();

/// u_i(eta) = eta v_i + (1 - eta)(1/2,1/2,1/2). eta must lie in [0,1].
BiasHexagon shrunken_vertices(double eta);

bool check_bias(const Behaviour& b, double tol);

/// True iff target is a convex combination of points (within 1e-9).
/// Every point must satisfy check_bias(1e-9); throws DomainError otherwise.
bool hull_contains(std::span<const Behaviour> points, const Behaviour& target,
                   double bias_tol = 1e-9);

/// Extremal response-function vector over the effects
/// (E1+, E2+, E3+, E1-, E2-, E3-, Omega, Null).
struct ResponseVertex {
  std::array<double, 8> xi{};

  Behaviour plus_part() const { return {{xi[0], xi[1], xi[2]}}; }
};

/// Vertices of {0 <= a,b <= 1, 1/2 <= a+b <= 3/2} lifted by c = 3/2 - a - b.
/// The order matches bias_hexagon().
std::array<ResponseVertex, 6> response_vertices();

struct NcFeasibility {
  bool feasible = false;
  /// nu[j][i]: weight of response vertex i for preparation j. Only
  /// meaningful when feasible.
  std::array<std::array<double, 6>, 6> nu{};
  /// Max violation of the defining equalities by nu (0 when infeasible).
  double residual = 0.0;
};

/// Exists nu >= 0 with sum_i nu_j(i) = 1, sum_i nu_j(i) xi^i_k+ = targets[j]_k
/// and nu_1 + nu_2 = nu_3 + nu_4 = nu_5 + nu_6 pointwise. Targets must
/// satisfy check_bias(1e-9).
NcFeasibility nc_feasible(const std::array<Behaviour, 6>& targets);

using RationalBehaviour = std::array<Rational, 3>;

struct NcFeasibilityExact {
  bool feasible = false;
  std::array<std::array<Rational, 6>, 6> nu{};
};

/// Same system in exact rational arithmetic. Targets must satisfy the bias
/// exactly.
NcFeasibilityExact nc_feasible_exact(const std::array<RationalBehaviour, 6>& targets);

/// u_i(eta) for rational eta, exactly.
std::array<RationalBehaviour, 6> shrunken_vertices_exact(const Rational& eta);

/// Left-hand side of the noncontextuality inequality,
/// P(E1+|s1) + P(E2+|s3) + P(E3+|s5); noncontextual models give <= 5/2.
double inequality_value(const Behaviour& s1, const Behaviour& s3, const Behaviour& s5);

enum class Verdict { Contextual, NotCertified };

struct ContextualityCertificate {
  double eta_star = 0.0;
  double inequality_value = 0.0;
  Verdict verdict = Verdict::NotCertified;
};

/// Largest eta (bisection to 1e-6) such that every u_i(eta) lies in the hull
/// of the behaviours. Contextual iff eta* > 2/3 + 1e-6. The reported
/// inequality value is the one attained by u_1, u_3, u_5 at eta*.
ContextualityCertificate certify(std::span<const Behaviour> behaviours, double bias_tol = 1e-9);

struct JointEquivalence {
  bool marginals_equal = false;
  bool joints_equal = false;
};

/// Compares the equal mixtures (s1+s2)/2, (s3+s4)/2, (s5+s6)/2 of six joint
/// label distributions, first on per-task marginals, then on the full joint.
JointEquivalence joint_equivalence_check(const std::array<JointLabelDistribution, 6>& joints);

/// Residual of the shifted zero-sum condition for N players with payoffs in
/// {-C..C} shifted to {0..2C}: sum_k sum_y P_k(y) y - N C. Rows are the
/// per-player distributions over y = 0..2C.
double generalized_bias_residual(const std::vector<std::vector<double>>& marginals, int c);

}  // namespace ctxml
