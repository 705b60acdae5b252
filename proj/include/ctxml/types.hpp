#pragma once

#include <array>
#include <cstddef>

namespace ctxml {

/// Per-task probabilities of the +1 label, (P1(+1|x), P2(+1|x), P3(+1|x)).
struct Behaviour {
  std::array<double, 3> p{};

  double& operator[](std::size_t k) { return p[k]; }
  double operator[](std::size_t k) const { return p[k]; }
  double sum() const { return p[0] + p[1] + p[2]; }
  bool operator==(const Behaviour&) const = default;
};

/// Distribution over the eight payoff vectors y in {-1,+1}^3.
///
/// Index convention: bit (2 - k) of the index is set iff task k (0-based)
/// has label +1. So index 0 is (-,-,-), index 1 is (-,-,+) and index 7 is
/// (+,+,+).
struct JointLabelDistribution {
  std::array<double, 8> probs{};

  static constexpr std::size_t index_of(int y1, int y2, int y3) {
    return (y1 > 0 ? 4u : 0u) + (y2 > 0 ? 2u : 0u) + (y3 > 0 ? 1u : 0u);
  }

  /// Per-task P(+1).
  Behaviour marginals() const {
    Behaviour b;
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        if (i & (4u >> k)) b[k] += probs[i];
      }
    }
    return b;
  }

  /// Independent labels with the given per-task P(+1).
  static JointLabelDistribution product(const Behaviour& b) {
    JointLabelDistribution j;
    for (std::size_t i = 0; i < 8; ++i) {
      double p = 1.0;
      for (std::size_t k = 0; k < 3; ++k) {
        p *= (i & (4u >> k)) ? b[k] : 1.0 - b[k];
      }
      j.probs[i] = p;
    }
    return j;
  }
};

/// Encoded model input: x1..x6 where (x1, x2, x3) is the first column of the
/// 3x2 feature matrix and (x4, x5, x6) the second.
struct FeatureMatrix {
  std::array<double, 6> x{};

  double operator[](std::size_t i) const { return x[i]; }
  double& operator[](std::size_t i) { return x[i]; }
  /// Entry (row, col) of the 3x2 matrix.
  double at(std::size_t row, std::size_t col) const { return x[col * 3 + row]; }
};

}  // namespace ctxml
