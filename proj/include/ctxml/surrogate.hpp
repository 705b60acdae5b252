#pragma once

// Classical Fourier surrogate: per task, a truncated Fourier series over the
// same frequency lattice the quantum model can reach, squashed by HardTanh
// into an expectation value.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ctxml/rng.hpp"
#include "ctxml/types.hpp"

namespace ctxml {

/// All omega in {-L..L}^6. Index is the mixed-radix number with digits
/// omega_j + L, omega_1 most significant.
class FrequencyLattice {
 public:
  explicit FrequencyLattice(int degree);

  int degree() const { return degree_; }
  std::size_t size() const { return size_; }
  std::array<int, 6> frequency(std::size_t index) const;
  std::size_t index_of(const std::array<int, 6>& omega) const;

 private:
  int degree_;
  std::size_t size_;
};

/// Coefficients for all three tasks in one flat array. Task k occupies
/// [k * 2N, (k + 1) * 2N) with alpha first and beta second, N = (2L+1)^6.
struct SurrogateParams {
  int degree = 1;
  std::vector<double> coefficients;

  static std::size_t lattice_size(int degree);
  static std::size_t per_task(int degree) { return 2 * lattice_size(degree); }

  /// All-zero coefficients.
  static SurrogateParams zeros(int degree);

  std::size_t lattice_size() const { return lattice_size(degree); }
  std::span<double> task(int k);
  std::span<const double> task(int k) const;
  std::span<double> alpha(int k) { return task(k).first(lattice_size()); }
  std::span<double> beta(int k) { return task(k).last(lattice_size()); }
  std::span<const double> alpha(int k) const { return task(k).first(lattice_size()); }
  std::span<const double> beta(int k) const { return task(k).last(lattice_size()); }
};

/// z(x) = (x1, x2, x3, x4 x5, x4 x6, x5 x6).
std::array<double, 6> feature_map(const FeatureMatrix& f);

/// cos(omega . z) and sin(omega . z) for every lattice point, concatenated
/// (cosines first). Length 2N.
std::vector<double> fourier_basis(int degree, const std::array<double, 6>& z);
void fourier_basis(int degree, const std::array<double, 6>& z, std::span<double> out);

/// g_k(x) = sum_omega alpha cos(omega . z) + beta sin(omega . z).
double evaluate(const SurrogateParams& p, int task, const FeatureMatrix& f);
/// Same on a precomputed basis: the dot product of task coefficients and basis.
double evaluate_on_basis(const SurrogateParams& p, int task, std::span<const double> basis);

double hard_tanh(double v);

/// P_k(+1|x) = (1 + hard_tanh(g_k(x))) / 2.
Behaviour task_probabilities(const SurrogateParams& p, const FeatureMatrix& f);
Behaviour task_probabilities_on_basis(const SurrogateParams& p, std::span<const double> basis);

/// d log P_task(label|x) / d(alpha, beta) for the task's 2N coefficients.
/// HardTanh's derivative is 1 on [-1, 1] and 0 outside; a probability below
/// clamp_eps gives a zero gradient.
std::vector<double> gradient(const SurrogateParams& p, int task, const FeatureMatrix& f, int label,
                             double clamp_eps = 1e-12);

/// Each coefficient ~ U[-1,1] / (2 (2L+1)^6), tasks drawn in order.
SurrogateParams init_params(Rng& rng, int degree);

}  // namespace ctxml
