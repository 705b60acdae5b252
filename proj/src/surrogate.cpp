#include "ctxml/surrogate.hpp"

#include <cmath>
#include <complex>
#include <numeric>

#include "ctxml/error.hpp"

namespace ctxml {

FrequencyLattice::FrequencyLattice(int degree) : degree_(degree) {
  if (degree < 1 || degree > 4) throw DomainError("frequency lattice: degree must be in [1,4]");
  const std::size_t base = 2 * static_cast<std::size_t>(degree) + 1;
  size_ = base * base * base * base * base * base;
}

std::array<int, 6> FrequencyLattice::frequency(std::size_t index) const {
  const std::size_t base = 2 * static_cast<std::size_t>(degree_) + 1;
  std::array<int, 6> omega{};
  for (int j = 5; j >= 0; --j) {
    omega[j] = static_cast<int>(index % base) - degree_;
    index /= base;
  }
  return omega;
}

std::size_t FrequencyLattice::index_of(const std::array<int, 6>& omega) const {
  const std::size_t base = 2 * static_cast<std::size_t>(degree_) + 1;
  std::size_t index = 0;
  for (int w : omega) {
    if (w < -degree_ || w > degree_) throw DomainError("frequency outside the lattice");
    index = index * base + static_cast<std::size_t>(w + degree_);
  }
  return index;
}

std::size_t SurrogateParams::lattice_size(int degree) { return FrequencyLattice(degree).size(); }

SurrogateParams SurrogateParams::zeros(int degree) {
  return {degree, std::vector<double>(3 * per_task(degree), 0.0)};
}

std::span<double> SurrogateParams::task(int k) {
  const std::size_t n = per_task(degree);
  return std::span<double>(coefficients).subspan(static_cast<std::size_t>(k) * n, n);
}

std::span<const double> SurrogateParams::task(int k) const {
  const std::size_t n = per_task(degree);
  return std::span<const double>(coefficients).subspan(static_cast<std::size_t>(k) * n, n);
}

std::array<double, 6> feature_map(const FeatureMatrix& f) {
  return {f[0], f[1], f[2], f[3] * f[4], f[3] * f[5], f[4] * f[5]};
}

void fourier_basis(int degree, const std::array<double, 6>& z, std::span<double> out) {
  const std::size_t base = 2 * static_cast<std::size_t>(degree) + 1;
  const std::size_t n = FrequencyLattice(degree).size();
  if (out.size() != 2 * n) throw DomainError("fourier_basis: output has the wrong length");

  // exp(i omega . z) as a running outer product over the six coordinates.
  std::vector<std::complex<double>> cur{1.0};
  std::vector<std::complex<double>> next;
  std::vector<std::complex<double>> phase(base);
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t m = 0; m < base; ++m) {
      const double w = static_cast<double>(m) - degree;
      phase[m] = std::polar(1.0, w * z[j]);
    }
    next.resize(cur.size() * base);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      for (std::size_t m = 0; m < base; ++m) next[i * base + m] = cur[i] * phase[m];
    }
    cur.swap(next);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = cur[i].real();
    out[n + i] = cur[i].imag();
  }
}

std::vector<double> fourier_basis(int degree, const std::array<double, 6>& z) {
  std::vector<double> out(2 * FrequencyLattice(degree).size());
  fourier_basis(degree, z, out);
  return out;
}

double evaluate_on_basis(const SurrogateParams& p, int task, std::span<const double> basis) {
  const auto coef = p.task(task);
  if (basis.size() != coef.size()) throw DomainError("evaluate: basis has the wrong length");
  return std::inner_product(coef.begin(), coef.end(), basis.begin(), 0.0);
}

double evaluate(const SurrogateParams& p, int task, const FeatureMatrix& f) {
  return evaluate_on_basis(p, task, fourier_basis(p.degree, feature_map(f)));
}

double hard_tanh(double v) {
  if (v < -1.0) return -1.0;
  if (v > 1.0) return 1.0;
  return v;
}

Behaviour task_probabilities_on_basis(const SurrogateParams& p, std::span<const double> basis) {
  Behaviour b;
  for (int k = 0; k < 3; ++k) b[k] = 0.5 * (1.0 + hard_tanh(evaluate_on_basis(p, k, basis)));
  return b;
}

Behaviour task_probabilities(const SurrogateParams& p, const FeatureMatrix& f) {
  return task_probabilities_on_basis(p, fourier_basis(p.degree, feature_map(f)));
}

std::vector<double> gradient(const SurrogateParams& p, int task, const FeatureMatrix& f, int label,
                             double clamp_eps) {
  if (label != 1 && label != -1) throw DomainError("surrogate gradient: label must be +-1");
  auto basis = fourier_basis(p.degree, feature_map(f));
  const double g = evaluate_on_basis(p, task, basis);
  const double prob = 0.5 * (1.0 + label * hard_tanh(g));
  if (std::abs(g) > 1.0 || prob < clamp_eps) {
    basis.assign(basis.size(), 0.0);
    return basis;
  }
  const double scale = label / (2.0 * prob);
  for (double& v : basis) v *= scale;
  return basis;
}

SurrogateParams init_params(Rng& rng, int degree) {
  SurrogateParams p = SurrogateParams::zeros(degree);
  const double scale = 1.0 / static_cast<double>(SurrogateParams::per_task(degree));
  for (double& c : p.coefficients) c = rng.uniform(-1.0, 1.0) * scale;
  return p;
}

}  // namespace ctxml
