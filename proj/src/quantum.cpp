#include "ctxml/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ctxml/error.hpp"

namespace ctxml {
namespace {

constexpr Complex kI{0.0, 1.0};

std::size_t bit_of(int wire, int n_qubits) {
  return std::size_t{1} << (n_qubits - 1 - wire);
}

// Applies a 2x2 or 4x4 matrix to the given wires in place.
void apply_local(std::span<Complex> amps, int n_qubits, const Matrix& u, std::span<const int> wires) {
  if (wires.size() == 1) {
    const std::size_t m = bit_of(wires[0], n_qubits);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      if (i & m) continue;
      const Complex a0 = amps[i];
      const Complex a1 = amps[i | m];
      amps[i] = u00 * a0 + u01 * a1;
      amps[i | m] = u10 * a0 + u11 * a1;
    }
    return;
  }
  const std::size_t m0 = bit_of(wires[0], n_qubits);
  const std::size_t m1 = bit_of(wires[1], n_qubits);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & (m0 | m1)) continue;
    const std::array<std::size_t, 4> idx{i, i | m1, i | m0, i | m0 | m1};
    std::array<Complex, 4> v{};
    for (std::size_t r = 0; r < 4; ++r) v[r] = amps[idx[r]];
    for (std::size_t r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < 4; ++c) acc += u(r, c) * v[c];
      amps[idx[r]] = acc;
    }
  }
}

double gate_angle(const Gate& g, const FeatureMatrix& f, std::span<const double> params) {
  if (const auto* c = std::get_if<ConstantAngle>(&g.binding)) return c->angle;
  if (const auto* p = std::get_if<ParameterSlot>(&g.binding)) return params[p->slot] + p->offset;
  if (const auto* d = std::get_if<FeatureProduct>(&g.binding)) {
    double a = 1.0;
    for (std::size_t i : d->features) a *= f[i];
    return a;
  }
  return 0.0;
}

Matrix local_unitary(const Gate& g, const FeatureMatrix& f, std::span<const double> params) {
  return gate_unitary(g.kind, gate_angle(g, f, params));
}

void append_encoding_layer(std::vector<Gate>& gates) {
  for (int q = 0; q < 3; ++q) {
    gates.push_back({GateKind::RZ, {q}, FeatureProduct{{static_cast<std::size_t>(q)}}});
  }
  gates.push_back({GateKind::RZZ, {0, 1}, FeatureProduct{{3, 4}}});
  gates.push_back({GateKind::RZZ, {0, 2}, FeatureProduct{{3, 5}}});
  gates.push_back({GateKind::RZZ, {1, 2}, FeatureProduct{{4, 5}}});
}

std::array<Observable, 3> z_observables() {
  std::array<Observable, 3> obs;
  for (int k = 0; k < 3; ++k) {
    const int wire[] = {k};
    obs[k] = Observable(embed(pauli('Z'), wire, 3));
  }
  return obs;
}

void require_layout(int layers, int blocks) {
  if (layers < 1 || blocks < 1) throw DomainError("ansatz: layers and blocks must be >= 1");
}

}  // namespace

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::operator+(const Matrix& o) const {
  if (o.dim_ != dim_) throw DomainError("matrix dimension mismatch");
  Matrix r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
  if (o.dim_ != dim_) throw DomainError("matrix dimension mismatch");
  Matrix r(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
  if (o.dim_ != dim_) throw DomainError("matrix dimension mismatch");
  Matrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const Complex a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) r(i, j) += a * o(k, j);
    }
  }
  return r;
}

Matrix Matrix::operator*(Complex s) const {
  Matrix r(*this);
  for (auto& v : r.data_) v *= s;
  return r;
}

Matrix Matrix::adjoint() const {
  Matrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  }
  return r;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Complex> Matrix::apply(std::span<const Complex> v) const {
  if (v.size() != dim_) throw DomainError("matrix-vector dimension mismatch");
  std::vector<Complex> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const std::size_t da = a.dim(), db = b.dim();
  Matrix r(da * db);
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < da; ++j)
      for (std::size_t k = 0; k < db; ++k)
        for (std::size_t l = 0; l < db; ++l) r(i * db + k, j * db + l) = a(i, j) * b(k, l);
  return r;
}

Matrix pauli(char which) {
  Matrix m(2);
  switch (which) {
    case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = -kI; m(1, 0) = kI; break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw DomainError(std::string("unknown Pauli '") + which + "'");
  }
  return m;
}

Matrix embed(const Matrix& local, std::span<const int> wires, int n_qubits) {
  if (local.dim() != (std::size_t{1} << wires.size())) {
    throw DomainError("embed: local matrix does not match wire count");
  }
  const std::size_t dim = std::size_t{1} << n_qubits;
  Matrix full(dim);
  std::vector<Complex> column(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    std::fill(column.begin(), column.end(), Complex{});
    column[c] = 1.0;
    apply_local(column, n_qubits, local, wires);
    for (std::size_t r = 0; r < dim; ++r) full(r, c) = column[r];
  }
  return full;
}

Observable::Observable(Matrix m) : m_(std::move(m)) {
  if ((m_ - m_.adjoint()).max_abs() > 1e-12) throw DomainError("observable is not Hermitian");
}

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 20) throw DomainError("state vector: unsupported qubit count");
  amps_.assign(std::size_t{1} << n_qubits, Complex{});
  amps_[0] = 1.0;
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: return 1;
    default: return 2;
  }
}

bool gate_is_rotation(GateKind kind) {
  return kind != GateKind::SWAP && kind != GateKind::CNOT;
}

Matrix gate_unitary(GateKind kind, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  const Complex em = std::polar(1.0, -angle / 2.0);
  const Complex ep = std::polar(1.0, angle / 2.0);
  switch (kind) {
    case GateKind::RX: {
      Matrix m(2);
      m(0, 0) = c; m(0, 1) = -kI * s;
      m(1, 0) = -kI * s; m(1, 1) = c;
      return m;
    }
    case GateKind::RY: {
      Matrix m(2);
      m(0, 0) = c; m(0, 1) = -s;
      m(1, 0) = s; m(1, 1) = c;
      return m;
    }
    case GateKind::RZ: {
      Matrix m(2);
      m(0, 0) = em; m(1, 1) = ep;
      return m;
    }
    case GateKind::RZZ: {
      Matrix m(4);
      m(0, 0) = em; m(1, 1) = ep; m(2, 2) = ep; m(3, 3) = em;
      return m;
    }
    case GateKind::XY: {
      // (XX+YY)/2 swaps |01> and |10> and kills |00>, |11>.
      Matrix m(4);
      m(0, 0) = 1.0; m(3, 3) = 1.0;
      m(1, 1) = c; m(1, 2) = -kI * s;
      m(2, 1) = -kI * s; m(2, 2) = c;
      return m;
    }
    case GateKind::SWAP: {
      Matrix m(4);
      m(0, 0) = 1.0; m(1, 2) = 1.0; m(2, 1) = 1.0; m(3, 3) = 1.0;
      return m;
    }
    case GateKind::CNOT: {
      Matrix m(4);
      m(0, 0) = 1.0; m(1, 1) = 1.0; m(2, 3) = 1.0; m(3, 2) = 1.0;
      return m;
    }
  }
  throw DomainError("unknown gate kind");
}

Matrix gate_generator(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return pauli('X');
    case GateKind::RY: return pauli('Y');
    case GateKind::RZ: return pauli('Z');
    case GateKind::RZZ: return kron(pauli('Z'), pauli('Z'));
    case GateKind::XY:
      return (kron(pauli('X'), pauli('X')) + kron(pauli('Y'), pauli('Y'))) * Complex(0.5);
    default: throw DomainError("fixed gates have no generator");
  }
}

Circuit::Circuit(int n_qubits, std::size_t n_params, std::vector<Gate> gates)
    : n_qubits_(n_qubits), n_params_(n_params), gates_(std::move(gates)) {
  if (n_qubits < 1 || n_qubits > 20) throw DomainError("circuit: unsupported qubit count");
  std::vector<bool> used(n_params, false);
  for (const auto& g : gates_) {
    if (static_cast<int>(g.wires.size()) != gate_arity(g.kind)) {
      throw DomainError("circuit: gate has the wrong number of wires");
    }
    for (std::size_t i = 0; i < g.wires.size(); ++i) {
      if (g.wires[i] < 0 || g.wires[i] >= n_qubits) throw DomainError("circuit: wire out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (g.wires[i] == g.wires[j]) throw DomainError("circuit: repeated wire in gate");
      }
    }
    const bool fixed = std::holds_alternative<FixedGate>(g.binding);
    if (fixed == gate_is_rotation(g.kind)) {
      throw DomainError("circuit: rotation gates need an angle, fixed gates must not have one");
    }
    if (const auto* p = std::get_if<ParameterSlot>(&g.binding)) {
      if (p->slot >= n_params) throw DomainError("circuit: parameter slot out of range");
      used[p->slot] = true;
    }
    if (const auto* d = std::get_if<FeatureProduct>(&g.binding)) {
      for (std::size_t i : d->features) {
        if (i >= 6) throw DomainError("circuit: feature index out of range");
      }
    }
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) {
    throw DomainError("circuit: parameter slots are not contiguous");
  }
}

StateVector evolve(const Circuit& c, const FeatureMatrix& features, std::span<const double> params) {
  if (params.size() != c.params()) {
    throw DomainError("evolve: expected " + std::to_string(c.params()) + " parameters, got " +
                      std::to_string(params.size()));
  }
  StateVector s(c.qubits());
  for (const auto& g : c.gates()) {
    apply_local(s.amplitudes(), c.qubits(), local_unitary(g, features, params), g.wires);
  }
  return s;
}

double expectation(const StateVector& s, const Observable& o) {
  if (o.dim() != s.dim()) throw DomainError("expectation: dimension mismatch");
  const auto amps = s.amplitudes();
  const auto ov = o.matrix().apply(amps);
  Complex acc = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) acc += std::conj(amps[i]) * ov[i];
  return acc.real();
}

Behaviour task_probabilities(const QuantumMultiTaskModel& m, const FeatureMatrix& f,
                             std::span<const double> params) {
  const auto s = evolve(m.circuit, f, params);
  Behaviour b;
  for (std::size_t k = 0; k < 3; ++k) b[k] = 0.5 * (1.0 + expectation(s, m.observables[k]));
  return b;
}

QuantumMultiTaskModel build_biased_ansatz(int layers, int blocks) {
  require_layout(layers, blocks);
  constexpr double pi = std::numbers::pi;
  std::vector<Gate> gates;
  gates.push_back({GateKind::RY, {0}, ParameterSlot{0, 0.0}});
  gates.push_back({GateKind::RY, {1}, ParameterSlot{0, pi}});
  gates.push_back({GateKind::RY, {2}, ConstantAngle{pi / 2.0}});
  std::size_t slot = 1;
  const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
  for (int l = 0; l < layers; ++l) {
    append_encoding_layer(gates);
    for (int b = 0; b < blocks; ++b) {
      for (int q = 0; q < 3; ++q) gates.push_back({GateKind::RZ, {q}, ParameterSlot{slot++}});
      for (const auto& p : pairs) gates.push_back({GateKind::RZZ, {p[0], p[1]}, ParameterSlot{slot++}});
      for (const auto& p : pairs) gates.push_back({GateKind::XY, {p[0], p[1]}, ParameterSlot{slot++}});
    }
  }
  Matrix h = Matrix(8);
  auto obs = z_observables();
  for (const auto& o : obs) h = h + o.matrix();
  return {AnsatzKind::Biased, layers, blocks, Circuit(3, slot, std::move(gates)), obs, Observable(h)};
}

QuantumMultiTaskModel build_generic_ansatz(int layers, int blocks) {
  require_layout(layers, blocks);
  std::vector<Gate> gates;
  std::size_t slot = 0;
  for (int l = 0; l < layers; ++l) {
    append_encoding_layer(gates);
    for (int b = 0; b < blocks; ++b) {
      for (int q = 0; q < 3; ++q) {
        gates.push_back({GateKind::RZ, {q}, ParameterSlot{slot++}});
        gates.push_back({GateKind::RY, {q}, ParameterSlot{slot++}});
        gates.push_back({GateKind::RZ, {q}, ParameterSlot{slot++}});
      }
      gates.push_back({GateKind::CNOT, {0, 1}, FixedGate{}});
      gates.push_back({GateKind::CNOT, {1, 2}, FixedGate{}});
      gates.push_back({GateKind::CNOT, {2, 0}, FixedGate{}});
    }
  }
  Matrix h = Matrix(8);
  auto obs = z_observables();
  for (const auto& o : obs) h = h + o.matrix();
  return {AnsatzKind::Generic, layers, blocks, Circuit(3, slot, std::move(gates)), obs, Observable(h)};
}

std::vector<Matrix> circuit_generators(const Circuit& c) {
  std::vector<Matrix> out;
  for (const auto& g : c.gates()) {
    if (!gate_is_rotation(g.kind)) continue;
    out.push_back(embed(gate_generator(g.kind), g.wires, c.qubits()));
  }
  return out;
}

bool check_generator_commutes(const Matrix& g, const Matrix& h) {
  if (g.dim() != h.dim()) throw DomainError("check_generator_commutes: dimension mismatch");
  return (g * h - h * g).max_abs() <= 1e-10;
}

std::array<Observable, 3> build_trine_observables() {
  std::array<Observable, 3> out;
  for (int k = 1; k <= 3; ++k) {
    const double angle = 2.0 * k * std::numbers::pi / 3.0;
    out[k - 1] = Observable(pauli('X') * Complex(std::cos(angle)) + pauli('Y') * Complex(std::sin(angle)));
  }
  return out;
}

std::array<Matrix, 2> even_dim_projectors(std::size_t d) {
  if (d < 2 || d % 2 != 0) throw DomainError("even-dimensional triple needs even d >= 2");
  const std::size_t h = d / 2;
  const double r3 = std::sqrt(3.0);
  Matrix p(d), q(d);
  for (std::size_t i = 0; i < h; ++i) {
    p(i, i) = 1.0;
    q(i, i) = 0.25;
    q(i, i + h) = 0.25 * r3;
    q(i + h, i) = 0.25 * r3;
    q(i + h, i + h) = 0.75;
  }
  return {p, q};
}

std::array<Observable, 3> build_even_dim_triple(std::size_t d) {
  const auto [p, q] = even_dim_projectors(d);
  const Matrix id = Matrix::identity(d);
  const Matrix o1 = p * Complex(2.0) - id;
  const Matrix o2 = q * Complex(2.0) - id;
  const Matrix o3 = (o1 + o2) * Complex(-1.0);
  return {Observable(o1), Observable(o2), Observable(o3)};
}

Observable build_bias_operator(std::span<const Observable> observables,
                               std::span<const std::function<double(int)>> label_functions) {
  if (observables.empty() || observables.size() != label_functions.size()) {
    throw DomainError("build_bias_operator: need one label function per observable");
  }
  const std::size_t d = observables[0].dim();
  const Matrix id = Matrix::identity(d);
  Matrix h(d);
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const Matrix& o = observables[k].matrix();
    if (o.dim() != d) throw DomainError("build_bias_operator: dimension mismatch");
    if ((o * o - id).max_abs() > 1e-10) {
      throw DomainError("build_bias_operator: observable is not +-1 valued");
    }
    const Matrix plus = (id + o) * Complex(0.5);
    const Matrix minus = (id - o) * Complex(0.5);
    h = h + plus * Complex(label_functions[k](+1)) + minus * Complex(label_functions[k](-1));
  }
  return Observable(h);
}

std::vector<double> adjoint_gradient(const Circuit& c, const FeatureMatrix& f,
                                     std::span<const double> params, StateVector final_state,
                                     const Matrix& observable) {
  if (observable.dim() != final_state.dim()) throw DomainError("adjoint_gradient: dimension mismatch");
  auto amps = final_state.amplitudes();
  std::vector<Complex> lambda = observable.apply(amps);

  std::vector<double> grad(c.params(), 0.0);
  std::vector<Complex> mu(amps.size());
  const auto& gates = c.gates();
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    const Gate& g = *it;
    if (const auto* p = std::get_if<ParameterSlot>(&g.binding)) {
      // d<O>/da = Im <lambda| G |psi> for U = exp(-i a G / 2).
      std::copy(amps.begin(), amps.end(), mu.begin());
      apply_local(mu, c.qubits(), gate_generator(g.kind), g.wires);
      Complex acc = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) acc += std::conj(lambda[i]) * mu[i];
      grad[p->slot] += acc.imag();
    }
    const Matrix u_dag = local_unitary(g, f, params).adjoint();
    apply_local(amps, c.qubits(), u_dag, g.wires);
    apply_local(lambda, c.qubits(), u_dag, g.wires);
  }
  return grad;
}

std::vector<double> expectation_gradient(const Circuit& c, const FeatureMatrix& f,
                                         std::span<const double> params, const Matrix& observable,
                                         double* value) {
  StateVector psi = evolve(c, f, params);
  if (observable.dim() != psi.dim()) throw DomainError("expectation_gradient: dimension mismatch");
  if (value) {
    const auto amps = psi.amplitudes();
    const auto ov = observable.apply(amps);
    Complex acc = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) acc += std::conj(amps[i]) * ov[i];
    *value = acc.real();
  }
  return adjoint_gradient(c, f, params, std::move(psi), observable);
}

LogProbGradient log_prob_gradient(const QuantumMultiTaskModel& m, const FeatureMatrix& f,
                                  std::span<const double> params, int task, int label,
                                  double clamp_eps) {
  if (task < 0 || task > 2) throw DomainError("log_prob_gradient: task must be 0, 1 or 2");
  if (label != 1 && label != -1) throw DomainError("log_prob_gradient: label must be +-1");
  double ev = 0.0;
  auto g = expectation_gradient(m.circuit, f, params, m.observables[task].matrix(), &ev);
  const double prob = 0.5 * (1.0 + label * ev);
  LogProbGradient out;
  if (prob < clamp_eps) {
    out.clamped = true;
    out.gradient.assign(g.size(), 0.0);
    return out;
  }
  // d log P / d theta = label * d<O>/d theta / (2 P).
  const double scale = label / (2.0 * prob);
  for (double& v : g) v *= scale;
  out.gradient = std::move(g);
  return out;
}

}  // namespace ctxml
