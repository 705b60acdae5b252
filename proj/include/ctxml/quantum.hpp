#pragma once

// Dense statevector simulation of small parameterised circuits.
//
// Wire w is bit (n - 1 - w) of a basis index, so wire 0 is the most
// significant qubit. A rotation with generator G and angle a is
// exp(-i a G / 2), with G a Pauli string (or (XX+YY)/2 for the XY gate).

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "ctxml/types.hpp"

namespace ctxml {

using Complex = std::complex<double>;

/// Square dense complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static Matrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  Matrix operator+(const Matrix& o) const;
  Matrix operator-(const Matrix& o) const;
  Matrix operator*(const Matrix& o) const;
  Matrix operator*(Complex s) const;
  Matrix adjoint() const;
  double max_abs() const;

  std::vector<Complex> apply(std::span<const Complex> v) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

Matrix kron(const Matrix& a, const Matrix& b);
/// 2x2 Pauli matrix for 'I', 'X', 'Y' or 'Z'.
Matrix pauli(char which);
/// Embeds a 2x2 (one wire) or 4x4 (two wires) matrix into n qubits.
Matrix embed(const Matrix& local, std::span<const int> wires, int n_qubits);

/// Hermitian matrix (checked to 1e-12 on construction).
class Observable {
 public:
  Observable() = default;
  explicit Observable(Matrix m);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return m_.dim(); }

 private:
  Matrix m_;
};

class StateVector {
 public:
  /// |0...0> on n qubits.
  explicit StateVector(int n_qubits);

  int qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<Complex> amplitudes() { return amps_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  double norm_squared() const;

 private:
  int n_;
  std::vector<Complex> amps_;
};

enum class GateKind { RX, RY, RZ, RZZ, XY, SWAP, CNOT };

struct FixedGate {};
struct ConstantAngle {
  double angle;
};
/// angle = params[slot] + offset.
struct ParameterSlot {
  std::size_t slot;
  double offset = 0.0;
};
/// angle = product of the listed features (0-based indices into x1..x6).
struct FeatureProduct {
  std::vector<std::size_t> features;
};
using Binding = std::variant<FixedGate, ConstantAngle, ParameterSlot, FeatureProduct>;

struct Gate {
  GateKind kind;
  std::vector<int> wires;
  Binding binding;
};

int gate_arity(GateKind kind);
bool gate_is_rotation(GateKind kind);

/// Local (2x2 or 4x4) unitary of a gate at the given angle.
Matrix gate_unitary(GateKind kind, double angle);
/// Local generator G of a rotation gate; throws for fixed gates.
Matrix gate_generator(GateKind kind);

class Circuit {
 public:
  /// Validates wires and parameter slots. Slots must cover 0..n_params-1.
  Circuit(int n_qubits, std::size_t n_params, std::vector<Gate> gates);

  int qubits() const { return n_qubits_; }
  std::size_t params() const { return n_params_; }
  const std::vector<Gate>& gates() const { return gates_; }

 private:
  int n_qubits_;
  std::size_t n_params_;
  std::vector<Gate> gates_;
};

StateVector evolve(const Circuit& c, const FeatureMatrix& features, std::span<const double> params);

double expectation(const StateVector& s, const Observable& o);

enum class AnsatzKind { Biased, Generic };

struct QuantumMultiTaskModel {
  AnsatzKind kind;
  int layers;
  int blocks;
  Circuit circuit;
  std::array<Observable, 3> observables;
  Observable bias_operator;
};

/// P_k(+1|x) = (1 + <O_k>) / 2.
Behaviour task_probabilities(const QuantumMultiTaskModel& m, const FeatureMatrix& f,
                             std::span<const double> params);

/// Bias-conserving ansatz: an input preparation RY(t0), RY(t0 + pi), RY(pi/2)
/// followed by L layers of [RZ data, RZZ data, B trainable blocks]. Each
/// block holds RZ on every qubit and RZZ, XY on every pair (9 parameters).
QuantumMultiTaskModel build_biased_ansatz(int layers, int blocks);

/// Same encoding layers; blocks are per-qubit RZ RY RZ rotations followed by
/// a CNOT ring. Starts in |000>, so it does not respect the bias.
QuantumMultiTaskModel build_generic_ansatz(int layers, int blocks);

/// Full-space generators of every rotation gate in the circuit, in order.
std::vector<Matrix> circuit_generators(const Circuit& c);

bool check_generator_commutes(const Matrix& g, const Matrix& h);

/// cos(2k pi/3) X + sin(2k pi/3) Y for k = 1, 2, 3.
std::array<Observable, 3> build_trine_observables();

/// O1 = 2P - I, O2 = 2Q - I, O3 = -O1 - O2 with P = diag(I, 0) and
/// Q = [[I, sqrt3 I], [sqrt3 I, 3 I]] / 4 in d/2 blocks. d must be even.
std::array<Observable, 3> build_even_dim_triple(std::size_t d);

/// The two projectors behind build_even_dim_triple.
std::array<Matrix, 2> even_dim_projectors(std::size_t d);

/// H = sum_k f_k(+1) M_k+ + f_k(-1) M_k- with M_k+- the eigenprojectors of
/// the +-1 valued O_k.
Observable build_bias_operator(std::span<const Observable> observables,
                               std::span<const std::function<double(int)>> label_functions);

/// d<O>/d params by an adjoint sweep back from final_state, which must be
/// evolve(c, f, params).
std::vector<double> adjoint_gradient(const Circuit& c, const FeatureMatrix& f,
                                     std::span<const double> params, StateVector final_state,
                                     const Matrix& observable);

/// d<O>/d params via one forward and one adjoint sweep. If value is non-null
/// it receives <O>.
std::vector<double> expectation_gradient(const Circuit& c, const FeatureMatrix& f,
                                         std::span<const double> params, const Matrix& observable,
                                         double* value = nullptr);

struct LogProbGradient {
  std::vector<double> gradient;
  /// P_task(label|x) fell below clamp_eps; the gradient is then zero, matching
  /// the derivative of the clamped log-likelihood.
  bool clamped = false;
};

/// Gradient of log P_task(label | x). task in {0,1,2}, label is +1 or -1.
LogProbGradient log_prob_gradient(const QuantumMultiTaskModel& m, const FeatureMatrix& f,
                                  std::span<const double> params, int task, int label,
                                  double clamp_eps = 1e-12);

}  // namespace ctxml
