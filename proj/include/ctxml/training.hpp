#pragma once

// Full-batch negative log-likelihood training. Quantum models use Adam,
// surrogates plain gradient descent with an optional L2 penalty.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxml/game.hpp"
#include "ctxml/model.hpp"

namespace ctxml {

struct TrainConfig {
  ModelKind model_kind = ModelKind::BiasedQuantum;
  int layers = 2;
  int blocks = 2;
  double lr = 0.001;
  std::size_t epochs = 2000;
  double l2_lambda = 0.0;
  std::vector<std::uint64_t> seeds{0};
  double clamp_eps = 1e-12;
  /// avg_kl is evaluated every kl_cadence epochs and at the last epoch.
  std::size_t kl_cadence = 10;
  std::size_t n_test = 10000;
  std::uint64_t test_seed = 1;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  /// 0.001 for quantum models and L=1 surrogates, 0.0001 for L>=2 surrogates.
  static double default_lr(ModelKind kind, int layers);
};

/// Parses a JSON config. Missing fields keep their defaults, except that an
/// absent "lr" becomes default_lr for the chosen kind and degree. Errors carry
/// line and column.
TrainConfig parse_train_config(std::string_view text);
TrainConfig load_train_config(const std::filesystem::path& path);
/// Applies the fields present in overrides (a JSON object) on top of config.
TrainConfig apply_overrides(TrainConfig config, std::string_view overrides_json);
std::string train_config_to_text(const TrainConfig& config);

struct OptimizerState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static OptimizerState for_params(std::size_t n) {
    OptimizerState s;
    s.first_moment.assign(n, 0.0);
    s.second_moment.assign(n, 0.0);
    return s;
  }
};

/// Bias-corrected Adam update in place.
void adam_step(OptimizerState& state, std::span<double> params, std::span<const double> grad, double lr);
void gd_step(std::span<double> params, std::span<const double> grad, double lr);
double l2_penalty(std::span<const double> params, double lambda);

/// -sum_i sum_k log P_k(y_ik | x_i), probabilities clamped to
/// [clamp_eps, 1 - clamp_eps].
double nll_loss(const Model& model, const Dataset& data, double clamp_eps = 1e-12);

/// NLL and its gradient over a fixed dataset, with per-record inputs
/// (features, or the Fourier basis for surrogates) precomputed once.
class BatchObjective {
 public:
  BatchObjective(const Model& shape, const Dataset& data, double clamp_eps);

  double value(const Model& model) const;
  /// Returns the NLL and overwrites grad with its gradient.
  double value_and_gradient(const Model& model, std::span<double> grad) const;

 private:
  double surrogate_pass(const Model& model, std::span<double> grad, bool want_grad) const;
  double quantum_pass(const Model& model, std::span<double> grad, bool want_grad) const;

  double clamp_eps_;
  int degree_ = 0;
  std::vector<FeatureMatrix> features_;
  std::vector<PayoffVector> labels_;
  std::vector<double> basis_cache_;  // surrogates, when small enough
};

struct TraceRow {
  std::size_t epoch = 0;
  double nll = 0.0;
  std::optional<double> avg_kl;
};

/// Row e describes the parameters after e updates; row 0 is the
/// initialisation.
struct TrainTrace {
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
};

using KlEvaluator = std::function<double(const Model&)>;
using EpochObserver = std::function<void(std::size_t epoch, const Model&)>;

struct TrainResult {
  Model model;
  TrainTrace trace;
};

/// Initialises from seed (quantum parameters ~ U[0, 2 pi], surrogates via
/// init_params) and runs config.epochs full-batch steps on
/// nll / n + l2_lambda * |params|^2. Trace rows record the summed nll. kl may be empty, in
/// which case avg_kl is never recorded.
TrainResult train(const TrainConfig& config, const Dataset& data, std::uint64_t seed,
                  const KlEvaluator& kl, const EpochObserver& observer = {});

struct MultiSeedResult {
  /// Sorted by seed.
  std::vector<TrainResult> runs;
  TrainTrace mean;
};

MultiSeedResult multi_seed_run(const TrainConfig& config, const Dataset& data, const KlEvaluator& kl);

/// Per-epoch mean over traces (taken in seed order). avg_kl is averaged where
/// every trace has it.
TrainTrace mean_trace(std::span<const TrainTrace> traces);

}  // namespace ctxml
