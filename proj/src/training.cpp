#include "ctxml/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "json.hpp"

#include "ctxml/error.hpp"
#include "ctxml/io.hpp"

namespace ctxml {
namespace {

using nlohmann::json;

// Bases above this many doubles are recomputed every epoch instead of cached.
constexpr std::size_t kMaxCachedBasis = std::size_t{1} << 26;

double clamp_prob(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

// 1-based line of the first occurrence of "key" in text, or 0.
std::size_t line_of_key(std::string_view text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string_view::npos) return 0;
  return static_cast<std::size_t>(std::count(text.begin(), text.begin() + pos, '\n')) + 1;
}

void merge_json(TrainConfig& c, const json& j, std::string_view text) {
  static const std::set<std::string> known{"model_kind", "L",        "B",         "lr",
                                           "epochs",     "l2_lambda", "seeds",     "clamp_eps",
                                           "kl_cadence", "n_test",   "test_seed"};
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const std::size_t line = line_of_key(text, key);
    const std::string where =
        "config" + (line ? " line " + std::to_string(line) : std::string()) + ": field '" + key + "': ";
    if (!known.count(key)) throw ConfigError(where + "unknown field");
    try {
      const json& v = it.value();
      if (key == "model_kind") c.model_kind = parse_model_kind(v.get<std::string>());
      else if (key == "L") c.layers = v.get<int>();
      else if (key == "B") c.blocks = v.get<int>();
      else if (key == "lr") c.lr = v.get<double>();
      else if (key == "epochs") c.epochs = v.get<std::size_t>();
      else if (key == "l2_lambda") c.l2_lambda = v.get<double>();
      else if (key == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
      else if (key == "clamp_eps") c.clamp_eps = v.get<double>();
      else if (key == "kl_cadence") c.kl_cadence = v.get<std::size_t>();
      else if (key == "n_test") c.n_test = v.get<std::size_t>();
      else if (key == "test_seed") c.test_seed = v.get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ConfigError(where + e.what());
    } catch (const DomainError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann's message already names the line and column.
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("config: lr must be positive");
  if (epochs < 1) throw ConfigError("config: epochs must be at least 1");
  if (!(l2_lambda >= 0.0)) throw ConfigError("config: l2_lambda must be non-negative");
  if (seeds.empty()) throw ConfigError("config: at least one seed is required");
  if (!(clamp_eps > 0.0 && clamp_eps <= 1e-6)) throw ConfigError("config: clamp_eps must lie in (0, 1e-6]");
  if (kl_cadence < 1) throw ConfigError("config: kl_cadence must be at least 1");
  if (n_test < 1) throw ConfigError("config: n_test must be at least 1");
  if (model_kind == ModelKind::Surrogate) {
    if (layers < 1 || layers > 4) throw ConfigError("config: surrogate L must lie in [1,4]");
  } else if (layers < 1 || blocks < 1) {
    throw ConfigError("config: quantum models need L >= 1 and B >= 1");
  }
}

double TrainConfig::default_lr(ModelKind kind, int layers) {
  if (kind == ModelKind::Surrogate && layers >= 2) return 1e-4;
  return 1e-3;
}

TrainConfig parse_train_config(std::string_view text) {
  const json j = parse_json(text);
  TrainConfig c;
  merge_json(c, j, text);
  if (!j.contains("lr")) c.lr = TrainConfig::default_lr(c.model_kind, c.layers);
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  return parse_train_config(read_text_file(path));
}

TrainConfig apply_overrides(TrainConfig config, std::string_view overrides_json) {
  if (overrides_json.empty()) return config;
  merge_json(config, parse_json(overrides_json), overrides_json);
  config.validate();
  return config;
}

std::string train_config_to_text(const TrainConfig& c) {
  std::string out = "{\n  \"model_kind\": \"" + to_string(c.model_kind) + "\",\n";
  out += "  \"L\": " + std::to_string(c.layers) + ",\n";
  out += "  \"B\": " + std::to_string(c.blocks) + ",\n";
  out += "  \"lr\": " + format_double(c.lr) + ",\n";
  out += "  \"epochs\": " + std::to_string(c.epochs) + ",\n";
  out += "  \"l2_lambda\": " + format_double(c.l2_lambda) + ",\n";
  out += "  \"seeds\": [";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    out += (i ? ", " : "") + std::to_string(c.seeds[i]);
  }
  out += "],\n";
  out += "  \"clamp_eps\": " + format_double(c.clamp_eps) + ",\n";
  out += "  \"kl_cadence\": " + std::to_string(c.kl_cadence) + ",\n";
  out += "  \"n_test\": " + std::to_string(c.n_test) + ",\n";
  out += "  \"test_seed\": " + std::to_string(c.test_seed) + "\n}\n";
  return out;
}

void adam_step(OptimizerState& s, std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != grad.size() || s.first_moment.size() != params.size() ||
      s.second_moment.size() != params.size()) {
    throw DomainError("adam_step: shape mismatch");
  }
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.first_moment[i] = s.beta1 * s.first_moment[i] + (1.0 - s.beta1) * grad[i];
    s.second_moment[i] = s.beta2 * s.second_moment[i] + (1.0 - s.beta2) * grad[i] * grad[i];
    const double m_hat = s.first_moment[i] / c1;
    const double v_hat = s.second_moment[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

void gd_step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != grad.size()) throw DomainError("gd_step: shape mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

double l2_penalty(std::span<const double> params, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("l2_penalty: lambda must be non-negative");
  double s = 0.0;
  for (double p : params) s += p * p;
  return lambda * s;
}

double nll_loss(const Model& model, const Dataset& data, double clamp_eps) {
  if (data.records.empty()) throw DomainError("nll_loss: empty dataset");
  double loss = 0.0;
  for (const auto& r : data.records) {
    const Behaviour b = model.behaviour(r.strategy);
    for (std::size_t k = 0; k < 3; ++k) {
      const double p = r.payoffs[k] > 0 ? b[k] : 1.0 - b[k];
      loss -= std::log(clamp_prob(p, clamp_eps));
    }
  }
  return loss;
}

BatchObjective::BatchObjective(const Model& shape, const Dataset& data, double clamp_eps)
    : clamp_eps_(clamp_eps) {
  if (data.records.empty()) throw DomainError("training: empty dataset");
  for (const auto& r : data.records) {
    features_.push_back(encode_features(r.strategy));
    labels_.push_back(r.payoffs);
  }
  if (!shape.is_quantum()) {
    degree_ = shape.layers();
    const std::size_t width = SurrogateParams::per_task(degree_);
    if (width * features_.size() <= kMaxCachedBasis) {
      basis_cache_.resize(width * features_.size());
      for (std::size_t i = 0; i < features_.size(); ++i) {
        fourier_basis(degree_, feature_map(features_[i]),
                      std::span<double>(basis_cache_).subspan(i * width, width));
      }
    }
  }
}

double BatchObjective::value(const Model& model) const {
  return model.is_quantum() ? quantum_pass(model, {}, false) : surrogate_pass(model, {}, false);
}

double BatchObjective::value_and_gradient(const Model& model, std::span<double> grad) const {
  if (grad.size() != model.param_count()) throw DomainError("objective: gradient has wrong length");
  std::fill(grad.begin(), grad.end(), 0.0);
  return model.is_quantum() ? quantum_pass(model, grad, true) : surrogate_pass(model, grad, true);
}

double BatchObjective::surrogate_pass(const Model& model, std::span<double> grad, bool want_grad) const {
  const SurrogateParams& p = model.surrogate();
  const std::size_t width = SurrogateParams::per_task(degree_);
  std::vector<double> scratch(basis_cache_.empty() ? width : 0);
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    std::span<const double> basis;
    if (basis_cache_.empty()) {
      fourier_basis(degree_, feature_map(features_[i]), scratch);
      basis = scratch;
    } else {
      basis = std::span<const double>(basis_cache_).subspan(i * width, width);
    }
    for (int k = 0; k < 3; ++k) {
      const double g = evaluate_on_basis(p, k, basis);
      const int y = labels_[i][k];
      const double prob = 0.5 * (1.0 + y * hard_tanh(g));
      loss -= std::log(clamp_prob(prob, clamp_eps_));
      if (!want_grad || std::abs(g) > 1.0 || prob < clamp_eps_ || prob > 1.0 - clamp_eps_) continue;
      // d(-log P)/dg = -y / (2P).
      const double dg = -y / (2.0 * prob);
      auto gk = grad.subspan(static_cast<std::size_t>(k) * width, width);
      for (std::size_t j = 0; j < width; ++j) gk[j] += dg * basis[j];
    }
  }
  return loss;
}

double BatchObjective::quantum_pass(const Model& model, std::span<double> grad, bool want_grad) const {
  const QuantumMultiTaskModel& qm = model.circuit();
  const auto params = model.params();
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    StateVector psi = evolve(qm.circuit, features_[i], params);
    Matrix combined(psi.dim());
    bool any = false;
    for (std::size_t k = 0; k < 3; ++k) {
      const int y = labels_[i][k];
      const double prob = 0.5 * (1.0 + y * expectation(psi, qm.observables[k]));
      loss -= std::log(clamp_prob(prob, clamp_eps_));
      if (prob < clamp_eps_ || prob > 1.0 - clamp_eps_) continue;
      // d(-log P)/d<O_k> = -y / (2P); the weighted observables add up.
      combined = combined + qm.observables[k].matrix() * Complex(-y / (2.0 * prob));
      any = true;
    }
    if (!want_grad || !any) continue;
    const auto g = adjoint_gradient(qm.circuit, features_[i], params, std::move(psi), combined);
    for (std::size_t j = 0; j < g.size(); ++j) grad[j] += g[j];
  }
  return loss;
}

TrainResult train(const TrainConfig& config, const Dataset& data, std::uint64_t seed,
                  const KlEvaluator& kl, const EpochObserver& observer) {
  config.validate();
  Model model = Model::create(config.model_kind, config.layers, config.blocks);
  Rng rng(seed);
  if (model.is_quantum()) {
    for (double& p : model.params()) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
  } else {
    model.set_params(init_params(rng, config.layers).coefficients);
  }

  const BatchObjective objective(model, data, config.clamp_eps);
  OptimizerState adam = OptimizerState::for_params(model.param_count());
  std::vector<double> grad(model.param_count());
  const double inv_n = 1.0 / static_cast<double>(data.records.size());
  TrainTrace trace;
  trace.seed = seed;
  trace.rows.reserve(config.epochs + 1);

  for (std::size_t epoch = 0;; ++epoch) {
    const bool last = epoch == config.epochs;
    const double nll = last ? objective.value(model) : objective.value_and_gradient(model, grad);
    if (!std::isfinite(nll)) {
      throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                         " (seed " + std::to_string(seed) + ")");
    }
    TraceRow row{epoch, nll, std::nullopt};
    if (kl && (epoch % config.kl_cadence == 0 || last)) row.avg_kl = kl(model);
    trace.rows.push_back(row);
    if (observer) observer(epoch, model);
    if (last) break;

    auto params = model.params();
    // Steps follow the per-record mean NLL; the summed NLL saturates every
    // surrogate output on the first GD step at the default learning rates.
    for (std::size_t j = 0; j < grad.size(); ++j) {
      grad[j] = grad[j] * inv_n + 2.0 * config.l2_lambda * params[j];
    }
    for (double g : grad) {
      if (!std::isfinite(g)) {
        throw NumericError("training diverged: non-finite gradient at epoch " + std::to_string(epoch));
      }
    }
    if (model.is_quantum()) {
      adam_step(adam, params, grad, config.lr);
    } else {
      gd_step(params, grad, config.lr);
    }
  }
  return {std::move(model), std::move(trace)};
}

TrainTrace mean_trace(std::span<const TrainTrace> traces) {
  TrainTrace mean;
  if (traces.empty()) return mean;
  std::vector<const TrainTrace*> ordered;
  for (const auto& t : traces) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const TrainTrace* a, const TrainTrace* b) { return a->seed < b->seed; });
  const std::size_t n_rows = ordered.front()->rows.size();
  for (const auto* t : ordered) {
    if (t->rows.size() != n_rows) throw DomainError("mean_trace: traces differ in length");
  }
  mean.seed = ordered.front()->seed;
  for (std::size_t r = 0; r < n_rows; ++r) {
    TraceRow row;
    row.epoch = ordered.front()->rows[r].epoch;
    double nll = 0.0, kl = 0.0;
    bool have_kl = true;
    for (const auto* t : ordered) {
      nll += t->rows[r].nll;
      if (t->rows[r].avg_kl) kl += *t->rows[r].avg_kl;
      else have_kl = false;
    }
    const double n = static_cast<double>(ordered.size());
    row.nll = nll / n;
    if (have_kl) row.avg_kl = kl / n;
    mean.rows.push_back(row);
  }
  return mean;
}

MultiSeedResult multi_seed_run(const TrainConfig& config, const Dataset& data, const KlEvaluator& kl) {
  config.validate();
  std::vector<std::uint64_t> seeds = config.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  MultiSeedResult out;
  std::vector<TrainTrace> traces;
  for (std::uint64_t s : seeds) {
    out.runs.push_back(train(config, data, s, kl));
    traces.push_back(out.runs.back().trace);
  }
  out.mean = mean_trace(traces);
  return out;
}

}  // namespace ctxml
