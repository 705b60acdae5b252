#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxml/game.hpp"
#include "ctxml/quantum.hpp"
#include "ctxml/surrogate.hpp"
#include "ctxml/types.hpp"

namespace ctxml {

enum class ModelKind { BiasedQuantum, GenericQuantum, Surrogate };

std::string to_string(ModelKind kind);
/// "biased-quantum", "generic-quantum" or "surrogate".
ModelKind parse_model_kind(std::string_view text);

/// A trainable multi-task model of one of the three families together with
/// its parameter vector. Surrogates ignore the block count.
class Model {
 public:
  /// Model with all parameters zero.
  static Model create(ModelKind kind, int layers, int blocks);
  static std::size_t param_count(ModelKind kind, int layers, int blocks);

  ModelKind kind() const { return kind_; }
  int layers() const { return layers_; }
  int blocks() const { return blocks_; }
  bool is_quantum() const { return kind_ != ModelKind::Surrogate; }

  std::size_t param_count() const { return params().size(); }
  std::span<const double> params() const;
  std::span<double> params();
  void set_params(std::span<const double> values);

  Behaviour behaviour(const FeatureMatrix& f) const;
  Behaviour behaviour(const Strategy& x) const { return behaviour(encode_features(x)); }

  /// Quantum models only.
  const QuantumMultiTaskModel& circuit() const;
  /// Surrogate models only.
  const SurrogateParams& surrogate() const;

 private:
  Model() = default;

  ModelKind kind_ = ModelKind::BiasedQuantum;
  int layers_ = 1;
  int blocks_ = 1;
  std::shared_ptr<const QuantumMultiTaskModel> circuit_;
  std::vector<double> quantum_params_;
  SurrogateParams surrogate_;
};

/// Structured-text (JSON) model file; parameters at 17 significant digits.
void save_model(const std::filesystem::path& path, const Model& m);
std::string model_to_text(const Model& m);
Model load_model(const std::filesystem::path& path);
Model model_from_text(std::string_view text);

}  // namespace ctxml
