#include "ctxml/model.hpp"

#include <algorithm>

#include "json.hpp"

#include "ctxml/error.hpp"
#include "ctxml/io.hpp"

namespace ctxml {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::BiasedQuantum: return "biased-quantum";
    case ModelKind::GenericQuantum: return "generic-quantum";
    case ModelKind::Surrogate: return "surrogate";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "biased-quantum") return ModelKind::BiasedQuantum;
  if (text == "generic-quantum") return ModelKind::GenericQuantum;
  if (text == "surrogate") return ModelKind::Surrogate;
  throw DomainError("unknown model kind '" + std::string(text) + "'");
}

Model Model::create(ModelKind kind, int layers, int blocks) {
  Model m;
  m.kind_ = kind;
  m.layers_ = layers;
  m.blocks_ = blocks;
  switch (kind) {
    case ModelKind::BiasedQuantum:
      m.circuit_ = std::make_shared<const QuantumMultiTaskModel>(build_biased_ansatz(layers, blocks));
      break;
    case ModelKind::GenericQuantum:
      m.circuit_ = std::make_shared<const QuantumMultiTaskModel>(build_generic_ansatz(layers, blocks));
      break;
    case ModelKind::Surrogate:
      m.blocks_ = 0;
      m.surrogate_ = SurrogateParams::zeros(layers);
      return m;
  }
  m.quantum_params_.assign(m.circuit_->circuit.params(), 0.0);
  return m;
}

std::size_t Model::param_count(ModelKind kind, int layers, int blocks) {
  if (kind == ModelKind::Surrogate) return 3 * SurrogateParams::per_task(layers);
  if (layers < 1 || blocks < 1) throw DomainError("ansatz: layers and blocks must be >= 1");
  const auto per_layer = 9 * static_cast<std::size_t>(blocks) * static_cast<std::size_t>(layers);
  return kind == ModelKind::BiasedQuantum ? 1 + per_layer : per_layer;
}

std::span<const double> Model::params() const {
  return is_quantum() ? std::span<const double>(quantum_params_)
                      : std::span<const double>(surrogate_.coefficients);
}

std::span<double> Model::params() {
  return is_quantum() ? std::span<double>(quantum_params_) : std::span<double>(surrogate_.coefficients);
}

void Model::set_params(std::span<const double> values) {
  auto dst = params();
  if (values.size() != dst.size()) {
    throw DomainError("model expects " + std::to_string(dst.size()) + " parameters, got " +
                      std::to_string(values.size()));
  }
  std::copy(values.begin(), values.end(), dst.begin());
}

Behaviour Model::behaviour(const FeatureMatrix& f) const {
  if (is_quantum()) return task_probabilities(*circuit_, f, quantum_params_);
  return task_probabilities(surrogate_, f);
}

const QuantumMultiTaskModel& Model::circuit() const {
  if (!circuit_) throw DomainError("surrogate models have no circuit");
  return *circuit_;
}

const SurrogateParams& Model::surrogate() const {
  if (is_quantum()) throw DomainError("quantum models have no surrogate coefficients");
  return surrogate_;
}

namespace {

void append_array(std::string& out, std::span<const double> values) {
  out += '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    append_double(out, values[i]);
  }
  out += ']';
}

}  // namespace

std::string model_to_text(const Model& m) {
  std::string out = "{\"format\":\"ctxml-model\",\"version\":1,\"kind\":\"" + to_string(m.kind()) +
                    "\",\"L\":" + std::to_string(m.layers());
  if (m.is_quantum()) {
    out += ",\"B\":" + std::to_string(m.blocks()) + ",\"params\":";
    append_array(out, m.params());
  } else {
    out += ",\"tasks\":[";
    for (int k = 0; k < 3; ++k) {
      out += k ? ",{\"alpha\":" : "{\"alpha\":";
      append_array(out, m.surrogate().alpha(k));
      out += ",\"beta\":";
      append_array(out, m.surrogate().beta(k));
      out += '}';
    }
    out += ']';
  }
  out += "}\n";
  return out;
}

void save_model(const std::filesystem::path& path, const Model& m) {
  write_text_file(path, model_to_text(m));
}

Model model_from_text(std::string_view text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "ctxml-model") throw IoError("model file: unknown format");
    const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
    const int layers = j.at("L").get<int>();
    if (kind == ModelKind::Surrogate) {
      Model m = Model::create(kind, layers, 0);
      const auto& tasks = j.at("tasks");
      if (tasks.size() != 3) throw IoError("model file: surrogate needs three tasks");
      std::vector<double> flat;
      for (const auto& t : tasks) {
        const auto alpha = t.at("alpha").get<std::vector<double>>();
        const auto beta = t.at("beta").get<std::vector<double>>();
        flat.insert(flat.end(), alpha.begin(), alpha.end());
        flat.insert(flat.end(), beta.begin(), beta.end());
      }
      m.set_params(flat);
      return m;
    }
    Model m = Model::create(kind, layers, j.at("B").get<int>());
    m.set_params(j.at("params").get<std::vector<double>>());
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("model file: ") + e.what());
  }
}

Model load_model(const std::filesystem::path& path) { return model_from_text(read_text_file(path)); }

}  // namespace ctxml
