#include "ctxml/experiment.hpp"

#include "json.hpp"

#include "ctxml/error.hpp"
#include "ctxml/io.hpp"

namespace ctxml {

ExperimentScale ExperimentScale::desk() {
  ExperimentScale s;
  s.name = "desk";
  return s;
}

ExperimentScale ExperimentScale::paper() {
  ExperimentScale s;
  s.name = "paper";
  s.n_train = 1500;
  s.n_seeds = 20;
  s.n_test = 10000;
  s.quantum_layers = 2;
  return s;
}

ExperimentScale ExperimentScale::parse(std::string_view name) {
  if (name == "desk") return desk();
  if (name == "paper") return paper();
  throw DomainError("unknown scale '" + std::string(name) + "' (expected desk or paper)");
}

std::vector<ExperimentEntry> experiment_entries(const ExperimentScale& scale, std::uint64_t root_seed) {
  TrainConfig base;
  base.epochs = scale.epochs;
  base.kl_cadence = scale.kl_cadence;
  base.n_test = scale.n_test;
  base.test_seed = root_seed + 1;
  base.seeds.clear();
  for (std::size_t i = 0; i < scale.n_seeds; ++i) base.seeds.push_back(root_seed + 100 + i);

  std::vector<ExperimentEntry> out;
  auto add = [&](std::string label, ModelKind kind, int layers, int blocks) {
    TrainConfig c = base;
    c.model_kind = kind;
    c.layers = layers;
    c.blocks = blocks;
    c.lr = TrainConfig::default_lr(kind, layers);
    c.validate();
    out.push_back({std::move(label), c});
  };
  add("biased-quantum", ModelKind::BiasedQuantum, scale.quantum_layers, scale.quantum_blocks);
  add("generic-quantum", ModelKind::GenericQuantum, scale.quantum_layers, scale.quantum_blocks);
  add("surrogate-L1", ModelKind::Surrogate, 1, 0);
  add("surrogate-L2", ModelKind::Surrogate, 2, 0);
  return out;
}

ExperimentResult reproduce(const ExperimentScale& scale, std::uint64_t root_seed,
                           const std::filesystem::path& out, const ProgressFn& progress) {
  const auto entries = experiment_entries(scale, root_seed);

  nlohmann::ordered_json meta;
  meta["scale"] = scale.name;
  meta["root_seed"] = root_seed;
  meta["data_seed"] = root_seed;
  meta["test_seed"] = root_seed + 1;
  meta["n_train"] = scale.n_train;
  meta["epochs"] = scale.epochs;
  meta["n_seeds"] = scale.n_seeds;
  meta["n_test"] = scale.n_test;
  meta["kl_cadence"] = scale.kl_cadence;
  write_text_file(out / "experiment.json", meta.dump(2) + "\n");

  Rng data_rng(root_seed);
  const Dataset data = sample_dataset(data_rng, scale.n_train, root_seed);
  write_dataset(out / "dataset.jsonl", data);
  const TestSet test = make_test_set(scale.n_test, root_seed + 1);
  const KlEvaluator kl = [&test](const Model& m) { return average_kl(m, test).avg_kl; };

  ExperimentResult result;
  for (const auto& entry : entries) {
    write_text_file(out / entry.label / "config.json", train_config_to_text(entry.config));
    ModelRunReport run;
    run.label = entry.label;
    run.kind = entry.config.model_kind;
    run.layers = entry.config.layers;
    run.blocks = entry.config.model_kind == ModelKind::Surrogate ? 0 : entry.config.blocks;
    run.test_seed = entry.config.test_seed;
    for (std::uint64_t seed : entry.config.seeds) {
      if (progress) progress(entry.label + " seed " + std::to_string(seed));
      TrainResult r = train(entry.config, data, seed, kl);
      save_model(out / entry.label / ("model_seed_" + std::to_string(seed) + ".json"), r.model);
      run.traces.push_back(std::move(r.trace));
    }
    result.runs.push_back(std::move(run));
  }
  emit_report(result.runs, out);
  return result;
}

}  // namespace ctxml
