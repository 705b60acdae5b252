#pragma once

// The four-model comparison: biased quantum, generic quantum, and the
// surrogate at degrees 1 and 2, trained on one shared dataset and scored on
// one shared test set.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxml/evaluation.hpp"
#include "ctxml/training.hpp"

namespace ctxml {

struct ExperimentScale {
  std::string name;
  std::size_t n_train = 300;
  std::size_t epochs = 2000;
  std::size_t n_seeds = 3;
  std::size_t n_test = 2000;
  std::size_t kl_cadence = 10;
  int quantum_layers = 1;
  int quantum_blocks = 2;

  static ExperimentScale desk();
  static ExperimentScale paper();
  /// "desk" or "paper".
  static ExperimentScale parse(std::string_view name);
};

struct ExperimentEntry {
  std::string label;
  TrainConfig config;
};

/// Dataset seed = root, test seed = root + 1, training seeds root + 100 + i.
std::vector<ExperimentEntry> experiment_entries(const ExperimentScale& scale, std::uint64_t root_seed);

using ProgressFn = std::function<void(std::string_view message)>;

struct ExperimentResult {
  std::vector<ModelRunReport> runs;
};

/// Runs every entry and writes, under out: experiment.json, dataset.jsonl,
/// <label>/config.json, <label>/seed_<s>.csv, <label>/model_seed_<s>.json
/// and summary.json.
ExperimentResult reproduce(const ExperimentScale& scale, std::uint64_t root_seed,
                           const std::filesystem::path& out, const ProgressFn& progress = {});

}  // namespace ctxml
