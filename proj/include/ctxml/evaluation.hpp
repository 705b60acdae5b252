#pragma once

// Average KL divergence between model marginals and the game oracle, and the
// per-seed / summary report files.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctxml/game.hpp"
#include "ctxml/model.hpp"
#include "ctxml/rng.hpp"
#include "ctxml/training.hpp"

namespace ctxml {

constexpr double kKlClamp = 1e-12;

/// Distribution over {+1, -1} stored as (P(+1), P(-1)). q is clamped to
/// [1e-12, 1 - 1e-12]; 0 log 0 = 0.
double kl_binary(std::array<double, 2> p, std::array<double, 2> q);

/// Fixed sample of test strategies with their exact oracle marginals.
struct TestSet {
  std::uint64_t seed = 0;
  std::vector<Strategy> strategies;
  std::vector<FeatureMatrix> features;
  std::vector<Behaviour> oracle;
};

/// n strategies drawn with sample_strategy from Rng(seed).
TestSet make_test_set(std::size_t n, std::uint64_t seed);
TestSet make_test_set(std::size_t n, Rng& rng, std::uint64_t seed_label = 0);

struct EvalReport {
  std::size_t n_test = 0;
  double avg_kl = 0.0;
  std::array<double, 3> per_task_kl{};
  std::filesystem::path behaviours_file;
  std::uint64_t test_seed = 0;
};

using BehaviourPredictor = std::function<Behaviour(const Strategy&, const FeatureMatrix&)>;

/// (1/3N) sum_i sum_k KL(oracle_k(x_i) || model_k(x_i)).
EvalReport average_kl(const BehaviourPredictor& predict, const TestSet& test);
EvalReport average_kl(const Model& model, const TestSet& test);
EvalReport average_kl(const Model& model, std::size_t n_test, Rng& rng);

/// Traces of one model configuration across seeds.
struct ModelRunReport {
  std::string label;
  ModelKind kind = ModelKind::BiasedQuantum;
  int layers = 1;
  int blocks = 0;
  std::uint64_t test_seed = 0;
  std::vector<TrainTrace> traces;
};

std::string trace_to_csv(const TrainTrace& trace);

/// Final-epoch avg_kl of a trace; throws DomainError if it was not recorded.
double final_avg_kl(const TrainTrace& trace);

/// Writes <out>/<label>/seed_<s>.csv for every trace and <out>/summary.json
/// with per-configuration mean/min/max final avg_kl and the labels ordered by
/// that mean.
void emit_report(std::span<const ModelRunReport> runs, const std::filesystem::path& out);
std::string summary_to_text(std::span<const ModelRunReport> runs);

}  // namespace ctxml
