#include "ctxml/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "ctxml/error.hpp"
#include "ctxml/io.hpp"

namespace ctxml {

double kl_binary(std::array<double, 2> p, std::array<double, 2> q) {
  double out = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    if (p[i] <= 0.0) continue;
    const double qi = std::clamp(q[i], kKlClamp, 1.0 - kKlClamp);
    out += p[i] * std::log(p[i] / qi);
  }
  return out;
}

TestSet make_test_set(std::size_t n, Rng& rng, std::uint64_t seed_label) {
  if (n == 0) throw DomainError("test set: n_test must be at least 1");
  TestSet t;
  t.seed = seed_label;
  t.strategies.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.strategies.push_back(sample_strategy(rng));
    t.features.push_back(encode_features(t.strategies.back()));
    t.oracle.push_back(oracle_marginals(t.strategies.back()));
  }
  return t;
}

TestSet make_test_set(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return make_test_set(n, rng, seed);
}

EvalReport average_kl(const BehaviourPredictor& predict, const TestSet& test) {
  if (test.strategies.empty()) throw DomainError("average_kl: empty test set");
  EvalReport r;
  r.n_test = test.strategies.size();
  r.test_seed = test.seed;
  for (std::size_t i = 0; i < r.n_test; ++i) {
    const Behaviour m = predict(test.strategies[i], test.features[i]);
    const Behaviour& o = test.oracle[i];
    for (std::size_t k = 0; k < 3; ++k) {
      r.per_task_kl[k] += kl_binary({o[k], 1.0 - o[k]}, {m[k], 1.0 - m[k]});
    }
  }
  const double n = static_cast<double>(r.n_test);
  for (double& v : r.per_task_kl) v /= n;
  r.avg_kl = (r.per_task_kl[0] + r.per_task_kl[1] + r.per_task_kl[2]) / 3.0;
  return r;
}

EvalReport average_kl(const Model& model, const TestSet& test) {
  return average_kl([&](const Strategy&, const FeatureMatrix& f) { return model.behaviour(f); }, test);
}

EvalReport average_kl(const Model& model, std::size_t n_test, Rng& rng) {
  return average_kl(model, make_test_set(n_test, rng));
}

std::string trace_to_csv(const TrainTrace& trace) {
  std::string out = "epoch,nll,avg_kl\n";
  for (const auto& row : trace.rows) {
    out += std::to_string(row.epoch);
    out += ',';
    append_double(out, row.nll);
    out += ',';
    if (row.avg_kl) append_double(out, *row.avg_kl);
    out += '\n';
  }
  return out;
}

double final_avg_kl(const TrainTrace& trace) {
  if (trace.rows.empty() || !trace.rows.back().avg_kl) {
    throw DomainError("trace for seed " + std::to_string(trace.seed) + " has no final avg_kl");
  }
  return *trace.rows.back().avg_kl;
}

namespace {

struct Stats {
  double mean, min, max;
};

Stats final_stats(const ModelRunReport& run) {
  if (run.traces.empty()) throw DomainError("report '" + run.label + "' has no traces");
  std::vector<std::pair<std::uint64_t, double>> finals;
  for (const auto& t : run.traces) finals.emplace_back(t.seed, final_avg_kl(t));
  std::sort(finals.begin(), finals.end());
  Stats s{0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& [seed, v] : finals) {
    s.mean += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean /= static_cast<double>(finals.size());
  return s;
}

}  // namespace

std::string summary_to_text(std::span<const ModelRunReport> runs) {
  if (runs.empty()) throw DomainError("emit_report: no runs");
  using nlohmann::ordered_json;
  ordered_json entries = ordered_json::array();
  std::vector<std::pair<double, std::string>> order;
  for (const auto& run : runs) {
    const Stats s = final_stats(run);
    ordered_json e;
    e["label"] = run.label;
    e["model_kind"] = to_string(run.kind);
    e["L"] = run.layers;
    e["B"] = run.blocks;
    e["n_seeds"] = run.traces.size();
    e["final_avg_kl_mean"] = s.mean;
    e["final_avg_kl_min"] = s.min;
    e["final_avg_kl_max"] = s.max;
    e["test_seed"] = run.test_seed;
    entries.push_back(std::move(e));
    order.emplace_back(s.mean, run.label);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  ordered_json ordering = ordered_json::array();
  for (const auto& [mean, label] : order) ordering.push_back(label);
  ordered_json doc;
  doc["entries"] = std::move(entries);
  doc["ordering_by_final_avg_kl"] = std::move(ordering);
  return doc.dump(2) + "\n";
}

void emit_report(std::span<const ModelRunReport> runs, const std::filesystem::path& out) {
  const std::string summary = summary_to_text(runs);
  for (const auto& run : runs) {
    for (const auto& t : run.traces) {
      write_text_file(out / run.label / ("seed_" + std::to_string(t.seed) + ".csv"), trace_to_csv(t));
    }
  }
  write_text_file(out / "summary.json", summary);
}

}  // namespace ctxml
