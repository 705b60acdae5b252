// ctxml command-line front end. Talks to the library through the C API only.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctxml/ctxml.h"

namespace {

constexpr int kExitUsage = 2;

int exit_code(ctxml_status s) { return s == CTXML_OK ? 0 : 10 + static_cast<int>(s); }

int report(ctxml_status s) {
  if (s != CTXML_OK) std::fprintf(stderr, "error (%s): %s\n", ctxml_status_name(s), ctxml_last_error());
  return exit_code(s);
}

std::filesystem::path out_root() {
  const char* env = std::getenv("CTXML_OUT_ROOT");
  return env != nullptr && *env != '\0' ? std::filesystem::path(env) : std::filesystem::path("ctxml-out");
}

std::string resolve_out(const std::string& flag, const std::string& fallback) {
  return flag.empty() ? (out_root() / fallback).string() : flag;
}

void print_progress(const char* message, void*) {
  std::fprintf(stderr, "  %s\n", message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contextuality and inductive bias in multi-task models"};
  app.require_subcommand(1, 1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Sample a training dataset");
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "Number of records")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Output file (default $CTXML_OUT_ROOT/dataset.jsonl)");

  // train
  auto* train = app.add_subcommand("train", "Train one model configuration over its seeds");
  std::string train_config, train_data, train_out;
  std::optional<std::string> kind;
  std::optional<int> layers, blocks;
  std::optional<double> lr, l2;
  std::optional<std::size_t> epochs, n_test, cadence;
  std::optional<std::uint64_t> test_seed;
  std::vector<std::uint64_t> seeds;
  train->add_option("--config", train_config, "Config file (JSON)")->required();
  train->add_option("--data", train_data, "Dataset file")->required();
  train->add_option("--out", train_out, "Output directory (default $CTXML_OUT_ROOT/train)");
  train->add_option("--model-kind", kind, "biased-quantum, generic-quantum or surrogate");
  train->add_option("--L", layers, "Layers (quantum) or degree (surrogate)");
  train->add_option("--B", blocks, "Trainable blocks per layer");
  train->add_option("--lr", lr, "Learning rate");
  train->add_option("--epochs", epochs, "Epochs");
  train->add_option("--l2-lambda", l2, "L2 penalty strength");
  train->add_option("--seeds", seeds, "Initialisation seeds");
  train->add_option("--n-test", n_test, "Test strategies for avg_kl");
  train->add_option("--test-seed", test_seed, "Test set seed");
  train->add_option("--kl-cadence", cadence, "Epochs between avg_kl evaluations");

  // eval
  auto* eval = app.add_subcommand("eval", "Average KL of a model against the oracle");
  std::string eval_model, eval_out, eval_behaviours;
  std::size_t eval_n = 10000;
  std::uint64_t eval_seed = 1;
  eval->add_option("--model", eval_model, "Model file")->required();
  eval->add_option("--n-test", eval_n, "Test strategies")->check(CLI::PositiveNumber);
  eval->add_option("--test-seed", eval_seed, "Test set seed");
  eval->add_option("--behaviours-out", eval_behaviours, "Write model behaviours on the test set");
  eval->add_option("--out", eval_out, "Write the report as JSON");

  // certify
  auto* cert = app.add_subcommand("certify", "Contextuality certificate for a model or behaviours");
  std::string cert_model, cert_behaviours, cert_out;
  std::uint64_t cert_seed = 0;
  auto* cm = cert->add_option("--model", cert_model, "Model file");
  auto* cb = cert->add_option("--behaviours", cert_behaviours, "Behaviours file");
  cm->excludes(cb);
  cert->add_option("--grid-seed", cert_seed, "Seed of the random strategy grid (model path)");
  cert->add_option("--out", cert_out, "Write the certificate as JSON");

  // verify-measurements
  auto* vm = app.add_subcommand("verify-measurements", "Check a zero-sum triple of observables");
  std::string vm_kind;
  std::size_t vm_d = 2;
  vm->add_option("--kind", vm_kind, "trine or even-dim")->required()->check(CLI::IsMember({"trine", "even-dim"}));
  vm->add_option("--d", vm_d, "Hilbert space dimension (even-dim)");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Four-model comparison");
  std::string rep_scale = "desk", rep_out;
  std::uint64_t rep_seed = 0;
  rep->add_option("--scale", rep_scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  rep->add_option("--out", rep_out, "Output directory (default $CTXML_OUT_ROOT/reproduce-<scale>)");
  rep->add_option("--seed", rep_seed, "Root seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*gen) {
    const std::string out = resolve_out(gen_out, "dataset.jsonl");
    const auto s = ctxml_gen_data(gen_n, gen_seed, out.c_str());
    if (s == CTXML_OK) std::printf("wrote %zu records to %s\n", gen_n, out.c_str());
    return report(s);
  }

  if (*train) {
    nlohmann::json overrides = nlohmann::json::object();
    if (kind) overrides["model_kind"] = *kind;
    if (layers) overrides["L"] = *layers;
    if (blocks) overrides["B"] = *blocks;
    if (lr) overrides["lr"] = *lr;
    if (epochs) overrides["epochs"] = *epochs;
    if (l2) overrides["l2_lambda"] = *l2;
    if (!seeds.empty()) overrides["seeds"] = seeds;
    if (n_test) overrides["n_test"] = *n_test;
    if (test_seed) overrides["test_seed"] = *test_seed;
    if (cadence) overrides["kl_cadence"] = *cadence;
    const std::string out = resolve_out(train_out, "train");
    const std::string ov = overrides.dump();
    const auto s = ctxml_train(train_config.c_str(), train_data.c_str(), out.c_str(),
                               overrides.empty() ? nullptr : ov.c_str());
    if (s == CTXML_OK) std::printf("wrote traces and models to %s\n", out.c_str());
    return report(s);
  }

  if (*eval) {
    ctxml_eval_report r{};
    const auto s = ctxml_eval(eval_model.c_str(), eval_n, eval_seed,
                              eval_behaviours.empty() ? nullptr : eval_behaviours.c_str(), &r);
    if (s != CTXML_OK) return report(s);
    nlohmann::ordered_json j;
    j["n_test"] = r.n_test;
    j["test_seed"] = r.test_seed;
    j["avg_kl"] = r.avg_kl;
    j["per_task_kl"] = {r.per_task_kl[0], r.per_task_kl[1], r.per_task_kl[2]};
    if (!eval_behaviours.empty()) j["behaviours_file"] = eval_behaviours;
    const std::string text = j.dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!eval_out.empty()) {
      FILE* f = std::fopen(eval_out.c_str(), "wb");
      if (f == nullptr || std::fputs(text.c_str(), f) < 0) {
        if (f) std::fclose(f);
        std::fprintf(stderr, "error (i/o error): cannot write %s\n", eval_out.c_str());
        return exit_code(CTXML_ERR_IO);
      }
      std::fclose(f);
    }
    return 0;
  }

  if (*cert) {
    if (cert_model.empty() == cert_behaviours.empty()) {
      std::fprintf(stderr, "certify: exactly one of --model or --behaviours is required\n");
      return kExitUsage;
    }
    ctxml_certificate c{};
    auto s = cert_model.empty() ? ctxml_certify_behaviours_file(cert_behaviours.c_str(), &c)
                                : ctxml_certify_model(cert_model.c_str(), cert_seed, &c);
    if (s != CTXML_OK) return report(s);
    std::printf("eta* = %.6f\nverdict: %s\ninequality value: %.6f (noncontextual bound 2.5)\n", c.eta_star,
                c.contextual ? "contextual" : "not-certified", c.inequality_value);
    if (!cert_out.empty()) s = ctxml_certificate_write(&c, cert_out.c_str());
    return report(s);
  }

  if (*vm) {
    if (vm_kind == "even-dim" && (vm_d < 2 || vm_d % 2 != 0)) {
      std::fprintf(stderr, "verify-measurements: --d must be even and at least 2 for even-dim\n");
      return kExitUsage;
    }
    ctxml_measurement_report r{};
    const auto s = ctxml_verify_measurements(vm_kind.c_str(), vm_d, &r);
    if (s != CTXML_OK) return report(s);
    std::printf("kind: %s\ndim: %zu\nmax |sum O_k|: %.3e\nmax |O_k^2 - I|: %.3e\n", vm_kind.c_str(), r.dim,
                r.max_sum_deviation, r.max_square_deviation);
    return 0;
  }

  if (*rep) {
    const std::string out = resolve_out(rep_out, "reproduce-" + rep_scale);
    std::fprintf(stderr, "reproduce (%s scale, root seed %llu) into %s\n", rep_scale.c_str(),
                 static_cast<unsigned long long>(rep_seed), out.c_str());
    const auto s = ctxml_reproduce(rep_scale.c_str(), rep_seed, out.c_str(), print_progress, nullptr);
    if (s == CTXML_OK) std::printf("wrote %s/summary.json\n", out.c_str());
    return report(s);
  }
  return kExitUsage;
}
