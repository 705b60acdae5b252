#include "ctxml/ctxml.h"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxml/contextuality.hpp"
#include "ctxml/error.hpp"
#include "ctxml/evaluation.hpp"
#include "ctxml/experiment.hpp"
#include "ctxml/io.hpp"
#include "ctxml/model.hpp"
#include "ctxml/quantum.hpp"
#include "ctxml/training.hpp"

struct ctxml_model {
  ctxml::Model model;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
ctxml_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return CTXML_OK;
  } catch (const ctxml::DomainError& e) {
    g_last_error = e.what();
    return CTXML_ERR_DOMAIN;
  } catch (const ctxml::IoError& e) {
    g_last_error = e.what();
    return CTXML_ERR_IO;
  } catch (const ctxml::ConfigError& e) {
    g_last_error = e.what();
    return CTXML_ERR_CONFIG;
  } catch (const ctxml::SolverError& e) {
    g_last_error = e.what();
    return CTXML_ERR_SOLVER;
  } catch (const ctxml::NumericError& e) {
    g_last_error = e.what();
    return CTXML_ERR_NUMERIC;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CTXML_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CTXML_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CTXML_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw ctxml::DomainError(std::string(what) + " must not be null");
}

ctxml::Strategy strategy_from(const double* s) {
  require(s, "strategy");
  std::array<std::array<double, 3>, 3> rows{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rows[r][c] = s[r * 3 + c];
  }
  return ctxml::Strategy(rows);
}

void write_behaviour(const ctxml::Behaviour& b, double* out) {
  for (int k = 0; k < 3; ++k) out[k] = b[k];
}

void fill_certificate(const ctxml::ContextualityCertificate& c, std::size_t n, ctxml_certificate* out) {
  out->eta_star = c.eta_star;
  out->inequality_value = c.inequality_value;
  out->contextual = c.verdict == ctxml::Verdict::Contextual ? 1 : 0;
  out->n_behaviours = n;
}

constexpr double kCertifyBiasTol = 1e-6;
constexpr std::size_t kCertifyGridSize = 200;

}  // namespace

extern "C" {

const char* ctxml_last_error(void) { return g_last_error.c_str(); }

const char* ctxml_status_name(ctxml_status status) {
  switch (status) {
    case CTXML_OK: return "ok";
    case CTXML_ERR_DOMAIN: return "domain error";
    case CTXML_ERR_IO: return "i/o error";
    case CTXML_ERR_CONFIG: return "config error";
    case CTXML_ERR_SOLVER: return "solver error";
    case CTXML_ERR_NUMERIC: return "numeric error";
    case CTXML_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ctxml_status ctxml_model_load(const char* path, ctxml_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new ctxml_model{ctxml::load_model(path)};
  });
}

void ctxml_model_free(ctxml_model* model) { delete model; }

ctxml_status ctxml_model_param_count(const ctxml_model* model, size_t* out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = model->model.param_count();
  });
}

ctxml_status ctxml_model_kind(const ctxml_model* model, char* out, size_t capacity) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    if (capacity == 0) throw ctxml::DomainError("capacity must be positive");
    const std::string kind = ctxml::to_string(model->model.kind());
    const std::size_t n = std::min(kind.size(), capacity - 1);
    std::memcpy(out, kind.data(), n);
    out[n] = '\0';
  });
}

ctxml_status ctxml_model_behaviour(const ctxml_model* model, const double strategy[9], double out[3]) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    write_behaviour(model->model.behaviour(strategy_from(strategy)), out);
  });
}

ctxml_status ctxml_oracle_marginals(const double strategy[9], double out[3]) {
  return guarded([&] {
    require(out, "out");
    write_behaviour(ctxml::oracle_marginals(strategy_from(strategy)), out);
  });
}

ctxml_status ctxml_gen_data(size_t n, uint64_t seed, const char* out_path) {
  return guarded([&] {
    require(out_path, "out_path");
    if (n == 0) throw ctxml::DomainError("n must be at least 1");
    ctxml::Rng rng(seed);
    ctxml::write_dataset(out_path, ctxml::sample_dataset(rng, n, seed));
  });
}

ctxml_status ctxml_train(const char* config_path, const char* data_path, const char* out_dir,
                         const char* overrides_json) {
  return guarded([&] {
    require(config_path, "config_path");
    require(data_path, "data_path");
    require(out_dir, "out_dir");
    ctxml::TrainConfig config = ctxml::load_train_config(config_path);
    if (overrides_json != nullptr) config = ctxml::apply_overrides(config, overrides_json);
    const ctxml::Dataset data = ctxml::read_dataset(data_path);
    const std::filesystem::path out(out_dir);
    ctxml::write_text_file(out / "config.json", ctxml::train_config_to_text(config));

    const ctxml::TestSet test = ctxml::make_test_set(config.n_test, config.test_seed);
    const ctxml::KlEvaluator kl = [&test](const ctxml::Model& m) { return ctxml::average_kl(m, test).avg_kl; };
    ctxml::MultiSeedResult result = ctxml::multi_seed_run(config, data, kl);

    ctxml::ModelRunReport run;
    run.label = ctxml::to_string(config.model_kind);
    run.kind = config.model_kind;
    run.layers = config.layers;
    run.blocks = config.model_kind == ctxml::ModelKind::Surrogate ? 0 : config.blocks;
    run.test_seed = config.test_seed;
    for (auto& r : result.runs) {
      ctxml::save_model(out / run.label / ("model_seed_" + std::to_string(r.trace.seed) + ".json"), r.model);
      run.traces.push_back(std::move(r.trace));
    }
    ctxml::emit_report(std::span<const ctxml::ModelRunReport>(&run, 1), out);
  });
}

ctxml_status ctxml_eval(const char* model_path, size_t n_test, uint64_t test_seed, const char* behaviours_out,
                        ctxml_eval_report* out) {
  return guarded([&] {
    require(model_path, "model_path");
    require(out, "out");
    const ctxml::Model model = ctxml::load_model(model_path);
    const ctxml::TestSet test = ctxml::make_test_set(n_test, test_seed);
    const ctxml::EvalReport r = ctxml::average_kl(model, test);
    if (behaviours_out != nullptr) {
      std::vector<ctxml::Behaviour> bs;
      bs.reserve(test.features.size());
      for (const auto& f : test.features) bs.push_back(model.behaviour(f));
      ctxml::write_behaviours(behaviours_out, bs);
    }
    out->n_test = r.n_test;
    out->avg_kl = r.avg_kl;
    for (int k = 0; k < 3; ++k) out->per_task_kl[k] = r.per_task_kl[k];
    out->test_seed = r.test_seed;
  });
}

ctxml_status ctxml_certify_behaviours(const double* behaviours, size_t n, double bias_tol,
                                      ctxml_certificate* out) {
  return guarded([&] {
    require(behaviours, "behaviours");
    require(out, "out");
    if (n == 0) throw ctxml::DomainError("at least one behaviour is required");
    std::vector<ctxml::Behaviour> bs(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) bs[i].p[k] = behaviours[i * 3 + k];
    }
    fill_certificate(ctxml::certify(bs, bias_tol), n, out);
  });
}

ctxml_status ctxml_certify_behaviours_file(const char* path, ctxml_certificate* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto bs = ctxml::read_behaviours(path);
    if (bs.empty()) throw ctxml::DomainError(std::string(path) + ": no behaviours");
    fill_certificate(ctxml::certify(bs, kCertifyBiasTol), bs.size(), out);
  });
}

ctxml_status ctxml_certify_model(const char* model_path, uint64_t grid_seed, ctxml_certificate* out) {
  return guarded([&] {
    require(model_path, "model_path");
    require(out, "out");
    const ctxml::Model model = ctxml::load_model(model_path);
    std::vector<ctxml::Behaviour> bs;
    for (const auto& a : ctxml::extremal_action_triples()) {
      bs.push_back(model.behaviour(ctxml::Strategy::deterministic(a)));
    }
    ctxml::Rng rng(grid_seed);
    for (std::size_t i = 0; i < kCertifyGridSize; ++i) bs.push_back(model.behaviour(ctxml::sample_strategy(rng)));
    fill_certificate(ctxml::certify(bs, kCertifyBiasTol), bs.size(), out);
  });
}

ctxml_status ctxml_certificate_write(const ctxml_certificate* cert, const char* path) {
  return guarded([&] {
    require(cert, "cert");
    require(path, "path");
    nlohmann::ordered_json j;
    j["eta_star"] = cert->eta_star;
    j["verdict"] = cert->contextual ? "contextual" : "not-certified";
    j["inequality_value"] = cert->inequality_value;
    j["noncontextual_bound"] = ctxml::kNoncontextualBound;
    j["n_behaviours"] = cert->n_behaviours;
    ctxml::write_text_file(path, j.dump(2) + "\n");
  });
}

ctxml_status ctxml_nc_feasible(const double targets[18], int* feasible) {
  return guarded([&] {
    require(targets, "targets");
    require(feasible, "feasible");
    std::array<ctxml::Behaviour, 6> t{};
    for (int i = 0; i < 6; ++i) {
      for (int k = 0; k < 3; ++k) t[i].p[k] = targets[i * 3 + k];
    }
    *feasible = ctxml::nc_feasible(t).feasible ? 1 : 0;
  });
}

ctxml_status ctxml_verify_measurements(const char* kind, size_t d, ctxml_measurement_report* out) {
  return guarded([&] {
    require(kind, "kind");
    require(out, "out");
    std::array<ctxml::Observable, 3> obs;
    const std::string k(kind);
    if (k == "trine") {
      obs = ctxml::build_trine_observables();
    } else if (k == "even-dim") {
      obs = ctxml::build_even_dim_triple(d);
    } else {
      throw ctxml::DomainError("unknown measurement kind '" + k + "' (expected trine or even-dim)");
    }
    const std::size_t dim = obs[0].dim();
    const ctxml::Matrix id = ctxml::Matrix::identity(dim);
    const ctxml::Matrix sum = obs[0].matrix() + obs[1].matrix() + obs[2].matrix();
    double square_dev = 0.0;
    for (const auto& o : obs) square_dev = std::max(square_dev, (o.matrix() * o.matrix() - id).max_abs());
    out->dim = dim;
    out->max_sum_deviation = sum.max_abs();
    out->max_square_deviation = square_dev;
  });
}

ctxml_status ctxml_reproduce(const char* scale, uint64_t root_seed, const char* out_dir,
                             ctxml_progress_fn progress, void* user) {
  return guarded([&] {
    require(scale, "scale");
    require(out_dir, "out_dir");
    ctxml::ProgressFn fn;
    if (progress != nullptr) {
      fn = [progress, user](std::string_view msg) { progress(std::string(msg).c_str(), user); };
    }
    ctxml::reproduce(ctxml::ExperimentScale::parse(scale), root_seed, out_dir, fn);
  });
}

}  // extern "C"
