#include "kmer/kmer.h"

#include <cstring>
#include <fstream>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "kmer/coarsegrain.hpp"
#include "kmer/config.hpp"
#include "kmer/errors.hpp"
#include "kmer/experiment.hpp"
#include "kmer/observables.hpp"
#include "kmer/oracle.hpp"
#include "kmer/plot.hpp"
#include "kmer/sampler.hpp"

struct kmer_chain {
  kmer::Chain chain;
};

struct kmer_run_config {
  kmer::RunConfig config;
};

namespace {

thread_local std::string last_error;

kmer_status fail(kmer_status s, const char* what) {
  last_error = what;
  return s;
}

template <class F>
kmer_status guarded(F&& f) {
  try {
    f();
    return KMER_OK;
  } catch (const kmer::StateSpaceTooLarge& e) {
    return fail(KMER_ERR_TOO_LARGE, e.what());
  } catch (const kmer::RejectedMutation& e) {
    return fail(KMER_ERR_REJECTED, e.what());
  } catch (const kmer::ValidationError& e) {
    return fail(KMER_ERR_VALIDATION, e.what());
  } catch (const kmer::IoError& e) {
    return fail(KMER_ERR_IO, e.what());
  } catch (const std::out_of_range& e) {
    return fail(KMER_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(KMER_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(KMER_ERR_RUNTIME, "unknown error");
  }
}

kmer::BoxSpec to_box(const kmer_box_spec& b) {
  kmer::BoxSpec box{b.width, b.height, b.k,
                    b.containment == KMER_FULLY_CONTAINED ? kmer::Containment::FullyContained
                                                          : kmer::Containment::CenterInBox,
                    b.bc == KMER_BC_PLUS    ? kmer::Boundary::Plus
                    : b.bc == KMER_BC_MINUS ? kmer::Boundary::Minus
                                            : kmer::Boundary::Open};
  box.validate();
  return box;
}

kmer::MoveMix to_mix(const kmer_move_mix* m) {
  if (!m) return {};
  return {m->insert, m->remove, m->translate, m->rotate};
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

#define KMER_REQUIRE(ptr)                                          \
  do {                                                             \
    if (!(ptr)) return fail(KMER_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char* kmer_version(void) { return KMER_VERSION_STRING; }
const char* kmer_last_error(void) { return last_error.c_str(); }
void kmer_string_free(char* s) { std::free(s); }

kmer_move_mix kmer_default_move_mix(void) {
  const kmer::MoveMix m;
  return {m.insert, m.remove, m.translate, m.rotate};
}

kmer_status kmer_regime_epsilon(double z, int32_t k, double eps0, int32_t k0, double* epsilon,
                                int* in_regime) {
  KMER_REQUIRE(epsilon);
  return guarded([&] {
    const auto r = kmer::regime_epsilon(z, k, eps0, k0);
    *epsilon = r.epsilon;
    if (in_regime) *in_regime = r.in_regime ? 1 : 0;
  });
}

kmer_status kmer_in_peel(const kmer_box_spec* box, int32_t x, int32_t y, int* result) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(result);
  return guarded([&] { *result = kmer::in_peel({x, y}, to_box(*box)) ? 1 : 0; });
}

kmer_status kmer_partition_polynomial(const kmer_box_spec* box, uint64_t* coefficients,
                                      size_t capacity, size_t* length) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(length);
  return guarded([&] {
    const auto p = kmer::partition_polynomial(to_box(*box));
    *length = p.coefficients.size();
    if (!coefficients) return;
    if (capacity < p.coefficients.size()) throw kmer::ValidationError("coefficient buffer too small");
    std::copy(p.coefficients.begin(), p.coefficients.end(), coefficients);
  });
}

kmer_status kmer_enumerate_json(const kmer_box_spec* box, char** json_out) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(json_out);
  return guarded([&] {
    const kmer::BoxSpec b = to_box(*box);
    const auto p = kmer::partition_polynomial(b);
    nlohmann::ordered_json j;
    if (b.is_square())
      j["L"] = b.width;
    else
      j["L"] = nullptr;
    j["k"] = b.k;
    j["bc"] = std::string(kmer::to_string(b.bc));
    j["containment"] = std::string(kmer::to_string(b.containment));
    j["coefficients"] = p.coefficients;
    if (!b.is_square()) {
      j["width"] = b.width;
      j["height"] = b.height;
    }
    *json_out = dup(j.dump());
  });
}

kmer_status kmer_exact_rod_count(const kmer_box_spec* box, double z, double* mean) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(mean);
  return guarded([&] {
    *mean = kmer::exact_expectation(to_box(*box), z,
                                    [](const kmer::RodConfig& c) { return static_cast<double>(c.size()); });
  });
}

kmer_status kmer_transition_residual(const kmer_box_spec* box, double z, const kmer_move_mix* mix,
                                     double* residual) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(residual);
  return guarded([&] {
    kmer::SamplerParams params;
    params.z = z;
    params.mix = to_mix(mix);
    params.validate();
    *residual = kmer::exact_transition_check(to_box(*box), z, kmer::sampler_kernel(params)).residual;
  });
}

kmer_status kmer_chain_create(const kmer_box_spec* box, double z, uint64_t seed, uint64_t chain_index,
                              const kmer_move_mix* mix, kmer_chain** out) {
  KMER_REQUIRE(box);
  KMER_REQUIRE(out);
  return guarded([&] {
    kmer::SamplerParams params;
    params.z = z;
    params.seed = seed;
    params.mix = to_mix(mix);
    *out = new kmer_chain{kmer::Chain(to_box(*box), params, chain_index)};
  });
}

void kmer_chain_destroy(kmer_chain* chain) { delete chain; }

kmer_status kmer_chain_sweep(kmer_chain* chain, int64_t sweeps) {
  KMER_REQUIRE(chain);
  return guarded([&] {
    for (int64_t i = 0; i < sweeps; ++i) chain->chain.sweep();
  });
}

kmer_status kmer_chain_step(kmer_chain* chain, int64_t moves) {
  KMER_REQUIRE(chain);
  return guarded([&] {
    for (int64_t i = 0; i < moves; ++i) chain->chain.step();
  });
}

kmer_status kmer_chain_rod_count(const kmer_chain* chain, size_t* n) {
  KMER_REQUIRE(chain);
  KMER_REQUIRE(n);
  *n = chain->chain.config().size();
  return KMER_OK;
}

kmer_status kmer_chain_order_parameter(const kmer_chain* chain, double* m) {
  KMER_REQUIRE(chain);
  KMER_REQUIRE(m);
  *m = kmer::order_parameter(chain->chain.config());
  return KMER_OK;
}

kmer_status kmer_chain_density(const kmer_chain* chain, double* rho) {
  KMER_REQUIRE(chain);
  KMER_REQUIRE(rho);
  *rho = kmer::density(chain->chain.config());
  return KMER_OK;
}

kmer_status kmer_chain_rods(const kmer_chain* chain, kmer_rod* rods, size_t capacity, size_t* n) {
  KMER_REQUIRE(chain);
  KMER_REQUIRE(n);
  const auto sorted = chain->chain.config().sorted_rods();
  *n = sorted.size();
  if (!rods) return KMER_OK;
  const size_t m = std::min(capacity, sorted.size());
  for (size_t i = 0; i < m; ++i)
    rods[i] = {sorted[i].orientation == kmer::Orientation::Horizontal ? KMER_HORIZONTAL : KMER_VERTICAL,
               sorted[i].center.x, sorted[i].center.y};
  if (capacity < sorted.size()) return fail(KMER_ERR_BUFFER_TOO_SMALL, "rod buffer too small");
  return KMER_OK;
}

kmer_status kmer_chain_apply_rod(kmer_chain* chain, kmer_rod rod) {
  KMER_REQUIRE(chain);
  return guarded([&] {
    kmer::RodConfig c = chain->chain.config();
    c.apply({rod.orientation == KMER_VERTICAL ? kmer::Orientation::Vertical : kmer::Orientation::Horizontal,
             {rod.x, rod.y}});
    chain->chain = kmer::Chain(std::move(c), chain->chain.params());
  });
}

kmer_status kmer_chain_spin_field(const kmer_chain* chain, int8_t* spins, size_t capacity,
                                  int32_t* tiles_x, int32_t* tiles_y) {
  KMER_REQUIRE(chain);
  KMER_REQUIRE(tiles_x);
  KMER_REQUIRE(tiles_y);
  return guarded([&] {
    const kmer::SpinField f = kmer::tile_spins(chain->chain.config());
    *tiles_x = f.tiles_x();
    *tiles_y = f.tiles_y();
    if (!spins) return;
    if (capacity < f.tile_count()) throw kmer::ValidationError("spin buffer too small");
    std::copy(f.spins().begin(), f.spins().end(), spins);
  });
}

kmer_status kmer_run_config_load(const char* path, kmer_run_config** out) {
  KMER_REQUIRE(path);
  KMER_REQUIRE(out);
  return guarded([&] { *out = new kmer_run_config{kmer::load_config(path)}; });
}

kmer_status kmer_run_config_parse(const char* json_text, kmer_run_config** out) {
  KMER_REQUIRE(json_text);
  KMER_REQUIRE(out);
  return guarded([&] { *out = new kmer_run_config{kmer::parse_config_text(json_text)}; });
}

void kmer_run_config_destroy(kmer_run_config* config) { delete config; }

kmer_status kmer_run_config_set_seed(kmer_run_config* config, uint64_t seed) {
  KMER_REQUIRE(config);
  config->config.sampler.seed = seed;
  return KMER_OK;
}

kmer_status kmer_run_config_set_chains(kmer_run_config* config, int32_t chains) {
  KMER_REQUIRE(config);
  if (chains < 1) return fail(KMER_ERR_VALIDATION, "chains: must be >= 1");
  config->config.chains = chains;
  return KMER_OK;
}

kmer_status kmer_run_config_set_output_dir(kmer_run_config* config, const char* dir) {
  KMER_REQUIRE(config);
  KMER_REQUIRE(dir);
  if (!*dir) return fail(KMER_ERR_VALIDATION, "output_dir: must not be empty");
  config->config.output_dir = dir;
  return KMER_OK;
}

kmer_status kmer_run_config_set_trace(kmer_run_config* config, int enabled) {
  KMER_REQUIRE(config);
  config->config.trace = enabled != 0;
  return KMER_OK;
}

kmer_status kmer_run_config_to_json(const kmer_run_config* config, char** json_out) {
  KMER_REQUIRE(config);
  KMER_REQUIRE(json_out);
  return guarded([&] { *json_out = dup(kmer::serialize_config(config->config)); });
}

kmer_status kmer_run_experiment(const kmer_run_config* config, char** summary_json) {
  KMER_REQUIRE(config);
  return guarded([&] {
    const auto out = kmer::run_experiment(config->config);
    if (summary_json) *summary_json = dup(kmer::summary_to_json(out.summary));
  });
}

kmer_status kmer_coarsegrain_trace(const char* trace_path, const char* out_dir, char** fit_json) {
  KMER_REQUIRE(trace_path);
  KMER_REQUIRE(out_dir);
  return guarded([&] {
    const auto out = kmer::coarsegrain_trace(trace_path, out_dir);
    if (fit_json) {
      std::ifstream in(out.fit_json);
      std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      *fit_json = dup(text);
    }
  });
}

kmer_status kmer_analyze(const char* const* run_dirs, size_t count, const char* table_csv,
                         const char* correlations_csv) {
  KMER_REQUIRE(table_csv);
  KMER_REQUIRE(correlations_csv);
  if (count > 0) KMER_REQUIRE(run_dirs);
  return guarded([&] {
    std::vector<std::filesystem::path> dirs(run_dirs, run_dirs + count);
    kmer::analyze_runs(dirs, table_csv, correlations_csv);
  });
}

kmer_status kmer_plot(const char* const* csv_paths, size_t count, const char* kind, const char* x,
                      const char* y, const char* yerr, const char* group, int log_y,
                      const char* svg_out) {
  KMER_REQUIRE(kind);
  KMER_REQUIRE(svg_out);
  if (count > 0) KMER_REQUIRE(csv_paths);
  return guarded([&] {
    kmer::PlotRequest req = kmer::plot_preset(kind);
    if (x) req.x = x;
    if (y) req.y = y;
    if (yerr) req.yerr = yerr;
    if (group) req.group = group;
    if (log_y >= 0) req.log_y = log_y != 0;
    std::vector<std::filesystem::path> paths(csv_paths, csv_paths + count);
    kmer::emit_plot(paths, req, svg_out);
  });
}

}  // extern "C"
