/* C interface to the hard-rod lattice simulator.
 *
 * Every function returns a kmer_status. On failure, kmer_last_error() holds
 * a message for the calling thread until its next failing call. Strings
 * returned through char** out-parameters are owned by the caller and must be
 * released with kmer_string_free. Handles are opaque; destroy functions
 * accept NULL.
 */
#ifndef KMER_KMER_H
#define KMER_KMER_H

#include <stddef.h>
#include <stdint.h>

#if defined(KMER_BUILDING_LIBRARY)
#define KMER_API __attribute__((visibility("default")))
#else
#define KMER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kmer_status {
  KMER_OK = 0,
  KMER_ERR_VALIDATION = 1,     /* bad input, violated precondition */
  KMER_ERR_RUNTIME = 2,        /* failure during compute */
  KMER_ERR_NULL_ARGUMENT = 3,
  KMER_ERR_TOO_LARGE = 4,      /* exact enumeration refused */
  KMER_ERR_IO = 5,
  KMER_ERR_REJECTED = 6,       /* mutation refused, state unchanged */
  KMER_ERR_BUFFER_TOO_SMALL = 7
} kmer_status;

typedef enum kmer_orientation { KMER_HORIZONTAL = 0, KMER_VERTICAL = 1 } kmer_orientation;
typedef enum kmer_containment { KMER_CENTER_IN_BOX = 0, KMER_FULLY_CONTAINED = 1 } kmer_containment;
typedef enum kmer_boundary { KMER_BC_OPEN = 0, KMER_BC_PLUS = 1, KMER_BC_MINUS = 2 } kmer_boundary;

typedef struct kmer_box_spec {
  int32_t width;
  int32_t height;
  int32_t k;
  kmer_containment containment;
  kmer_boundary bc;
} kmer_box_spec;

typedef struct kmer_rod {
  kmer_orientation orientation;
  int32_t x;
  int32_t y;
} kmer_rod;

typedef struct kmer_move_mix {
  double insert;
  double remove;
  double translate;
  double rotate;
} kmer_move_mix;

typedef struct kmer_chain kmer_chain;
typedef struct kmer_run_config kmer_run_config;

KMER_API const char* kmer_version(void);
KMER_API const char* kmer_last_error(void);
KMER_API void kmer_string_free(char* s);
KMER_API kmer_move_mix kmer_default_move_mix(void);

/* Lattice geometry. */
KMER_API kmer_status kmer_regime_epsilon(double z, int32_t k, double eps0, int32_t k0,
                                         double* epsilon, int* in_regime);
KMER_API kmer_status kmer_in_peel(const kmer_box_spec* box, int32_t x, int32_t y, int* result);

/* Exact enumeration on small boxes. coefficients may be NULL to query the
 * length; otherwise it must hold `capacity` entries. */
KMER_API kmer_status kmer_partition_polynomial(const kmer_box_spec* box, uint64_t* coefficients,
                                               size_t capacity, size_t* length);
KMER_API kmer_status kmer_enumerate_json(const kmer_box_spec* box, char** json_out);
KMER_API kmer_status kmer_exact_rod_count(const kmer_box_spec* box, double z, double* mean);
KMER_API kmer_status kmer_transition_residual(const kmer_box_spec* box, double z,
                                              const kmer_move_mix* mix, double* residual);

/* Markov chains. */
KMER_API kmer_status kmer_chain_create(const kmer_box_spec* box, double z, uint64_t seed,
                                       uint64_t chain_index, const kmer_move_mix* mix,
                                       kmer_chain** out);
KMER_API void kmer_chain_destroy(kmer_chain* chain);
KMER_API kmer_status kmer_chain_sweep(kmer_chain* chain, int64_t sweeps);
KMER_API kmer_status kmer_chain_step(kmer_chain* chain, int64_t moves);
KMER_API kmer_status kmer_chain_rod_count(const kmer_chain* chain, size_t* n);
KMER_API kmer_status kmer_chain_order_parameter(const kmer_chain* chain, double* m);
KMER_API kmer_status kmer_chain_density(const kmer_chain* chain, double* rho);
/* Copies up to `capacity` rods in canonical order; *n receives the total. */
KMER_API kmer_status kmer_chain_rods(const kmer_chain* chain, kmer_rod* rods, size_t capacity,
                                     size_t* n);
/* Applies a rod to the chain's configuration; KMER_ERR_REJECTED if incompatible. */
KMER_API kmer_status kmer_chain_apply_rod(kmer_chain* chain, kmer_rod rod);
KMER_API kmer_status kmer_chain_spin_field(const kmer_chain* chain, int8_t* spins, size_t capacity,
                                           int32_t* tiles_x, int32_t* tiles_y);

/* Run configuration and experiments. load accepts a config or manifest. */
KMER_API kmer_status kmer_run_config_load(const char* path, kmer_run_config** out);
KMER_API kmer_status kmer_run_config_parse(const char* json_text, kmer_run_config** out);
KMER_API void kmer_run_config_destroy(kmer_run_config* config);
KMER_API kmer_status kmer_run_config_set_seed(kmer_run_config* config, uint64_t seed);
KMER_API kmer_status kmer_run_config_set_chains(kmer_run_config* config, int32_t chains);
KMER_API kmer_status kmer_run_config_set_output_dir(kmer_run_config* config, const char* dir);
KMER_API kmer_status kmer_run_config_set_trace(kmer_run_config* config, int enabled);
KMER_API kmer_status kmer_run_config_to_json(const kmer_run_config* config, char** json_out);
KMER_API kmer_status kmer_run_experiment(const kmer_run_config* config, char** summary_json);

/* File-level tools. */
KMER_API kmer_status kmer_coarsegrain_trace(const char* trace_path, const char* out_dir,
                                            char** fit_json);
KMER_API kmer_status kmer_analyze(const char* const* run_dirs, size_t count, const char* table_csv,
                                  const char* correlations_csv);
/* kind: order_vs_z, event_vs_zk2, correlation, contour_histogram or custom.
 * x/y/yerr/group override the preset columns when non-NULL; log_y < 0 keeps
 * the preset scale. */
KMER_API kmer_status kmer_plot(const char* const* csv_paths, size_t count, const char* kind,
                               const char* x, const char* y, const char* yerr, const char* group,
                               int log_y, const char* svg_out);

#ifdef __cplusplus
}
#endif

#endif /* KMER_KMER_H */
