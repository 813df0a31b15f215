#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "kmer/coarsegrain.hpp"
#include "kmer/config.hpp"
#include "kmer/observables.hpp"

namespace kmer {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kSummarySchemaVersion = 1;

// sweep, N, rho, M, event_indicator, then corr_<dx>_<dy> per separation.
std::vector<std::string> measurement_columns(const RunConfig& config);

// One CSV row's worth of measurements. rho, M and the correlations are taken
// over the config's measurement region; N counts every rod in the box.
std::vector<double> measure_frame(const RunConfig& config, long sweep, const RodConfig& rods);

// Shortest round-trip decimal form; "nan" for NaN.
std::string format_number(double v);

struct MeasurementTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // values[column][frame]

  std::size_t frames() const { return values.empty() ? 0 : values.front().size(); }
  // Throws ValidationError if absent.
  std::span<const double> column(const std::string& name) const;
};

MeasurementTable read_measurements(const std::filesystem::path& csv);

struct ObservableSummary {
  std::string name;
  Estimate pooled;
  std::size_t frames = 0;
  std::vector<Estimate> per_chain;
};

struct CorrelationSummary {
  Site separation;
  Estimate truncated;  // <corr> - <rho>^2, jackknife error
};

struct RunSummary {
  std::size_t chains = 0;
  std::size_t frames = 0;
  std::vector<ObservableSummary> observables;
  std::vector<CorrelationSummary> correlations;

  // Throws ValidationError if absent.
  const ObservableSummary& get(const std::string& name) const;
};

// Chains are combined in the order given. Means are exact sums, so the
// pooled point estimates do not depend on that order.
RunSummary summarize(std::span<const MeasurementTable> chains);
std::string summary_to_json(const RunSummary& summary);

struct RunOutputs {
  std::filesystem::path dir;
  std::filesystem::path manifest;
  std::filesystem::path summary_file;
  std::vector<std::filesystem::path> measurements;
  std::vector<std::filesystem::path> traces;
  RunSummary summary;
};

inline constexpr const char* kPartialMarker = "RUN_INCOMPLETE";

// Writes manifest.json, measurements_chain<i>.csv, summary.json and, with
// trace enabled, trace_chain<i>.jsonl.gz into config.output_dir. The marker
// file RUN_INCOMPLETE exists for the duration of the run. Throws IoError if
// the output directory is not writable, before any sampling.
RunOutputs run_experiment(const RunConfig& config);

// Reads each run directory (manifest + CSVs) and writes one row per run to
// `table_csv` and one row per run and separation to `correlations_csv`.
void analyze_runs(std::span<const std::filesystem::path> run_dirs,
                  const std::filesystem::path& table_csv,
                  const std::filesystem::path& correlations_csv);

struct CoarsegrainOutputs {
  std::size_t frames = 0;
  ContourStatistics statistics;
  std::filesystem::path spins_csv;
  std::filesystem::path histogram_csv;
  std::filesystem::path fit_json;
};

// Spin fields (spins.csv), contour-size histogram (contour_histogram.csv) and
// the Peierls fit (peierls_fit.json) for a trace.
CoarsegrainOutputs coarsegrain_trace(const std::filesystem::path& trace,
                                     const std::filesystem::path& out_dir);

}  // namespace kmer
