#include "kmer/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_io.hpp"
#include "kmer/errors.hpp"
#include "kmer/trace.hpp"

namespace kmer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string corr_column(Site d) { return "corr_" + std::to_string(d.x) + "_" + std::to_string(d.y); }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json estimate_json(const Estimate& e) {
  return {{"mean", std::isfinite(e.value) ? json(e.value) : json(nullptr)},
          {"error", std::isfinite(e.error) ? json(e.error) : json(nullptr)}};
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s) {
  if (s == "nan" || s.empty()) return std::nan("");
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ValidationError("csv: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::string> measurement_columns(const RunConfig& config) {
  std::vector<std::string> cols = {"sweep", "N", "rho", "M", "event_indicator"};
  for (Site d : config.observables.separations) cols.push_back(corr_column(d));
  return cols;
}

std::vector<double> measure_frame(const RunConfig& config, long sweep, const RodConfig& rods) {
  const Region region = config.measurement_region();
  std::vector<double> row;
  row.reserve(5 + config.observables.separations.size());
  row.push_back(static_cast<double>(sweep));
  row.push_back(static_cast<double>(rods.size()));
  row.push_back(density(rods, region));
  row.push_back(order_parameter(rods, region));
  row.push_back(config.observables.event
                    ? (event_indicator(rods, *config.observables.event) ? 1.0 : 0.0)
                    : std::nan(""));
  if (!config.observables.separations.empty()) {
    const auto n = center_indicators(rods);
    const int w = rods.box().width;
    for (Site d : config.observables.separations) {
      const int xl = std::max(region.x0, region.x0 - d.x), xh = std::min(region.x1, region.x1 - d.x);
      const int yl = std::max(region.y0, region.y0 - d.y), yh = std::min(region.y1, region.y1 - d.y);
      long hits = 0;
      for (int y = yl; y < yh; ++y)
        for (int x = xl; x < xh; ++x)
          hits += n[static_cast<std::size_t>(y) * w + x] & n[static_cast<std::size_t>(y + d.y) * w + x + d.x];
      const long pairs = static_cast<long>(xh - xl) * (yh - yl);
      row.push_back(pairs > 0 ? static_cast<double>(hits) / static_cast<double>(pairs) : std::nan(""));
    }
  }
  return row;
}

std::span<const double> MeasurementTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return values[i];
  throw ValidationError("measurements: missing column " + name);
}

MeasurementTable read_measurements(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv.string());
  MeasurementTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("measurements: empty file " + csv.string());
  t.columns = split_csv(line);
  if (t.columns.size() < 5 || t.columns[0] != "sweep")
    throw ValidationError("measurements: unexpected header in " + csv.string());
  t.values.assign(t.columns.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != t.columns.size())
      throw ValidationError("measurements: ragged row in " + csv.string());
    for (std::size_t i = 0; i < cells.size(); ++i) t.values[i].push_back(parse_number(cells[i]));
  }
  return t;
}

const ObservableSummary& RunSummary::get(const std::string& name) const {
  for (const auto& o : observables)
    if (o.name == name) return o;
  throw ValidationError("summary: no observable " + name);
}

RunSummary summarize(std::span<const MeasurementTable> chains) {
  if (chains.empty()) throw ValidationError("summarize: no chains");
  const auto& cols = chains.front().columns;
  for (const auto& c : chains)
    if (c.columns != cols) throw ValidationError("summarize: chains have different columns");
  RunSummary s;
  s.chains = chains.size();
  for (const auto& c : chains) s.frames += c.frames();

  for (std::size_t col = 1; col < cols.size(); ++col) {
    ObservableSummary o;
    o.name = cols[col];
    ExactSum total;
    double var = 0.0;
    bool error_known = true;
    for (const auto& c : chains) {
      const auto& v = c.values[col];
      Estimate e{std::nan(""), std::nan("")};
      ExactSum chain_sum;
      for (double x : v) chain_sum.add(x);
      if (!v.empty()) e.value = chain_sum.value() / static_cast<double>(v.size());
      if (v.size() >= kMinSeriesLength && std::isfinite(e.value)) {
        e.error = blocking_error(v).standard_error;
        var += static_cast<double>(v.size()) * static_cast<double>(v.size()) * e.error * e.error;
      } else {
        error_known = false;
      }
      total.merge(chain_sum);
      o.per_chain.push_back(e);
      o.frames += v.size();
    }
    const double n = static_cast<double>(o.frames);
    o.pooled.value = o.frames ? total.value() / n : std::nan("");
    o.pooled.error = error_known && o.frames ? std::sqrt(var) / n : std::nan("");
    s.observables.push_back(std::move(o));
  }

  // Truncated correlations: <corr_d> - <rho>^2 with blocks cut inside chains.
  std::size_t rho_col = 2;
  for (std::size_t col = 5; col < cols.size(); ++col) {
    const std::string& name = cols[col];
    CorrelationSummary cs;
    std::sscanf(name.c_str(), "corr_%d_%d", &cs.separation.x, &cs.separation.y);
    std::vector<BlockSums> blocks;
    for (const auto& c : chains) {
      const std::size_t n = c.frames();
      const std::size_t nb = std::clamp<std::size_t>(n / 4, 1, 16);
      for (std::size_t b = 0; b < nb; ++b) {
        BlockSums bs{{0.0, 0.0}, 0.0};
        for (std::size_t i = b * n / nb; i < (b + 1) * n / nb; ++i) {
          bs.sums[0] += c.values[col][i];
          bs.sums[1] += c.values[rho_col][i];
          bs.frames += 1.0;
        }
        if (bs.frames > 0) blocks.push_back(bs);
      }
    }
    auto trunc = [](std::span<const double> v, double f) {
      const double rho = v[1] / f;
      return v[0] / f - rho * rho;
    };
    if (blocks.size() >= 2) {
      const JackknifeResult j = jackknife(blocks, trunc);
      cs.truncated = {j.estimate, j.standard_error};
    } else {
      cs.truncated = {std::nan(""), std::nan("")};
    }
    s.correlations.push_back(cs);
  }
  return s;
}

std::string summary_to_json(const RunSummary& s) {
  json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["chains"] = s.chains;
  j["frames"] = s.frames;
  j["observables"] = json::object();
  for (const auto& o : s.observables) {
    json e = estimate_json(o.pooled);
    e["frames"] = o.frames;
    e["per_chain"] = json::array();
    for (const auto& c : o.per_chain) e["per_chain"].push_back(estimate_json(c));
    j["observables"][o.name] = e;
  }
  j["truncated_correlations"] = json::array();
  for (const auto& c : s.correlations) {
    json e = estimate_json(c.truncated);
    e["dx"] = c.separation.x;
    e["dy"] = c.separation.y;
    j["truncated_correlations"].push_back(e);
  }
  return j.dump(2) + "\n";
}

RunOutputs run_experiment(const RunConfig& config) {
  config.validate();
  RunOutputs out;
  out.dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  const fs::path marker = out.dir / kPartialMarker;
  {
    std::ofstream probe(marker);
    if (!probe) throw IoError("output_dir: " + out.dir.string() + " is not writable");
    probe << "run started " << utc_now() << "\n";
  }
  const std::string started = utc_now();
  const auto columns = measurement_columns(config);
  std::string header;
  for (std::size_t i = 0; i < columns.size(); ++i) header += (i ? "," : "") + columns[i];
  header += '\n';

  const auto chains = static_cast<std::size_t>(config.chains);
  std::vector<MeasurementTable> tables(chains);
  std::vector<MoveCounters> counters(chains);
  std::vector<std::exception_ptr> errors(chains);
  for (std::size_t c = 0; c < chains; ++c) {
    out.measurements.push_back(out.dir / ("measurements_chain" + std::to_string(c) + ".csv"));
    if (config.trace) out.traces.push_back(out.dir / ("trace_chain" + std::to_string(c) + ".jsonl.gz"));
  }

  auto work = [&](std::size_t c) {
    try {
      std::ofstream csv(out.measurements[c], std::ios::binary);
      if (!csv) throw IoError("cannot write " + out.measurements[c].string());
      csv << header;
      std::unique_ptr<TraceWriter> trace;
      if (config.trace) trace = std::make_unique<TraceWriter>(out.traces[c], config.box, c);
      MeasurementTable& t = tables[c];
      t.columns = columns;
      t.values.assign(columns.size(), {});
      std::string line;
      const ChainRun run = run_chain(config.box, config.sampler, c, [&](long sweep, const RodConfig& rods) {
        const auto row = measure_frame(config, sweep, rods);
        line.clear();
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) line += ',';
          line += format_number(row[i]);
          t.values[i].push_back(row[i]);
        }
        line += '\n';
        csv << line;
        if (trace) trace->write(sweep, rods);
      });
      counters[c] = run.counters;
      if (trace) trace->close();
      csv.close();
      if (!csv) throw IoError("write failed for " + out.measurements[c].string());
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(chains, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t c; (c = next.fetch_add(1)) < chains;) work(c);
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  out.summary = summarize(tables);
  out.summary_file = out.dir / "summary.json";
  write_text(out.summary_file, summary_to_json(out.summary));

  json manifest;
  manifest["manifest_schema_version"] = kManifestSchemaVersion;
  manifest["code_version"] = KMER_VERSION_STRING;
  manifest["config"] = detail::config_to_json(config);
  manifest["started_at"] = started;
  manifest["finished_at"] = utc_now();
  manifest["columns"] = columns;
  manifest["chains"] = json::array();
  for (std::size_t c = 0; c < chains; ++c) {
    const MoveCounters& m = counters[c];
    json entry = {{"index", c},
                  {"seed", config.sampler.seed},
                  {"stream", c},
                  {"frames", tables[c].frames()},
                  {"measurements", out.measurements[c].filename().string()},
                  {"acceptance",
                   {{"insert", m.acceptance_rate(MoveKind::Insert)},
                    {"delete", m.acceptance_rate(MoveKind::Delete)},
                    {"translate", m.acceptance_rate(MoveKind::Translate)},
                    {"rotate", m.acceptance_rate(MoveKind::Rotate)},
                    {"overall", m.overall_rate()}}}};
    if (config.trace) entry["trace"] = out.traces[c].filename().string();
    manifest["chains"].push_back(entry);
  }
  out.manifest = out.dir / "manifest.json";
  write_text(out.manifest, manifest.dump(2) + "\n");
  fs::remove(marker, ec);
  return out;
}

void analyze_runs(std::span<const fs::path> run_dirs, const fs::path& table_csv,
                  const fs::path& correlations_csv) {
  if (run_dirs.empty()) throw ValidationError("analyze: no run directories given");
  std::ostringstream table, corr;
  table << "run,L,width,height,k,bc,z,zk,zk2,epsilon,chains,frames,N,N_err,rho,rho_err,M,M_err,"
           "event,event_err,log_event,log_event_err\n";
  corr << "run,z,bc,dx,dy,separation,truncated,truncated_err,abs_truncated\n";
  for (const fs::path& dir : run_dirs) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("analyze: no manifest.json in " + dir.string());
    json manifest;
    try {
      manifest = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError("analyze: bad manifest in " + dir.string() + ": " + e.what());
    }
    const RunConfig cfg = detail::config_from_json(manifest.at("config"));
    std::vector<MeasurementTable> tables;
    for (const auto& c : manifest.at("chains"))
      tables.push_back(read_measurements(dir / c.at("measurements").get<std::string>()));
    const RunSummary s = summarize(tables);
    const std::string run = dir.filename().empty() ? dir.parent_path().filename().string()
                                                   : dir.filename().string();
    const double z = cfg.sampler.z;
    const double k = cfg.box.k;
    const auto& ev = s.get("event_indicator").pooled;
    const double log_ev = ev.value > 0 ? std::log(ev.value) : std::nan("");
    const double log_ev_err = ev.value > 0 ? ev.error / ev.value : std::nan("");
    table << run << ',' << (cfg.box.is_square() ? cfg.box.width : 0) << ',' << cfg.box.width << ','
          << cfg.box.height << ',' << cfg.box.k << ',' << to_string(cfg.box.bc) << ','
          << format_number(z) << ',' << format_number(z * k) << ',' << format_number(z * k * k) << ','
          << format_number(regime_epsilon(z, cfg.box.k, 0.0, 0).epsilon) << ',' << s.chains << ','
          << s.frames;
    for (const char* name : {"N", "rho", "M"}) {
      const auto& e = s.get(name).pooled;
      table << ',' << format_number(e.value) << ',' << format_number(e.error);
    }
    table << ',' << format_number(ev.value) << ',' << format_number(ev.error) << ','
          << format_number(log_ev) << ',' << format_number(log_ev_err) << '\n';
    for (const auto& c : s.correlations) {
      corr << run << ',' << format_number(z) << ',' << to_string(cfg.box.bc) << ',' << c.separation.x
           << ',' << c.separation.y << ','
           << format_number(std::hypot(static_cast<double>(c.separation.x), static_cast<double>(c.separation.y)))
           << ',' << format_number(c.truncated.value) << ',' << format_number(c.truncated.error) << ','
           << format_number(std::abs(c.truncated.value)) << '\n';
    }
  }
  write_text(table_csv, table.str());
  write_text(correlations_csv, corr.str());
}

CoarsegrainOutputs coarsegrain_trace(const fs::path& trace, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  CoarsegrainOutputs out;
  out.spins_csv = out_dir / "spins.csv";
  out.histogram_csv = out_dir / "contour_histogram.csv";
  out.fit_json = out_dir / "peierls_fit.json";
  std::ofstream spins(out.spins_csv, std::ios::binary);
  if (!spins) throw IoError("cannot write " + out.spins_csv.string());

  TraceHeader header;
  ContourHistogram hist;
  bool wrote_header = false;
  out.frames = read_trace(trace, header, [&](long sweep, const RodConfig& config) {
    const SpinField f = tile_spins(config);
    if (!wrote_header) {
      spins << "frame,sweep,ty";
      for (int tx = 0; tx < f.tiles_x(); ++tx) spins << ",t" << tx;
      spins << '\n';
      wrote_header = true;
    }
    for (int ty = 0; ty < f.tiles_y(); ++ty) {
      spins << hist.frames() << ',' << sweep << ',' << ty;
      for (int tx = 0; tx < f.tiles_x(); ++tx) spins << ',' << static_cast<int>(f.at({tx, ty}));
      spins << '\n';
    }
    hist.add(f);
  });
  spins.close();

  std::ostringstream h;
  h << "size,count,probability,probability_err\n";
  for (auto [size, count] : hist.counts()) {
    const double p = hist.probability(size);
    h << size << ',' << count << ',' << format_number(p) << ','
      << format_number(p / std::sqrt(static_cast<double>(count))) << '\n';
  }
  write_text(out.histogram_csv, h.str());

  json fit;
  fit["schema_version"] = 1;
  fit["frames"] = hist.frames();
  fit["tiles_per_frame"] = hist.tiles_per_frame();
  fit["frames_without_contours"] = hist.frames_without_contours();
  if (hist.frames() >= kMinContourFrames) {
    out.statistics = contour_statistics(hist);
    if (out.statistics.fit) {
      const PeierlsFit& p = *out.statistics.fit;
      fit["fit"] = {{"tau", p.tau},           {"tau_error", p.tau_error}, {"intercept", p.intercept},
                    {"bins", p.bins},         {"chi2", p.chi2},           {"min_size", p.min_size},
                    {"max_size", p.max_size}, {"tau_positive_95", p.positive_at_95()}};
    } else {
      fit["fit"] = nullptr;
      fit["refusal"] = out.statistics.refusal;
    }
  } else {
    out.statistics.histogram = hist;
    out.statistics.refusal = "fewer than " + std::to_string(kMinContourFrames) + " frames";
    fit["fit"] = nullptr;
    fit["refusal"] = out.statistics.refusal;
  }
  write_text(out.fit_json, fit.dump(2) + "\n");
  return out;
}

}  // namespace kmer
