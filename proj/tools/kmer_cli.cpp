// Command-line front end. Talks to the library only through kmer.h.
#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "kmer/kmer.h"

namespace {

int exit_code(kmer_status s) {
  switch (s) {
    case KMER_OK:
      return 0;
    case KMER_ERR_VALIDATION:
    case KMER_ERR_NULL_ARGUMENT:
    case KMER_ERR_TOO_LARGE:
    case KMER_ERR_REJECTED:
      return 1;
    default:
      return 2;
  }
}

int report(kmer_status s) {
  if (s != KMER_OK) std::fprintf(stderr, "error: %s\n", kmer_last_error());
  return exit_code(s);
}

struct StringDeleter {
  void operator()(char* p) const { kmer_string_free(p); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct ConfigDeleter {
  void operator()(kmer_run_config* p) const { kmer_run_config_destroy(p); }
};

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hard-rod lattice gas simulator"};
  app.set_version_flag("--version", kmer_version());
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed = -1;
  int chains = 0;
  bool trace = false;
  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo chains from a JSON config or manifest");
  simulate->add_option("--config", config_path, "Config or manifest JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Override the root seed")->check(CLI::NonNegativeNumber);
  simulate->add_option("--chains", chains, "Override the chain count")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_dir, "Override the output directory");
  simulate->add_flag("--trace", trace, "Write configuration traces");

  int width = 0, height = 0, side = 0, k = 2;
  std::string containment = "fully_contained", bc = "open";
  auto* enumerate = app.add_subcommand("enumerate", "Exact partition polynomial of a small box");
  enumerate->add_option("--L", side, "Square box side");
  enumerate->add_option("--width", width, "Box width");
  enumerate->add_option("--height", height, "Box height");
  enumerate->add_option("--k", k, "Rod length")->required();
  enumerate->add_option("--containment", containment)->check(CLI::IsMember({"center_in_box", "fully_contained"}));
  enumerate->add_option("--bc", bc)->check(CLI::IsMember({"open", "plus", "minus"}));

  std::string trace_file, cg_out;
  auto* coarsegrain = app.add_subcommand("coarsegrain", "Tile spins and contour statistics from a trace");
  coarsegrain->add_option("--trace-file", trace_file, "Trace written by simulate --trace")
      ->required()
      ->check(CLI::ExistingFile);
  coarsegrain->add_option("--out", cg_out, "Output directory")->required();

  std::vector<std::string> inputs;
  std::string table = "table.csv", correlations = "correlations.csv";
  auto* analyze = app.add_subcommand("analyze", "Collect run directories into comparison tables");
  analyze->add_option("--input", inputs, "Run directories")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--table", table, "Per-run table CSV");
  analyze->add_option("--correlations", correlations, "Correlation CSV");

  std::vector<std::string> plot_inputs;
  std::string kind = "custom", svg_out, x, y, yerr, group;
  bool logy = false, linear = false;
  auto* plot = app.add_subcommand("plot", "Render CSV columns as an SVG plot");
  plot->add_option("--input", plot_inputs, "CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind)->check(
      CLI::IsMember({"order_vs_z", "event_vs_zk2", "correlation", "contour_histogram", "custom"}));
  plot->add_option("--out", svg_out, "SVG path")->required();
  plot->add_option("--x", x);
  plot->add_option("--y", y);
  plot->add_option("--yerr", yerr);
  plot->add_option("--group", group);
  auto* logy_flag = plot->add_flag("--logy", logy, "Logarithmic y axis");
  plot->add_flag("--linear", linear, "Linear y axis")->excludes(logy_flag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*simulate) {
    kmer_run_config* raw = nullptr;
    if (kmer_status s = kmer_run_config_load(config_path.c_str(), &raw)) return report(s);
    std::unique_ptr<kmer_run_config, ConfigDeleter> cfg(raw);
    if (seed >= 0)
      if (kmer_status s = kmer_run_config_set_seed(cfg.get(), static_cast<uint64_t>(seed))) return report(s);
    if (chains > 0)
      if (kmer_status s = kmer_run_config_set_chains(cfg.get(), chains)) return report(s);
    if (!out_dir.empty())
      if (kmer_status s = kmer_run_config_set_output_dir(cfg.get(), out_dir.c_str())) return report(s);
    if (trace)
      if (kmer_status s = kmer_run_config_set_trace(cfg.get(), 1)) return report(s);
    char* summary = nullptr;
    if (kmer_status s = kmer_run_experiment(cfg.get(), &summary)) return report(s);
    OwnedString owned(summary);
    std::printf("%s\n", summary);
    return 0;
  }

  if (*enumerate) {
    if (side > 0) width = height = side;
    if (width <= 0 || height <= 0) {
      std::fprintf(stderr, "error: give --L or both --width and --height\n");
      return 1;
    }
    kmer_box_spec box{width, height, k,
                      containment == "center_in_box" ? KMER_CENTER_IN_BOX : KMER_FULLY_CONTAINED,
                      bc == "plus" ? KMER_BC_PLUS : bc == "minus" ? KMER_BC_MINUS : KMER_BC_OPEN};
    char* json = nullptr;
    if (kmer_status s = kmer_enumerate_json(&box, &json)) return report(s);
    OwnedString owned(json);
    std::printf("%s\n", json);
    return 0;
  }

  if (*coarsegrain) {
    char* fit = nullptr;
    if (kmer_status s = kmer_coarsegrain_trace(trace_file.c_str(), cg_out.c_str(), &fit)) return report(s);
    OwnedString owned(fit);
    std::printf("%s\n", fit);
    return 0;
  }

  if (*analyze) {
    const auto dirs = c_strings(inputs);
    return report(kmer_analyze(dirs.data(), dirs.size(), table.c_str(), correlations.c_str()));
  }

  if (*plot) {
    const auto paths = c_strings(plot_inputs);
    auto opt = [](const std::string& s) { return s.empty() ? nullptr : s.c_str(); };
    const int log_y = logy ? 1 : linear ? 0 : -1;
    return report(kmer_plot(paths.data(), paths.size(), kind.c_str(), opt(x), opt(y), opt(yerr), opt(group),
                            log_y, svg_out.c_str()));
  }
  return 1;
}
