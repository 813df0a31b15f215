#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace kmer {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;  // empty or same length as y
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool connect = true;  // polyline through points sorted by x
};

// Renders series as an SVG document; every emitted coordinate is finite.
// Under log_y, points with y <= 0 are skipped and error bars are clipped.
// Throws ValidationError if no drawable point remains.
std::string render_svg(const PlotSpec& spec, std::span<const PlotSeries> series);

// Column selection for plots built from CSV files.
struct PlotRequest {
  std::string kind;  // order_vs_z | event_vs_zk2 | correlation | contour_histogram | custom
  std::string x, y, yerr, group;
  bool log_y = false;
  std::string title;
};

// Fills the columns and scale of a preset kind; throws ValidationError for
// unknown kinds.
PlotRequest plot_preset(const std::string& kind);

void emit_plot(std::span<const std::filesystem::path> csvs, const PlotRequest& request,
               const std::filesystem::path& svg_out);

}  // namespace kmer
