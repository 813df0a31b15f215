#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "kmer/errors.hpp"
#include "kmer/plot.hpp"

using namespace kmer;
namespace fs = std::filesystem;

namespace {

std::vector<double> numbers_in(const std::string& s) {
  std::vector<double> out;
  static const std::regex num(R"(-?\d+(\.\d+)?([eE][-+]?\d+)?|nan|inf)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it) {
    const std::string m = it->str();
    out.push_back(m == "nan" ? NAN : m == "inf" ? INFINITY : std::stod(m));
  }
  return out;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("single point gives one marker with an error bar") {
  std::vector<PlotSeries> s{{"M", {0.06}, {0.7}, {0.05}}};
  const std::string svg = render_svg({"t", "z", "M"}, s);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<circle") == 1);
  CHECK(count(svg, "class=\"errorbar\"") == 1);
  CHECK(count(svg, "<path") == 0);
}

TEST_CASE("monotone data gives a monotone polyline") {
  PlotSeries s{"rise", {}, {}, {}};
  for (int i = 0; i < 10; ++i) {
    s.x.push_back(9 - i);  // unsorted input
    s.y.push_back(std::exp(0.3 * (9 - i)));
  }
  const std::string svg = render_svg({"t", "x", "y"}, std::vector<PlotSeries>{s});
  const auto start = svg.find(" d=\"M ");
  REQUIRE(start != std::string::npos);
  const auto end = svg.find('"', start + 4);
  const auto coords = numbers_in(svg.substr(start + 4, end - start - 4));
  REQUIRE(coords.size() == 20);
  for (std::size_t i = 2; i < coords.size(); i += 2) {
    CHECK(coords[i] > coords[i - 2]);      // x increases
    CHECK(coords[i + 1] < coords[i - 1]);  // y rises, so SVG y decreases
  }
}

TEST_CASE("log scale keeps every coordinate finite") {
  PlotSeries s{"hist", {1, 2, 3, 4, 5}, {0.1, 0.01, 1e-3, 1e-5, 1e-9}, {0.2, 0.001, 1e-3, 0, 1e-9}};
  const std::string svg = render_svg({"t", "size", "P", true}, std::vector<PlotSeries>{s});
  for (double v : numbers_in(svg)) REQUIRE(std::isfinite(v));
  CHECK(count(svg, "<circle") == 5);
  PlotSeries with_zero{"z", {1, 2}, {0.0, 0.1}, {}};
  CHECK(count(render_svg({"t", "x", "y", true}, std::vector<PlotSeries>{with_zero}), "<circle") == 1);
}

TEST_CASE("empty input is an error") {
  CHECK_THROWS_AS(render_svg({}, std::vector<PlotSeries>{}), ValidationError);
  PlotSeries only_zero{"z", {1}, {0.0}, {}};
  CHECK_THROWS_AS(render_svg({"t", "x", "y", true}, std::vector<PlotSeries>{only_zero}), ValidationError);
  std::vector<fs::path> none;
  CHECK_THROWS_AS(emit_plot(none, plot_preset("order_vs_z"), "x.svg"), ValidationError);
  const fs::path header_only = fs::temp_directory_path() / "kmer_plot_empty.csv";
  std::ofstream(header_only) << "z,M,M_err,bc\n";
  std::vector<fs::path> one{header_only};
  CHECK_THROWS_AS(emit_plot(one, plot_preset("order_vs_z"), fs::temp_directory_path() / "e.svg"),
                  ValidationError);
  CHECK_THROWS_AS(plot_preset("pie"), ValidationError);
}

TEST_CASE("presets plot CSV columns grouped by a key") {
  const fs::path csv = fs::temp_directory_path() / "kmer_plot_table.csv";
  std::ofstream(csv) << "run,z,bc,M,M_err\nA,0.03,plus,0.2,0.01\nB,0.06,plus,0.4,0.02\nC,0.03,minus,-0.2,0.01\n";
  const fs::path svg = fs::temp_directory_path() / "kmer_plot_table.svg";
  std::vector<fs::path> in{csv};
  emit_plot(in, plot_preset("order_vs_z"), svg);
  std::ifstream f(svg);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(count(ss.str(), "class=\"series\"") == 2);
  CHECK(count(ss.str(), "<circle") == 3);
}
