#include "kmer/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "kmer/errors.hpp"

namespace kmer {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Pt {
  double x, y, lo, hi;
};

}  // namespace

std::string render_svg(const PlotSpec& spec, std::span<const PlotSeries> series) {
  std::vector<std::vector<Pt>> pts(series.size());
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    if (ser.x.size() != ser.y.size() || (!ser.yerr.empty() && ser.yerr.size() != ser.y.size()))
      throw ValidationError("plot: series '" + ser.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      double x = ser.x[i], y = ser.y[i];
      double e = ser.yerr.empty() ? 0.0 : ser.yerr[i];
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!std::isfinite(e) || e < 0) e = 0.0;
      double lo = y - e, hi = y + e;
      if (spec.log_y) {
        if (y <= 0) continue;
        lo = lo > 0 ? std::log10(lo) : std::log10(y) - 1.0;
        hi = std::log10(hi);
        y = std::log10(y);
      }
      pts[s].push_back({x, y, lo, hi});
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, lo);
      ymax = std::max(ymax, hi);
    }
    std::sort(pts[s].begin(), pts[s].end(), [](const Pt& a, const Pt& b) { return a.x < b.x; });
  }
  if (!std::isfinite(xmin)) throw ValidationError("plot: no drawable points");
  if (xmax - xmin <= 0) {
    xmin -= 0.5 * (std::abs(xmin) + 1.0);
    xmax += 0.5 * (std::abs(xmax) + 1.0);
  }
  if (ymax - ymin <= 0) {
    ymin -= 0.5 * (std::abs(ymin) + 1.0);
    ymax += 0.5 * (std::abs(ymax) + 1.0);
  }
  const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << esc(spec.title) << "</text>\n";
  o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    o << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(px(xv))
      << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(kTop + ph + 18)
      << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(xv) << "</text>\n";
    o << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(kLeft)
      << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(yv) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">"
      << tick_label(spec.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 12)
    << "\" text-anchor=\"middle\" font-size=\"13\">" << esc(spec.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
    << "transform=\"rotate(-90 16 " << num(kTop + ph / 2) << ")\">"
    << esc(spec.y_label + (spec.log_y ? " (log scale)" : "")) << "</text>\n";

  for (std::size_t s = 0; s < pts.size(); ++s) {
    const char* color = kColors[s % std::size(kColors)];
    const auto& p = pts[s];
    if (p.empty()) continue;
    o << "<g class=\"series\" data-label=\"" << esc(series[s].label) << "\">\n";
    if (spec.connect && p.size() > 1) {
      o << "<path fill=\"none\" stroke=\"" << color << "\" d=\"";
      for (std::size_t i = 0; i < p.size(); ++i)
        o << (i ? " L " : "M ") << num(px(p[i].x)) << ' ' << num(py(p[i].y));
      o << "\"/>\n";
    }
    for (const Pt& q : p) {
      if (q.hi > q.lo)
        o << "<line class=\"errorbar\" x1=\"" << num(px(q.x)) << "\" y1=\"" << num(py(q.lo)) << "\" x2=\""
          << num(px(q.x)) << "\" y2=\"" << num(py(q.hi)) << "\" stroke=\"" << color << "\"/>\n";
      o << "<circle cx=\"" << num(px(q.x)) << "\" cy=\"" << num(py(q.y)) << "\" r=\"3.5\" fill=\""
        << color << "\"/>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << num(kLeft + pw - 8) << "\" y=\"" << num(kTop + 16 + 14 * s)
      << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << esc(series[s].label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

PlotRequest plot_preset(const std::string& kind) {
  PlotRequest r;
  r.kind = kind;
  if (kind == "order_vs_z") {
    r = {kind, "z", "M", "M_err", "bc", false, "Order parameter vs activity"};
  } else if (kind == "event_vs_zk2") {
    r = {kind, "zk2", "event", "event_err", "bc", true, "Event probability vs z k^2"};
  } else if (kind == "correlation") {
    r = {kind, "separation", "truncated", "truncated_err", "run", false, "Truncated pair correlation"};
  } else if (kind == "contour_histogram") {
    r = {kind, "size", "probability", "probability_err", "", true, "Contour size distribution"};
  } else if (kind != "custom") {
    throw ValidationError("plot: unknown kind '" + kind +
                          "' (order_vs_z, event_vs_zk2, correlation, contour_histogram, custom)");
  }
  return r;
}

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',')
      out.emplace_back();
    else if (c != '\r')
      out.back() += c;
  }
  return out;
}

Csv read_csv(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("plot: cannot open " + p.string());
  Csv c;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("plot: empty input " + p.string());
  c.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) c.rows.push_back(split(line));
  return c;
}

double to_double(const std::string& s) {
  if (s.empty() || s == "nan") return std::nan("");
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) return std::nan("");
  return v;
}

}  // namespace

void emit_plot(std::span<const std::filesystem::path> csvs, const PlotRequest& request,
               const std::filesystem::path& svg_out) {
  if (csvs.empty()) throw ValidationError("plot: no input files");
  if (request.x.empty() || request.y.empty()) throw ValidationError("plot: x and y columns required");
  std::map<std::string, PlotSeries> groups;
  std::vector<std::string> order;
  std::size_t rows = 0;
  for (const auto& path : csvs) {
    const Csv c = read_csv(path);
    const int xi = c.col(request.x), yi = c.col(request.y);
    const int ei = request.yerr.empty() ? -1 : c.col(request.yerr);
    const int gi = request.group.empty() ? -1 : c.col(request.group);
    if (xi < 0 || yi < 0)
      throw ValidationError("plot: " + path.string() + " lacks column " + (xi < 0 ? request.x : request.y));
    for (const auto& row : c.rows) {
      if (row.size() != c.header.size()) throw ValidationError("plot: ragged row in " + path.string());
      const std::string label = gi >= 0 ? row[static_cast<std::size_t>(gi)]
                                        : (csvs.size() > 1 ? path.stem().string() : request.y);
      if (!groups.count(label)) {
        order.push_back(label);
        groups[label].label = label;
      }
      auto& s = groups[label];
      s.x.push_back(to_double(row[static_cast<std::size_t>(xi)]));
      s.y.push_back(to_double(row[static_cast<std::size_t>(yi)]));
      if (ei >= 0) s.yerr.push_back(to_double(row[static_cast<std::size_t>(ei)]));
      ++rows;
    }
  }
  if (rows == 0) throw ValidationError("plot: input has no data rows");
  std::vector<PlotSeries> series;
  for (const auto& l : order) series.push_back(groups[l]);
  PlotSpec spec{request.title.empty() ? request.y + " vs " + request.x : request.title, request.x,
                request.y, request.log_y, true};
  const std::string svg = render_svg(spec, series);
  std::ofstream out(svg_out, std::ios::binary);
  if (!out) throw IoError("plot: cannot write " + svg_out.string());
  out << svg;
}

}  // namespace kmer
