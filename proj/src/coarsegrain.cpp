#include "kmer/coarsegrain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "kmer/errors.hpp"

namespace kmer {

SpinField::SpinField(int tile_side, int tiles_x, int tiles_y)
    : side_(tile_side), nx_(tiles_x), ny_(tiles_y),
      spins_(static_cast<std::size_t>(tiles_x) * static_cast<std::size_t>(tiles_y), 0) {}

SpinField SpinField::flipped() const {
  SpinField out = *this;
  for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
  return out;
}

std::optional<TileCoord> tile_of(Site s, const SpinField& field) {
  if (s.x < 0 || s.y < 0) return std::nullopt;
  const TileCoord t{s.x / field.tile_side(), s.y / field.tile_side()};
  if (!field.inside(t)) return std::nullopt;
  return t;
}

SpinField tile_spins(const RodConfig& config) {
  const BoxSpec& box = config.box();
  const int side = tile_side(box.k);
  SpinField field(side, box.width / side, box.height / side);
  field.discarded_columns = box.width % side;
  field.discarded_rows = box.height % side;
  for (const Rod& r : config.rods()) {
    const auto t = tile_of(r.center, field);
    if (!t) continue;
    const std::int8_t s = r.orientation == Orientation::Horizontal ? 1 : -1;
    const std::int8_t cur = field.at(*t);
    if (cur == -s)
      throw InvariantViolation("tile (" + std::to_string(t->tx) + "," + std::to_string(t->ty) +
                               ") holds centers of both orientations");
    field.set(*t, s);
  }
  return field;
}

namespace {

std::vector<std::uint8_t> defect_mask(const SpinField& f) {
  std::vector<std::uint8_t> mask(f.tile_count(), 0);
  const int nx = f.tiles_x();
  const int ny = f.tiles_y();
  for (int ty = 0; ty < ny; ++ty)
    for (int tx = 0; tx < nx; ++tx) {
      const std::int8_t s = f.at({tx, ty});
      const std::size_t i = static_cast<std::size_t>(ty) * nx + tx;
      if (s == 0) {
        mask[i] = 1;
        continue;
      }
      if (tx + 1 < nx && f.at({tx + 1, ty}) == -s) mask[i] = mask[i + 1] = 1;
      if (ty + 1 < ny && f.at({tx, ty + 1}) == -s) mask[i] = mask[i + nx] = 1;
    }
  return mask;
}

}  // namespace

std::vector<TileCoord> defect_tiles(const SpinField& field) {
  const auto mask = defect_mask(field);
  std::vector<TileCoord> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i])
      out.push_back({static_cast<int>(i % field.tiles_x()), static_cast<int>(i / field.tiles_x())});
  return out;
}

std::vector<Contour> contours(const SpinField& field) {
  auto mask = defect_mask(field);
  const int nx = field.tiles_x();
  const int ny = field.tiles_y();
  std::vector<Contour> out;
  std::deque<TileCoord> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (mask[start] != 1) continue;
    Contour c;
    mask[start] = 2;
    queue.push_back({static_cast<int>(start % nx), static_cast<int>(start / nx)});
    while (!queue.empty()) {
      const TileCoord t = queue.front();
      queue.pop_front();
      c.tiles.push_back(t);
      const TileCoord nb[4] = {{t.tx + 1, t.ty}, {t.tx - 1, t.ty}, {t.tx, t.ty + 1}, {t.tx, t.ty - 1}};
      for (TileCoord n : nb) {
        if (n.tx < 0 || n.ty < 0 || n.tx >= nx || n.ty >= ny) continue;
        auto& m = mask[static_cast<std::size_t>(n.ty) * nx + n.tx];
        if (m == 1) {
          m = 2;
          queue.push_back(n);
        }
      }
    }
    std::sort(c.tiles.begin(), c.tiles.end(),
              [](TileCoord a, TileCoord b) { return std::tie(a.ty, a.tx) < std::tie(b.ty, b.tx); });
    out.push_back(std::move(c));
  }
  return out;
}

void ContourHistogram::add(const SpinField& field) {
  if (frames_ == 0)
    tiles_ = field.tile_count();
  else if (tiles_ != field.tile_count())
    throw ValidationError("contour histogram: frames with different tile grids");
  ++frames_;
  const auto cs = contours(field);
  if (cs.empty()) ++empty_frames_;
  for (const auto& c : cs) ++counts_[c.size()];
}

void ContourHistogram::merge(const ContourHistogram& other) {
  if (other.frames_ == 0) return;
  if (frames_ != 0 && tiles_ != other.tiles_)
    throw ValidationError("contour histogram: merging different tile grids");
  tiles_ = other.tiles_;
  frames_ += other.frames_;
  empty_frames_ += other.empty_frames_;
  for (auto [s, n] : other.counts_) counts_[s] += n;
}

double ContourHistogram::probability(std::size_t size) const {
  if (frames_ == 0 || tiles_ == 0) return 0.0;
  auto it = counts_.find(size);
  if (it == counts_.end()) return 0.0;
  return static_cast<double>(it->second) / (static_cast<double>(frames_) * static_cast<double>(tiles_));
}

ContourStatistics contour_statistics(const ContourHistogram& histogram, std::uint64_t min_events) {
  if (histogram.frames() < kMinContourFrames)
    throw ValidationError("contour_statistics: need at least " + std::to_string(kMinContourFrames) +
                          " frames, got " + std::to_string(histogram.frames()));
  ContourStatistics out;
  out.histogram = histogram;
  std::vector<double> x, y, sigma;
  for (auto [s, n] : histogram.counts()) {
    if (n < min_events) continue;
    x.push_back(static_cast<double>(s));
    y.push_back(std::log(histogram.probability(s)));
    sigma.push_back(1.0 / std::sqrt(static_cast<double>(n)));
  }
  if (x.size() < 3) {
    out.refusal = "fewer than 3 size bins with at least " + std::to_string(min_events) + " events";
    return out;
  }
  const LinearFit f = weighted_linear_fit(x, y, sigma);
  PeierlsFit p;
  p.tau = -f.slope;
  p.tau_error = f.slope_error;
  p.intercept = f.intercept;
  p.bins = f.points;
  p.chi2 = f.chi2;
  p.min_size = static_cast<std::size_t>(x.front());
  p.max_size = static_cast<std::size_t>(x.back());
  out.fit = p;
  return out;
}

RowOccupancy row_occupancy_stats(const RodConfig& config, const SpinField& field, TileCoord tile) {
  if (!field.inside(tile)) throw ValidationError("row_occupancy_stats: tile outside field");
  const std::int8_t spin = field.at(tile);
  if (spin == 0) throw ValidationError("row_occupancy_stats: tile is empty");
  RowOccupancy r;
  r.orientation = spin > 0 ? Orientation::Horizontal : Orientation::Vertical;
  const int side = field.tile_side();
  r.profile.assign(static_cast<std::size_t>(side), 0);
  const int x0 = tile.tx * side;
  const int y0 = tile.ty * side;
  for (const Rod& rod : config.rods()) {
    const Site c = rod.center;
    if (c.x < x0 || c.y < y0 || c.x >= x0 + side || c.y >= y0 + side) continue;
    const int line = r.orientation == Orientation::Horizontal ? c.y - y0 : c.x - x0;
    ++r.profile[static_cast<std::size_t>(line)];
  }
  for (int n : r.profile)
    if (n > 0) ++r.occupied_lines;
  return r;
}

RowOccupancyHistogram::RowOccupancyHistogram(int tile_side)
    : side_(tile_side), counts_(static_cast<std::size_t>(tile_side) + 1, 0) {}

void RowOccupancyHistogram::add(const RodConfig& config, const SpinField& field) {
  if (field.tile_side() != side_) throw ValidationError("row occupancy: tile side mismatch");
  // Bucket rods by tile once instead of scanning all rods per tile.
  std::vector<std::vector<int>> lines(field.tile_count(),
                                      std::vector<int>(static_cast<std::size_t>(side_), 0));
  for (const Rod& rod : config.rods()) {
    const auto t = tile_of(rod.center, field);
    if (!t) continue;
    const int line = rod.orientation == Orientation::Horizontal ? rod.center.y % side_
                                                                : rod.center.x % side_;
    ++lines[static_cast<std::size_t>(t->ty) * field.tiles_x() + t->tx][static_cast<std::size_t>(line)];
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (field.spins()[i] == 0) continue;
    int occupied = 0;
    for (int n : lines[i]) {
      if (n > 0) ++occupied;
      if (n > 1) ++crowded_;
    }
    ++counts_[static_cast<std::size_t>(occupied)];
    ++tiles_;
  }
}

double RowOccupancyHistogram::fitted_line_rate() const {
  if (tiles_ == 0) return 0.0;
  double mean = 0.0;
  for (std::size_t c = 0; c < counts_.size(); ++c) mean += static_cast<double>(c * counts_[c]);
  mean /= static_cast<double>(tiles_);
  const double l = side_;
  auto truncated_mean = [l](double p) { return l * p / (1.0 - std::pow(1.0 - p, l)); };
  double lo = 1e-12, hi = 1.0 - 1e-12;
  if (mean <= truncated_mean(lo)) return lo;
  if (mean >= truncated_mean(hi)) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (truncated_mean(mid) < mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double RowOccupancyHistogram::total_variation_to_binomial() const {
  if (tiles_ == 0) return 0.0;
  const double p = fitted_line_rate();
  const int l = side_;
  const double norm = 1.0 - std::pow(1.0 - p, l);
  double tv = 0.0;
  double binom = 1.0;  // C(l, c)
  for (int c = 0; c <= l; ++c) {
    if (c > 0) binom = binom * (l - c + 1) / c;
    const double model = c == 0 ? 0.0 : binom * std::pow(p, c) * std::pow(1.0 - p, l - c) / norm;
    const double empirical = static_cast<double>(counts_[static_cast<std::size_t>(c)]) /
                             static_cast<double>(tiles_);
    tv += std::abs(model - empirical);
  }
  return 0.5 * tv;
}

}  // namespace kmer
