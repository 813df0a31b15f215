#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kmer/lattice.hpp"
#include "kmer/stats.hpp"

namespace kmer {

struct TileCoord {
  int tx = 0;
  int ty = 0;
  auto operator<=>(const TileCoord&) const = default;
};

// Tile side used for coarse-graining rods of length k (floor(k/2)); at this
// size two rods centered in one tile must share an orientation.
constexpr int tile_side(int k) noexcept { return k / 2; }

// Tile spins: +1 horizontal centers only, -1 vertical only, 0 empty. Tiles
// are anchored at the box origin; sites in a trailing partial strip are
// dropped and counted in discarded_columns / discarded_rows.
class SpinField {
 public:
  SpinField() = default;
  SpinField(int tile_side, int tiles_x, int tiles_y);

  int tile_side() const noexcept { return side_; }
  int tiles_x() const noexcept { return nx_; }
  int tiles_y() const noexcept { return ny_; }
  std::size_t tile_count() const noexcept { return spins_.size(); }
  int discarded_columns = 0;
  int discarded_rows = 0;

  std::int8_t at(TileCoord t) const { return spins_[index(t)]; }
  void set(TileCoord t, std::int8_t s) { spins_[index(t)] = s; }
  bool inside(TileCoord t) const noexcept {
    return t.tx >= 0 && t.ty >= 0 && t.tx < nx_ && t.ty < ny_;
  }
  std::span<const std::int8_t> spins() const noexcept { return spins_; }
  // Global sign flip.
  SpinField flipped() const;

  bool operator==(const SpinField&) const = default;

 private:
  std::size_t index(TileCoord t) const {
    return static_cast<std::size_t>(t.ty) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(t.tx);
  }
  int side_ = 1;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<std::int8_t> spins_;
};

// Throws InvariantViolation if some tile holds centers of both orientations.
SpinField tile_spins(const RodConfig& config);

// Tile containing a site, or nullopt for sites in the discarded strip.
std::optional<TileCoord> tile_of(Site s, const SpinField& field);

// Zero tiles plus both members of every nearest-neighbour (+1, -1) pair,
// row-major order.
std::vector<TileCoord> defect_tiles(const SpinField& field);

struct Contour {
  std::vector<TileCoord> tiles;  // row-major order
  std::size_t size() const noexcept { return tiles.size(); }
};

// 4-connected components of the defect set.
std::vector<Contour> contours(const SpinField& field);

class ContourHistogram {
 public:
  void add(const SpinField& field);
  void merge(const ContourHistogram& other);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t frames_without_contours() const noexcept { return empty_frames_; }
  std::size_t tiles_per_frame() const noexcept { return tiles_; }
  const std::map<std::size_t, std::uint64_t>& counts() const noexcept { return counts_; }
  // Contours of size s per tile per frame.
  double probability(std::size_t size) const;

 private:
  std::size_t frames_ = 0;
  std::size_t empty_frames_ = 0;
  std::size_t tiles_ = 0;
  std::map<std::size_t, std::uint64_t> counts_;
};

inline constexpr std::size_t kMinContourFrames = 100;
inline constexpr std::uint64_t kMinEventsPerBin = 10;

struct PeierlsFit {
  double tau = 0.0;        // decay rate per added tile
  double tau_error = 0.0;
  double intercept = 0.0;
  std::size_t bins = 0;
  double chi2 = 0.0;
  std::size_t min_size = 0;
  std::size_t max_size = 0;

  // tau - 1.96 sigma > 0
  bool positive_at_95() const noexcept { return tau - 1.96 * tau_error > 0.0; }
};

struct ContourStatistics {
  ContourHistogram histogram;
  std::optional<PeierlsFit> fit;
  std::string refusal;  // why the fit was refused, empty otherwise
};

// Weighted least squares of log P(s) = a - tau s over sizes with at least
// `min_events` contours (weights = counts, the Poisson variance of log n).
// Throws ValidationError with fewer than kMinContourFrames frames; refuses
// the fit (histogram still returned) with fewer than 3 populated bins.
ContourStatistics contour_statistics(const ContourHistogram& histogram,
                                     std::uint64_t min_events = kMinEventsPerBin);

struct RowOccupancy {
  Orientation orientation = Orientation::Horizontal;
  int occupied_lines = 0;
  // Centers per line of the tile (rows for +1 tiles, columns for -1).
  std::vector<int> profile;
};

// Throws ValidationError when the tile's spin is 0.
RowOccupancy row_occupancy_stats(const RodConfig& config, const SpinField& field, TileCoord tile);

// Distribution of occupied-line counts over non-empty tiles, compared with a
// zero-truncated binomial(l, p) model of independent lines.
class RowOccupancyHistogram {
 public:
  explicit RowOccupancyHistogram(int tile_side);
  void add(const RodConfig& config, const SpinField& field);

  int tile_side() const noexcept { return side_; }
  std::uint64_t tiles() const noexcept { return tiles_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
  // Any line ever holding two centers would be a hard-core breach.
  std::uint64_t crowded_lines() const noexcept { return crowded_; }

  // Per-line rate p whose zero-truncated binomial mean equals the empirical
  // mean occupied-line count.
  double fitted_line_rate() const;
  double total_variation_to_binomial() const;

 private:
  int side_;
  std::uint64_t tiles_ = 0;
  std::uint64_t crowded_ = 0;
  std::vector<std::uint64_t> counts_;
};

}  // namespace kmer
