#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kmer/coarsegrain.hpp"
#include "kmer/lattice.hpp"
#include "kmer/sampler.hpp"
#include "kmer/stats.hpp"

namespace kmer {

// Axis-aligned half-open rectangle of sites [x0, x1) x [y0, y1).
struct Region {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  static Region whole(const BoxSpec& box) { return {0, 0, box.width, box.height}; }
  // Sites at distance >= 2k from every edge; may be empty.
  static Region bulk(const BoxSpec& box);

  bool contains(Site s) const noexcept { return s.x >= x0 && s.y >= y0 && s.x < x1 && s.y < y1; }
  bool contains(const Region& r) const noexcept {
    return r.x0 >= x0 && r.y0 >= y0 && r.x1 <= x1 && r.y1 <= y1;
  }
  int width() const noexcept { return x1 > x0 ? x1 - x0 : 0; }
  int height() const noexcept { return y1 > y0 ? y1 - y0 : 0; }
  int area() const noexcept { return width() * height(); }
  bool empty() const noexcept { return area() == 0; }
  bool operator==(const Region&) const = default;
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// n_x over the box, row-major: 1 where a rod is centered.
std::vector<std::uint8_t> center_indicators(const RodConfig& config);

// Rods centered in the region per region site; the whole box by default.
double density(const RodConfig& config);
double density(const RodConfig& config, const Region& region);

// (N_H - N_V) / (N_H + N_V) over rods centered in the region; 0 if none.
double order_parameter(const RodConfig& config);
double order_parameter(const RodConfig& config, const Region& region);

struct EventSpec {
  Site center;
  int side = 1;
  Orientation target = Orientation::Vertical;
  // Count windows with no centers as satisfying the event.
  bool include_vacuous = false;
  // Minimum centers required in the window (ignored when vacuous counts).
  std::size_t min_rods = 1;

  // Window sites, offset from the center like a rod footprint.
  Region window() const;
  // Throws ValidationError unless the window lies in the non-peel bulk.
  void validate(const BoxSpec& box) const;
};

// Window of side floor(k/2) at the box center; target is the orientation the
// boundary condition disfavors (vertical for Plus and Open, horizontal for Minus).
EventSpec default_event(const BoxSpec& box);

bool event_indicator(const RodConfig& config, const EventSpec& event);

// Mean of a 0/1 or real series with a blocking error bar.
Estimate mean_with_error(std::span<const double> values);

// Axis-aligned displacements m * floor(k/2) up to 4k, along x then y.
std::vector<Site> default_separations(int k);

// Translation-averaged <A_x B_{x+a}> and its connected part
// <A_x B_{x+a}> - <A_x><B_{x+a}> over pairs with both ends in a region of a
// scalar field on a grid. Frames are binned into at most 2*max_blocks blocks
// (pairwise merged as they fill) and errors are delete-one-block jackknife.
class ConnectedCorrelation {
 public:
  ConnectedCorrelation(int grid_width, int grid_height, Region region,
                       std::vector<Site> displacements, std::size_t max_blocks = 32);

  void add(std::span<const double> field_a, std::span<const double> field_b);
  void add(std::span<const double> field) { add(field, field); }
  void merge(const ConnectedCorrelation& other);

  struct Point {
    Site displacement;
    std::size_t pairs = 0;
    Estimate raw;
    Estimate connected;
  };
  std::vector<Point> results() const;

  std::size_t frames() const noexcept { return frames_; }
  const std::vector<Site>& displacements() const noexcept { return displacements_; }

 private:
  struct Block {
    std::vector<double> a;     // per region site
    std::vector<double> b;     // per region site
    std::vector<double> pair;  // per displacement
    double frames = 0.0;
  };
  Block make_block() const;
  void compact();

  int gw_, gh_;
  Region region_;
  std::vector<Site> displacements_;
  std::size_t max_blocks_;
  std::size_t block_size_ = 1;
  std::size_t frames_ = 0;
  std::vector<Block> blocks_;
};

// <n_x n_y> estimator over the bulk (whole box for Open bc) of a box.
ConnectedCorrelation make_pair_correlation(const BoxSpec& box, const Region& region,
                                           std::vector<Site> separations);
void add_frame(ConnectedCorrelation& acc, const RodConfig& config);

// Tile-spin correlations over tiles lying entirely inside `region`;
// displacements are in tile units.
ConnectedCorrelation make_tile_spin_correlation(const BoxSpec& box, const Region& region,
                                                std::vector<Site> displacements);
void add_frame(ConnectedCorrelation& acc, const SpinField& field);

struct Measurer {
  std::string name;
  std::function<double(const RodConfig&)> measure;
};

// run_chain recording each measurer every measurement interval.
std::vector<ObservableSeries> run_chain_measured(const BoxSpec& box, const SamplerParams& params,
                                                 std::uint64_t chain_index,
                                                 std::span<const Measurer> measurers,
                                                 ChainRun* run = nullptr);

}  // namespace kmer
