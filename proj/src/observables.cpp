#include "kmer/observables.hpp"

#include <algorithm>
#include <cmath>

#include "kmer/errors.hpp"

namespace kmer {

Region Region::bulk(const BoxSpec& box) {
  const int p = box.peel_width();
  Region r{p, p, box.width - p, box.height - p};
  if (r.x1 < r.x0) r.x1 = r.x0;
  if (r.y1 < r.y0) r.y1 = r.y0;
  return r;
}

std::vector<std::uint8_t> center_indicators(const RodConfig& config) {
  const BoxSpec& box = config.box();
  std::vector<std::uint8_t> n(static_cast<std::size_t>(box.area()), 0);
  for (const Rod& r : config.rods())
    n[static_cast<std::size_t>(r.center.y) * box.width + r.center.x] = 1;
  return n;
}

double density(const RodConfig& config) {
  return static_cast<double>(config.size()) / static_cast<double>(config.box().area());
}

double density(const RodConfig& config, const Region& region) {
  if (region.empty()) throw ValidationError("density: empty region");
  std::size_t n = 0;
  for (const Rod& r : config.rods())
    if (region.contains(r.center)) ++n;
  return static_cast<double>(n) / static_cast<double>(region.area());
}

double order_parameter(const RodConfig& config) {
  const std::size_t n = config.size();
  if (n == 0) return 0.0;
  const double h = static_cast<double>(config.count(Orientation::Horizontal));
  const double v = static_cast<double>(config.count(Orientation::Vertical));
  return (h - v) / (h + v);
}

double order_parameter(const RodConfig& config, const Region& region) {
  long h = 0, v = 0;
  for (const Rod& r : config.rods()) {
    if (!region.contains(r.center)) continue;
    (r.orientation == Orientation::Horizontal ? h : v) += 1;
  }
  if (h + v == 0) return 0.0;
  return static_cast<double>(h - v) / static_cast<double>(h + v);
}

Region EventSpec::window() const {
  const int x0 = center.x - center_offset(side);
  const int y0 = center.y - center_offset(side);
  return {x0, y0, x0 + side, y0 + side};
}

void EventSpec::validate(const BoxSpec& box) const {
  if (side < 1) throw ValidationError("event.side: must be >= 1");
  if (!Region::bulk(box).contains(window()))
    throw ValidationError("event.center: window must lie in the bulk, outside the " +
                          std::to_string(box.peel_width()) + "-site peel");
}

EventSpec default_event(const BoxSpec& box) {
  EventSpec e;
  e.center = {box.width / 2, box.height / 2};
  e.side = std::max(1, tile_side(box.k));
  e.target = box.bc == Boundary::Minus ? Orientation::Horizontal : Orientation::Vertical;
  return e;
}

bool event_indicator(const RodConfig& config, const EventSpec& event) {
  const Region w = event.window();
  std::size_t inside = 0;
  for (const Rod& r : config.rods()) {
    if (!w.contains(r.center)) continue;
    if (r.orientation != event.target) return false;
    ++inside;
  }
  if (inside == 0) return event.include_vacuous;
  return inside >= event.min_rods;
}

Estimate mean_with_error(std::span<const double> values) {
  const BlockingResult b = blocking_error(values);
  return {b.mean, b.standard_error};
}

std::vector<Site> default_separations(int k) {
  const int step = std::max(1, tile_side(k));
  std::vector<Site> out;
  for (int d = step; d <= 4 * k; d += step) out.push_back({d, 0});
  for (int d = step; d <= 4 * k; d += step) out.push_back({0, d});
  return out;
}

ConnectedCorrelation::ConnectedCorrelation(int grid_width, int grid_height, Region region,
                                           std::vector<Site> displacements,
                                           std::size_t max_blocks)
    : gw_(grid_width), gh_(grid_height), region_(region),
      displacements_(std::move(displacements)), max_blocks_(std::max<std::size_t>(2, max_blocks)) {
  if (!Region{0, 0, gw_, gh_}.contains(region_))
    throw ValidationError("correlation: region outside grid");
  if (region_.empty()) throw ValidationError("correlation: empty region");
}

ConnectedCorrelation::Block ConnectedCorrelation::make_block() const {
  const auto n = static_cast<std::size_t>(region_.area());
  return Block{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
               std::vector<double>(displacements_.size(), 0.0), 0.0};
}

void ConnectedCorrelation::add(std::span<const double> field_a, std::span<const double> field_b) {
  const auto cells = static_cast<std::size_t>(gw_) * static_cast<std::size_t>(gh_);
  if (field_a.size() != cells || field_b.size() != cells)
    throw ValidationError("correlation: field size does not match grid");
  if (blocks_.empty() || blocks_.back().frames >= static_cast<double>(block_size_))
    blocks_.push_back(make_block());
  Block& blk = blocks_.back();
  const int rw = region_.width();
  for (int y = region_.y0; y < region_.y1; ++y)
    for (int x = region_.x0; x < region_.x1; ++x) {
      const std::size_t g = static_cast<std::size_t>(y) * gw_ + x;
      const std::size_t i = static_cast<std::size_t>(y - region_.y0) * rw + (x - region_.x0);
      blk.a[i] += field_a[g];
      blk.b[i] += field_b[g];
    }
  for (std::size_t d = 0; d < displacements_.size(); ++d) {
    const Site a = displacements_[d];
    const int xl = std::max(region_.x0, region_.x0 - a.x), xh = std::min(region_.x1, region_.x1 - a.x);
    const int yl = std::max(region_.y0, region_.y0 - a.y), yh = std::min(region_.y1, region_.y1 - a.y);
    double acc = 0.0;
    for (int y = yl; y < yh; ++y)
      for (int x = xl; x < xh; ++x)
        acc += field_a[static_cast<std::size_t>(y) * gw_ + x] *
               field_b[static_cast<std::size_t>(y + a.y) * gw_ + (x + a.x)];
    blk.pair[d] += acc;
  }
  blk.frames += 1.0;
  ++frames_;
  compact();
}

void ConnectedCorrelation::compact() {
  if (blocks_.size() <= 2 * max_blocks_) return;
  std::vector<Block> merged;
  merged.reserve(blocks_.size() / 2 + 1);
  for (std::size_t i = 0; i < blocks_.size(); i += 2) {
    Block b = std::move(blocks_[i]);
    if (i + 1 < blocks_.size()) {
      const Block& c = blocks_[i + 1];
      for (std::size_t j = 0; j < b.a.size(); ++j) {
        b.a[j] += c.a[j];
        b.b[j] += c.b[j];
      }
      for (std::size_t j = 0; j < b.pair.size(); ++j) b.pair[j] += c.pair[j];
      b.frames += c.frames;
    }
    merged.push_back(std::move(b));
  }
  blocks_.swap(merged);
  block_size_ *= 2;
}

void ConnectedCorrelation::merge(const ConnectedCorrelation& other) {
  if (other.gw_ != gw_ || other.gh_ != gh_ || !(other.region_ == region_) ||
      other.displacements_ != displacements_)
    throw ValidationError("correlation: merging incompatible accumulators");
  for (const Block& b : other.blocks_) blocks_.push_back(b);
  frames_ += other.frames_;
  block_size_ = std::max(block_size_, other.block_size_);
  while (blocks_.size() > 2 * max_blocks_) compact();
}

std::vector<ConnectedCorrelation::Point> ConnectedCorrelation::results() const {
  std::vector<Point> out;
  if (blocks_.size() < 2) throw ValidationError("correlation: need at least 2 blocks of frames");
  const std::size_t n = static_cast<std::size_t>(region_.area());
  const int rw = region_.width();
  std::vector<BlockSums> flat;
  flat.reserve(blocks_.size());
  for (const Block& b : blocks_) {
    BlockSums s;
    s.sums.reserve(2 * n + b.pair.size());
    s.sums.insert(s.sums.end(), b.a.begin(), b.a.end());
    s.sums.insert(s.sums.end(), b.b.begin(), b.b.end());
    s.sums.insert(s.sums.end(), b.pair.begin(), b.pair.end());
    s.frames = b.frames;
    flat.push_back(std::move(s));
  }
  for (std::size_t d = 0; d < displacements_.size(); ++d) {
    const Site a = displacements_[d];
    const int xl = std::max(0, -a.x), xh = std::min(rw, rw - a.x);
    const int yl = std::max(0, -a.y), yh = std::min(region_.height(), region_.height() - a.y);
    Point p;
    p.displacement = a;
    p.pairs = (xh > xl && yh > yl) ? static_cast<std::size_t>(xh - xl) * (yh - yl) : 0;
    if (p.pairs == 0) {
      out.push_back(p);
      continue;
    }
    const double pairs = static_cast<double>(p.pairs);
    auto raw = [&](std::span<const double> s, double frames) {
      return s[2 * n + d] / (frames * pairs);
    };
    auto connected = [&](std::span<const double> s, double frames) {
      double prod = 0.0;
      for (int y = yl; y < yh; ++y)
        for (int x = xl; x < xh; ++x)
          prod += s[static_cast<std::size_t>(y) * rw + x] *
                  s[n + static_cast<std::size_t>(y + a.y) * rw + (x + a.x)];
      return s[2 * n + d] / (frames * pairs) - prod / (frames * frames * pairs);
    };
    const JackknifeResult jr = jackknife(flat, raw);
    const JackknifeResult jc = jackknife(flat, connected);
    p.raw = {jr.plain, jr.standard_error};
    p.connected = {jc.estimate, jc.standard_error};
    out.push_back(p);
  }
  return out;
}

ConnectedCorrelation make_pair_correlation(const BoxSpec& box, const Region& region,
                                           std::vector<Site> separations) {
  return ConnectedCorrelation(box.width, box.height, region, std::move(separations));
}

void add_frame(ConnectedCorrelation& acc, const RodConfig& config) {
  const auto n = center_indicators(config);
  std::vector<double> f(n.begin(), n.end());
  acc.add(f);
}

ConnectedCorrelation make_tile_spin_correlation(const BoxSpec& box, const Region& region,
                                                std::vector<Site> displacements) {
  const int side = tile_side(box.k);
  const Region tiles{(region.x0 + side - 1) / side, (region.y0 + side - 1) / side,
                     region.x1 / side, region.y1 / side};
  return ConnectedCorrelation(box.width / side, box.height / side, tiles, std::move(displacements));
}

void add_frame(ConnectedCorrelation& acc, const SpinField& field) {
  std::vector<double> f(field.spins().begin(), field.spins().end());
  acc.add(f);
}

std::vector<ObservableSeries> run_chain_measured(const BoxSpec& box, const SamplerParams& params,
                                                 std::uint64_t chain_index,
                                                 std::span<const Measurer> measurers,
                                                 ChainRun* run) {
  std::vector<ObservableSeries> series(measurers.size());
  for (std::size_t i = 0; i < measurers.size(); ++i) series[i].name = measurers[i].name;
  ChainRun r = run_chain(box, params, chain_index, [&](long sweep, const RodConfig& c) {
    for (std::size_t i = 0; i < measurers.size(); ++i) series[i].push(sweep, measurers[i].measure(c));
  });
  if (run) *run = std::move(r);
  return series;
}

}  // namespace kmer
