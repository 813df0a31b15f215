#include "kmer/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kmer/errors.hpp"

namespace kmer {

std::string_view to_string(Orientation o) noexcept {
  return o == Orientation::Horizontal ? "H" : "V";
}

std::string_view to_string(Containment c) noexcept {
  return c == Containment::CenterInBox ? "center_in_box" : "fully_contained";
}

std::string_view to_string(Boundary b) noexcept {
  switch (b) {
    case Boundary::Open: return "open";
    case Boundary::Plus: return "plus";
    case Boundary::Minus: return "minus";
  }
  return "open";
}

bool forced_orientation(Boundary b, Orientation& out) noexcept {
  if (b == Boundary::Plus) {
    out = Orientation::Horizontal;
    return true;
  }
  if (b == Boundary::Minus) {
    out = Orientation::Vertical;
    return true;
  }
  return false;
}

void BoxSpec::validate() const {
  if (width < 1 || height < 1)
    throw ValidationError("box: width and height must be >= 1");
  if (k < 2) throw ValidationError("box: k must be >= 2");
}

std::vector<Site> footprint(const Rod& rod, int k) {
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(k));
  const int start = -center_offset(k);
  for (int i = 0; i < k; ++i) {
    if (rod.orientation == Orientation::Horizontal)
      sites.push_back({rod.center.x + start + i, rod.center.y});
    else
      sites.push_back({rod.center.x, rod.center.y + start + i});
  }
  return sites;
}

int edge_distance(Site s, const BoxSpec& box) noexcept {
  return std::min({s.x, s.y, box.width - 1 - s.x, box.height - 1 - s.y});
}

bool in_peel(Site s, const BoxSpec& box) {
  if (!box.contains(s)) throw std::out_of_range("in_peel: site outside box");
  return edge_distance(s, box) < box.peel_width();
}

bool respects_containment(const Rod& rod, const BoxSpec& box) noexcept {
  if (!box.contains(rod.center)) return false;
  if (box.containment == Containment::CenterInBox) return true;
  const int lo = -center_offset(box.k);
  const int hi = lo + box.k - 1;
  if (rod.orientation == Orientation::Horizontal)
    return rod.center.x + lo >= 0 && rod.center.x + hi < box.width;
  return rod.center.y + lo >= 0 && rod.center.y + hi < box.height;
}

bool respects_boundary(const Rod& rod, const BoxSpec& box) noexcept {
  Orientation forced;
  if (!forced_orientation(box.bc, forced)) return true;
  if (!box.contains(rod.center)) return false;
  if (edge_distance(rod.center, box) >= box.peel_width()) return true;
  return rod.orientation == forced;
}

RodConfig::RodConfig(const BoxSpec& box)
    : box_(box), pad_(box.k), stride_(box.width + 2 * box.k) {
  box_.validate();
  occupancy_.assign(static_cast<std::size_t>(stride_) *
                        static_cast<std::size_t>(box.height + 2 * box.k),
                    -1);
}

int RodConfig::occupant(Site s) const noexcept {
  if (s.x < -pad_ || s.y < -pad_ || s.x >= box_.width + pad_ || s.y >= box_.height + pad_)
    return -1;
  return occupancy_[grid_index(s.x, s.y)];
}

bool RodConfig::footprint_free(const Rod& rod, int ignore) const noexcept {
  const int start = -center_offset(box_.k);
  if (rod.orientation == Orientation::Horizontal) {
    const std::int32_t* p = &occupancy_[grid_index(rod.center.x + start, rod.center.y)];
    for (int i = 0; i < box_.k; ++i)
      if (p[i] >= 0 && p[i] != ignore) return false;
  } else {
    const std::int32_t* p = &occupancy_[grid_index(rod.center.x, rod.center.y + start)];
    for (int i = 0; i < box_.k; ++i, p += stride_)
      if (*p >= 0 && *p != ignore) return false;
  }
  return true;
}

void RodConfig::stamp(const Rod& rod, int value) noexcept {
  const int start = -center_offset(box_.k);
  if (rod.orientation == Orientation::Horizontal) {
    std::int32_t* p = &occupancy_[grid_index(rod.center.x + start, rod.center.y)];
    for (int i = 0; i < box_.k; ++i) p[i] = value;
  } else {
    std::int32_t* p = &occupancy_[grid_index(rod.center.x, rod.center.y + start)];
    for (int i = 0; i < box_.k; ++i, p += stride_) *p = value;
  }
}

bool RodConfig::is_compatible(const Rod& rod) const noexcept {
  return respects_containment(rod, box_) && respects_boundary(rod, box_) &&
         footprint_free(rod, -1);
}

bool RodConfig::is_compatible_ignoring(const Rod& rod, std::size_t ignore) const noexcept {
  return respects_containment(rod, box_) && respects_boundary(rod, box_) &&
         footprint_free(rod, static_cast<int>(ignore));
}

bool RodConfig::contains(const Rod& rod) const noexcept {
  if (!box_.contains(rod.center)) return false;
  const int idx = occupancy_[grid_index(rod.center.x, rod.center.y)];
  return idx >= 0 && rods_[static_cast<std::size_t>(idx)] == rod;
}

void RodConfig::apply(const Rod& rod) {
  if (!is_compatible(rod)) throw RejectedMutation("apply: rod is not compatible with configuration");
  stamp(rod, static_cast<int>(rods_.size()));
  rods_.push_back(rod);
  if (rod.orientation == Orientation::Horizontal) ++horizontal_;
}

void RodConfig::remove(const Rod& rod) {
  if (!contains(rod)) throw RejectedMutation("remove: rod not present");
  remove_at(static_cast<std::size_t>(occupancy_[grid_index(rod.center.x, rod.center.y)]));
}

void RodConfig::remove_at(std::size_t index) {
  const Rod gone = rods_[index];
  stamp(gone, -1);
  if (gone.orientation == Orientation::Horizontal) --horizontal_;
  const std::size_t last = rods_.size() - 1;
  if (index != last) {
    rods_[index] = rods_[last];
    stamp(rods_[index], static_cast<int>(index));
  }
  rods_.pop_back();
}

void RodConfig::replace_at(std::size_t index, const Rod& rod) {
  const Rod old = rods_[index];
  stamp(old, -1);
  stamp(rod, static_cast<int>(index));
  rods_[index] = rod;
  if (old.orientation != rod.orientation)
    horizontal_ += rod.orientation == Orientation::Horizontal ? 1 : -1;
}

std::vector<Rod> RodConfig::sorted_rods() const {
  std::vector<Rod> out(rods_.begin(), rods_.end());
  std::sort(out.begin(), out.end(), [](const Rod& a, const Rod& b) {
    if (a.orientation != b.orientation) return a.orientation < b.orientation;
    if (a.center.y != b.center.y) return a.center.y < b.center.y;
    return a.center.x < b.center.x;
  });
  return out;
}

void RodConfig::verify() const {
  std::size_t covered = 0;
  std::size_t horizontal = 0;
  for (std::int32_t v : occupancy_)
    if (v >= 0) ++covered;
  if (covered != rods_.size() * static_cast<std::size_t>(box_.k))
    throw InvariantViolation("occupancy does not match union of footprints");
  for (std::size_t i = 0; i < rods_.size(); ++i) {
    const Rod& r = rods_[i];
    if (!respects_containment(r, box_)) throw InvariantViolation("rod violates containment");
    if (!respects_boundary(r, box_)) throw InvariantViolation("rod violates boundary condition");
    const int start = -center_offset(box_.k);
    const bool h = r.orientation == Orientation::Horizontal;
    for (int j = 0; j < box_.k; ++j) {
      const int x = h ? r.center.x + start + j : r.center.x;
      const int y = h ? r.center.y : r.center.y + start + j;
      if (occupancy_[grid_index(x, y)] != static_cast<std::int32_t>(i))
        throw InvariantViolation("footprint site not owned by its rod");
    }
    if (r.orientation == Orientation::Horizontal) ++horizontal;
  }
  if (horizontal != horizontal_) throw InvariantViolation("orientation count out of sync");
}

RegimeParams regime_epsilon(double z, int k, double eps0, int k0) {
  if (z < 0.0) throw ValidationError("regime_epsilon: z must be >= 0");
  if (k < 2) throw ValidationError("regime_epsilon: k must be >= 2");
  RegimeParams p;
  p.z = z;
  p.k = k;
  const double kd = static_cast<double>(k);
  p.epsilon = std::max(z * kd, std::exp(-z * kd * kd));
  p.in_regime = p.epsilon <= eps0 && k >= k0;
  return p;
}

}  // namespace kmer
