#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kmer {

enum class Orientation : std::uint8_t { Horizontal = 0, Vertical = 1 };

constexpr Orientation flipped(Orientation o) noexcept {
  return o == Orientation::Horizontal ? Orientation::Vertical : Orientation::Horizontal;
}

std::string_view to_string(Orientation o) noexcept;

struct Site {
  int x = 0;
  int y = 0;
  auto operator<=>(const Site&) const = default;
};

struct Rod {
  Orientation orientation = Orientation::Horizontal;
  Site center;
  auto operator<=>(const Rod&) const = default;
};

// CenterInBox: a rod belongs to the box when its center does; footprints may
// overhang the edge. FullyContained: the whole footprint must lie inside.
enum class Containment : std::uint8_t { CenterInBox, FullyContained };

// Plus forces every rod centered in the internal peel to be horizontal,
// Minus forces vertical.
enum class Boundary : std::uint8_t { Open, Plus, Minus };

std::string_view to_string(Containment c) noexcept;
std::string_view to_string(Boundary b) noexcept;

// Orientation imposed on the peel, if any.
bool forced_orientation(Boundary b, Orientation& out) noexcept;

struct BoxSpec {
  int width = 1;
  int height = 1;
  int k = 2;
  Containment containment = Containment::CenterInBox;
  Boundary bc = Boundary::Open;

  static BoxSpec square(int side, int k, Containment containment = Containment::CenterInBox,
                        Boundary bc = Boundary::Open) {
    return BoxSpec{side, side, k, containment, bc};
  }

  constexpr int area() const noexcept { return width * height; }
  int peel_width() const noexcept { return 2 * k; }
  bool is_square() const noexcept { return width == height; }
  bool contains(Site s) const noexcept {
    return s.x >= 0 && s.y >= 0 && s.x < width && s.y < height;
  }
  // True when a +/- box has no bulk left after removing the peel.
  bool bulk_is_thin() const noexcept {
    return bc != Boundary::Open && (width <= 4 * k || height <= 4 * k);
  }

  // Throws ValidationError on width/height < 1 or k < 2.
  void validate() const;

  auto operator<=>(const BoxSpec&) const = default;
};

// Offset from a rod's center to the first footprint site along its axis.
constexpr int center_offset(int k) noexcept { return (k - 1) / 2; }

std::vector<Site> footprint(const Rod& rod, int k);

// L-infinity distance from the site to the nearest box edge.
int edge_distance(Site s, const BoxSpec& box) noexcept;

// Throws std::out_of_range for sites outside the box.
bool in_peel(Site s, const BoxSpec& box);

bool respects_containment(const Rod& rod, const BoxSpec& box) noexcept;
bool respects_boundary(const Rod& rod, const BoxSpec& box) noexcept;

// Set of hard-core compatible rods inside a box plus a site -> rod index
// occupancy grid. The grid is padded by k on every side so overhanging
// footprints in CenterInBox mode have somewhere to live.
class RodConfig {
 public:
  explicit RodConfig(const BoxSpec& box);

  const BoxSpec& box() const noexcept { return box_; }
  std::span<const Rod> rods() const noexcept { return rods_; }
  std::size_t size() const noexcept { return rods_.size(); }
  bool empty() const noexcept { return rods_.empty(); }
  std::size_t count(Orientation o) const noexcept {
    return o == Orientation::Horizontal ? horizontal_ : rods_.size() - horizontal_;
  }

  // Index of the rod covering the site, or -1. Sites outside the padded grid
  // are reported empty.
  int occupant(Site s) const noexcept;

  // Containment, boundary condition and hard core.
  bool is_compatible(const Rod& rod) const noexcept;
  // As is_compatible, treating the rod at `ignore` as absent.
  bool is_compatible_ignoring(const Rod& rod, std::size_t ignore) const noexcept;
  bool contains(const Rod& rod) const noexcept;

  void apply(const Rod& rod);   // throws RejectedMutation if incompatible
  void remove(const Rod& rod);  // throws RejectedMutation if absent
  void remove_at(std::size_t index);
  // Replace rods()[index] by `rod`; caller guarantees compatibility.
  void replace_at(std::size_t index, const Rod& rod);

  std::vector<Rod> sorted_rods() const;
  // Recomputes occupancy from scratch and compares; throws InvariantViolation.
  void verify() const;

  friend bool operator==(const RodConfig& a, const RodConfig& b) {
    return a.box_ == b.box_ && a.sorted_rods() == b.sorted_rods();
  }

 private:
  std::size_t grid_index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y + pad_) * static_cast<std::size_t>(stride_) +
           static_cast<std::size_t>(x + pad_);
  }
  bool footprint_free(const Rod& rod, int ignore) const noexcept;
  void stamp(const Rod& rod, int value) noexcept;

  BoxSpec box_;
  int pad_;
  int stride_;
  std::vector<Rod> rods_;
  std::vector<std::int32_t> occupancy_;
  std::size_t horizontal_ = 0;
};

struct RegimeParams {
  double z = 0.0;
  int k = 2;
  double epsilon = 1.0;
  bool in_regime = false;
};

// epsilon = max{zk, exp(-z k^2)}; in_regime iff epsilon <= eps0 and k >= k0.
RegimeParams regime_epsilon(double z, int k, double eps0, int k0);

}  // namespace kmer
