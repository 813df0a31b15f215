#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kmer/lattice.hpp"
#include "kmer/oracle.hpp"
#include "kmer/rng.hpp"

namespace kmer {

enum class MoveKind : std::uint8_t { Insert = 0, Delete = 1, Translate = 2, Rotate = 3 };

struct MoveMix {
  double insert = 0.4;
  double remove = 0.4;
  double translate = 0.1;
  double rotate = 0.1;

  void validate() const;
  bool operator==(const MoveMix&) const = default;
};

enum class Initialization : std::uint8_t { Empty, SeededNematic };

struct SamplerParams {
  double z = 0.0;
  long sweeps = 1;
  long thermalization = 0;
  std::uint64_t seed = 1;
  MoveMix mix;
  long measurement_interval = 1;
  Initialization init = Initialization::Empty;

  // Throws ValidationError naming the offending field.
  void validate() const;
  bool operator==(const SamplerParams&) const = default;
};

// Metropolis acceptance for inserting one rod drawn from `positions`
// (orientation x center) candidates into a configuration holding n rods.
double insertion_acceptance(double z, std::size_t positions, std::size_t n) noexcept;
// Reverse move: deleting one of n >= 1 rods.
double deletion_acceptance(double z, std::size_t positions, std::size_t n) noexcept;

constexpr std::size_t proposal_positions(const BoxSpec& box) noexcept {
  return 2 * static_cast<std::size_t>(box.area());
}

struct MoveCounters {
  std::array<std::uint64_t, 4> attempted{};
  std::array<std::uint64_t, 4> accepted{};

  double acceptance_rate(MoveKind kind) const noexcept;
  double overall_rate() const noexcept;
};

// Starting configuration per SamplerParams::init. SeededNematic lays down a
// sparse lattice of rods aligned with the boundary condition (horizontal for
// Open), spaced so the density is roughly z.
RodConfig initial_config(const BoxSpec& box, const SamplerParams& params);

class Chain {
 public:
  Chain(const BoxSpec& box, const SamplerParams& params, std::uint64_t chain_index = 0);
  Chain(RodConfig start, const SamplerParams& params, std::uint64_t chain_index = 0);

  bool propose_insertion();
  bool propose_deletion();
  bool propose_translation();
  bool propose_rotation();

  // One elementary move drawn from the move mix.
  bool step();
  // box.area() elementary moves.
  void sweep();

  const RodConfig& config() const noexcept { return config_; }
  const BoxSpec& box() const noexcept { return config_.box(); }
  const SamplerParams& params() const noexcept { return params_; }
  std::uint64_t steps() const noexcept { return steps_; }
  const MoveCounters& counters() const noexcept { return counters_; }

 private:
  bool accept(double probability) {
    return probability >= 1.0 || rng_.uniform() < probability;
  }

  RodConfig config_;
  SamplerParams params_;
  Rng rng_;
  std::uint64_t steps_ = 0;
  MoveCounters counters_;
  std::size_t positions_;
  std::array<double, 3> thresholds_;
};

// Exact next-state distribution of one Chain::step from `config`.
std::vector<Transition> transition_row(const RodConfig& config, const SamplerParams& params);
Kernel sampler_kernel(const SamplerParams& params);

using FrameObserver = std::function<void(long sweep, const RodConfig& config)>;

struct ChainRun {
  RodConfig final_config;
  MoveCounters counters;
  long frames = 0;
};

// Thermalizes, then calls `observe` every measurement_interval sweeps.
// Sweep indices passed to the observer count production sweeps from 1.
ChainRun run_chain(const BoxSpec& box, const SamplerParams& params, std::uint64_t chain_index,
                   const FrameObserver& observe);

}  // namespace kmer
