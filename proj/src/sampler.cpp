#include "kmer/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kmer/errors.hpp"

namespace kmer {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6b6d6572u};
  engine_.seed(seq);
}

void MoveMix::validate() const {
  for (double p : {insert, remove, translate, rotate})
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ValidationError("move_mix: probabilities must be finite and >= 0");
  if (std::abs(insert + remove + translate + rotate - 1.0) > 1e-12)
    throw ValidationError("move_mix: probabilities must sum to 1");
  if (std::abs(insert - remove) > 1e-12)
    throw ValidationError("move_mix: insert and delete probabilities must be equal");
}

void SamplerParams::validate() const {
  if (!(z >= 0.0) || !std::isfinite(z)) throw ValidationError("z: must be finite and >= 0");
  if (sweeps <= 0) throw ValidationError("sweeps: must be > 0");
  if (thermalization < 0) throw ValidationError("thermalization: must be >= 0");
  if (measurement_interval <= 0) throw ValidationError("measurement_interval: must be > 0");
  mix.validate();
}

double insertion_acceptance(double z, std::size_t positions, std::size_t n) noexcept {
  return std::min(1.0, static_cast<double>(positions) * z / static_cast<double>(n + 1));
}

double deletion_acceptance(double z, std::size_t positions, std::size_t n) noexcept {
  if (z <= 0.0) return 1.0;
  return std::min(1.0, static_cast<double>(n) / (static_cast<double>(positions) * z));
}

double MoveCounters::acceptance_rate(MoveKind kind) const noexcept {
  const auto i = static_cast<std::size_t>(kind);
  return attempted[i] == 0 ? 0.0
                           : static_cast<double>(accepted[i]) / static_cast<double>(attempted[i]);
}

double MoveCounters::overall_rate() const noexcept {
  std::uint64_t a = 0, t = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    a += accepted[i];
    t += attempted[i];
  }
  return t == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(t);
}

RodConfig initial_config(const BoxSpec& box, const SamplerParams& params) {
  RodConfig config(box);
  if (params.init == Initialization::Empty || params.z <= 0.0) return config;

  Orientation o = Orientation::Horizontal;
  forced_orientation(box.bc, o);
  const int spacing = std::max(box.k + 1, static_cast<int>(std::lround(1.0 / params.z)));
  const bool horizontal = o == Orientation::Horizontal;
  const int lines = horizontal ? box.height : box.width;
  const int length = horizontal ? box.width : box.height;
  for (int line = 0; line < lines; ++line) {
    for (int along = (line * 7) % spacing; along < length; along += spacing) {
      const Rod r{o, horizontal ? Site{along, line} : Site{line, along}};
      if (config.is_compatible(r)) config.apply(r);
    }
  }
  return config;
}

Chain::Chain(const BoxSpec& box, const SamplerParams& params, std::uint64_t chain_index)
    : Chain(initial_config(box, params), params, chain_index) {}

Chain::Chain(RodConfig start, const SamplerParams& params, std::uint64_t chain_index)
    : config_(std::move(start)),
      params_(params),
      rng_(params.seed, chain_index),
      positions_(proposal_positions(config_.box())) {
  params_.validate();
  const MoveMix& m = params_.mix;
  thresholds_ = {m.insert, m.insert + m.remove, m.insert + m.remove + m.translate};
}

bool Chain::propose_insertion() {
  ++counters_.attempted[0];
  const BoxSpec& box = config_.box();
  const auto o = static_cast<Orientation>(rng_.below(2));
  const auto site = static_cast<int>(rng_.below(static_cast<std::uint64_t>(box.area())));
  const Rod rod{o, {site % box.width, site / box.width}};
  if (!config_.is_compatible(rod)) return false;
  if (!accept(insertion_acceptance(params_.z, positions_, config_.size()))) return false;
  config_.apply(rod);
  ++counters_.accepted[0];
  return true;
}

bool Chain::propose_deletion() {
  ++counters_.attempted[1];
  const std::size_t n = config_.size();
  if (n == 0) return false;
  const auto i = static_cast<std::size_t>(rng_.below(n));
  if (!accept(deletion_acceptance(params_.z, positions_, n))) return false;
  config_.remove_at(i);
  ++counters_.accepted[1];
  return true;
}

bool Chain::propose_translation() {
  ++counters_.attempted[2];
  const std::size_t n = config_.size();
  if (n == 0) return false;
  const auto i = static_cast<std::size_t>(rng_.below(n));
  const auto dir = rng_.below(4);
  Rod moved = config_.rods()[i];
  const int step = (dir & 1u) ? -1 : 1;
  if (dir < 2)
    moved.center.x += step;
  else
    moved.center.y += step;
  if (!config_.is_compatible_ignoring(moved, i)) return false;
  config_.replace_at(i, moved);
  ++counters_.accepted[2];
  return true;
}

bool Chain::propose_rotation() {
  ++counters_.attempted[3];
  const std::size_t n = config_.size();
  if (n == 0) return false;
  const auto i = static_cast<std::size_t>(rng_.below(n));
  Rod turned = config_.rods()[i];
  turned.orientation = flipped(turned.orientation);
  if (!config_.is_compatible_ignoring(turned, i)) return false;
  config_.replace_at(i, turned);
  ++counters_.accepted[3];
  return true;
}

bool Chain::step() {
  ++steps_;
  const double u = rng_.uniform();
  bool moved;
  if (u < thresholds_[0])
    moved = propose_insertion();
  else if (u < thresholds_[1])
    moved = propose_deletion();
  else if (u < thresholds_[2])
    moved = propose_translation();
  else
    moved = propose_rotation();
#ifndef NDEBUG
  config_.verify();
#endif
  return moved;
}

void Chain::sweep() {
  const int moves = config_.box().area();
  for (int i = 0; i < moves; ++i) step();
  config_.verify();
}

std::vector<Transition> transition_row(const RodConfig& config, const SamplerParams& params) {
  const BoxSpec& box = config.box();
  const std::size_t positions = proposal_positions(box);
  const std::size_t n = config.size();
  const MoveMix& mix = params.mix;
  std::vector<Transition> row;
  double leaving = 0.0;
  auto add = [&](RodConfig next, double p) {
    if (p <= 0.0) return;
    row.push_back({std::move(next), p});
    leaving += p;
  };

  const double a_ins = insertion_acceptance(params.z, positions, n);
  for (int y = 0; y < box.height; ++y)
    for (int x = 0; x < box.width; ++x)
      for (Orientation o : {Orientation::Horizontal, Orientation::Vertical}) {
        const Rod r{o, {x, y}};
        if (!config.is_compatible(r)) continue;
        RodConfig next = config;
        next.apply(r);
        add(std::move(next), mix.insert * a_ins / static_cast<double>(positions));
      }

  if (n > 0) {
    const double per_rod = 1.0 / static_cast<double>(n);
    const double a_del = deletion_acceptance(params.z, positions, n);
    for (std::size_t i = 0; i < n; ++i) {
      RodConfig next = config;
      next.remove_at(i);
      add(std::move(next), mix.remove * per_rod * a_del);

      const Rod base = config.rods()[i];
      const Site shifts[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (Site d : shifts) {
        Rod moved = base;
        moved.center.x += d.x;
        moved.center.y += d.y;
        if (!config.is_compatible_ignoring(moved, i)) continue;
        RodConfig t = config;
        t.replace_at(i, moved);
        add(std::move(t), mix.translate * per_rod * 0.25);
      }

      Rod turned = base;
      turned.orientation = flipped(turned.orientation);
      if (config.is_compatible_ignoring(turned, i)) {
        RodConfig t = config;
        t.replace_at(i, turned);
        add(std::move(t), mix.rotate * per_rod);
      }
    }
  }
  row.push_back({config, 1.0 - leaving});
  return row;
}

Kernel sampler_kernel(const SamplerParams& params) {
  return [params](const RodConfig& c) { return transition_row(c, params); };
}

ChainRun run_chain(const BoxSpec& box, const SamplerParams& params, std::uint64_t chain_index,
                   const FrameObserver& observe) {
  params.validate();
  box.validate();
  Chain chain(box, params, chain_index);
  for (long s = 0; s < params.thermalization; ++s) chain.sweep();
  ChainRun run{chain.config(), {}, 0};
  for (long s = 1; s <= params.sweeps; ++s) {
    chain.sweep();
    if (s % params.measurement_interval == 0) {
      if (observe) observe(s, chain.config());
      ++run.frames;
    }
  }
  run.final_config = chain.config();
  run.counters = chain.counters();
  return run;
}

}  // namespace kmer
