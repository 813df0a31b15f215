#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmer/lattice.hpp"
#include "kmer/observables.hpp"
#include "kmer/sampler.hpp"

namespace kmer {

inline constexpr int kConfigSchemaVersion = 1;

enum class RegionMode : std::uint8_t { Box, Bulk };
std::string_view to_string(RegionMode m) noexcept;

struct ObservablesConfig {
  // Region over which rho, M and correlations are measured.
  RegionMode region = RegionMode::Box;
  std::optional<EventSpec> event;
  std::vector<Site> separations;
};

// Fully resolved run description; every default is filled in by parsing.
struct RunConfig {
  BoxSpec box;
  SamplerParams sampler;
  ObservablesConfig observables;
  int chains = 1;
  std::string output_dir = "out";
  bool trace = false;

  Region measurement_region() const;
  // Re-checks every module precondition; throws ValidationError naming the field.
  void validate() const;
};

// Accepts a run config or a run manifest (its embedded config is used).
// Unknown keys are errors. Throws ValidationError.
RunConfig parse_config_text(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace kmer
