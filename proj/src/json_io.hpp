#pragma once

#include <json.hpp>

#include "kmer/config.hpp"

namespace kmer::detail {

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

}  // namespace kmer::detail
