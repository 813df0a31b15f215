#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "kmer/lattice.hpp"

namespace kmer {

inline constexpr int kTraceSchemaVersion = 1;

// Gzip-compressed newline-delimited JSON. Line 1 is a header describing the
// box; every further line is {"sweep": s, "rods": [["H", x, y], ...]} with
// rods in canonical sorted order.
class TraceWriter {
 public:
  TraceWriter(const std::filesystem::path& path, const BoxSpec& box, std::uint64_t chain);
  ~TraceWriter();
  TraceWriter(const TraceWriter&) = delete;
  TraceWriter& operator=(const TraceWriter&) = delete;

  void write(long sweep, const RodConfig& config);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TraceHeader {
  BoxSpec box;
  std::uint64_t chain = 0;
};

// Calls `frame` for every frame. Rods are re-applied through RodConfig, so a
// trace with overlapping rods raises RejectedMutation. Returns frame count.
std::size_t read_trace(const std::filesystem::path& path, TraceHeader& header,
                       const std::function<void(long sweep, const RodConfig&)>& frame);

}  // namespace kmer
