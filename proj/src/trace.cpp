#include "kmer/trace.hpp"

#include <zlib.h>

#include <json.hpp>
#include <string>

#include "kmer/errors.hpp"

namespace kmer {

using nlohmann::json;

struct TraceWriter::Impl {
  gzFile file = nullptr;
  std::filesystem::path path;
};

TraceWriter::TraceWriter(const std::filesystem::path& path, const BoxSpec& box, std::uint64_t chain)
    : impl_(std::make_unique<Impl>()) {
  impl_->path = path;
  impl_->file = gzopen(path.c_str(), "wb");
  if (!impl_->file) throw IoError("trace: cannot open " + path.string() + " for writing");
  json h = {{"schema_version", kTraceSchemaVersion},
            {"width", box.width},
            {"height", box.height},
            {"k", box.k},
            {"containment", std::string(to_string(box.containment))},
            {"bc", std::string(to_string(box.bc))},
            {"chain", chain}};
  const std::string line = h.dump() + "\n";
  if (gzwrite(impl_->file, line.data(), static_cast<unsigned>(line.size())) != static_cast<int>(line.size()))
    throw IoError("trace: write failed for " + path.string());
}

TraceWriter::~TraceWriter() {
  if (impl_ && impl_->file) gzclose(impl_->file);
}

void TraceWriter::write(long sweep, const RodConfig& config) {
  std::string line = "{\"sweep\":" + std::to_string(sweep) + ",\"rods\":[";
  bool first = true;
  for (const Rod& r : config.sorted_rods()) {
    if (!first) line += ',';
    first = false;
    line += "[\"";
    line += to_string(r.orientation);
    line += "\"," + std::to_string(r.center.x) + "," + std::to_string(r.center.y) + "]";
  }
  line += "]}\n";
  if (gzwrite(impl_->file, line.data(), static_cast<unsigned>(line.size())) != static_cast<int>(line.size()))
    throw IoError("trace: write failed for " + impl_->path.string());
}

void TraceWriter::close() {
  if (impl_->file && gzclose(impl_->file) != Z_OK) {
    impl_->file = nullptr;
    throw IoError("trace: close failed for " + impl_->path.string());
  }
  impl_->file = nullptr;
}

namespace {

bool read_line(gzFile f, std::string& out) {
  out.clear();
  char buf[8192];
  while (gzgets(f, buf, sizeof buf)) {
    out += buf;
    if (!out.empty() && out.back() == '\n') {
      out.pop_back();
      return true;
    }
  }
  return !out.empty();
}

Boundary bc_from(const std::string& s) {
  if (s == "plus") return Boundary::Plus;
  if (s == "minus") return Boundary::Minus;
  if (s == "open") return Boundary::Open;
  throw ValidationError("trace: unknown bc " + s);
}

}  // namespace

std::size_t read_trace(const std::filesystem::path& path, TraceHeader& header,
                       const std::function<void(long sweep, const RodConfig&)>& frame) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IoError("trace: cannot open " + path.string());
  std::unique_ptr<gzFile_s, int (*)(gzFile)> guard(f, gzclose);
  std::string line;
  if (!read_line(f, line)) throw ValidationError("trace: empty file " + path.string());
  try {
    const json h = json::parse(line);
    if (h.at("schema_version").get<int>() != kTraceSchemaVersion)
      throw ValidationError("trace: unsupported schema_version");
    header.box.width = h.at("width").get<int>();
    header.box.height = h.at("height").get<int>();
    header.box.k = h.at("k").get<int>();
    header.box.containment = h.at("containment").get<std::string>() == "fully_contained"
                                 ? Containment::FullyContained
                                 : Containment::CenterInBox;
    header.box.bc = bc_from(h.at("bc").get<std::string>());
    header.chain = h.value("chain", std::uint64_t{0});
    header.box.validate();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("trace: bad header: ") + e.what());
  }
  std::size_t frames = 0;
  while (read_line(f, line)) {
    if (line.empty()) continue;
    RodConfig config(header.box);
    long sweep = 0;
    try {
      const json fr = json::parse(line);
      sweep = fr.at("sweep").get<long>();
      for (const auto& r : fr.at("rods")) {
        const std::string o = r.at(0).get<std::string>();
        const Rod rod{o == "V" ? Orientation::Vertical : Orientation::Horizontal,
                      {r.at(1).get<int>(), r.at(2).get<int>()}};
        config.apply(rod);
      }
    } catch (const json::exception& e) {
      throw ValidationError("trace: bad frame " + std::to_string(frames + 1) + ": " + e.what());
    }
    frame(sweep, config);
    ++frames;
  }
  return frames;
}

}  // namespace kmer
