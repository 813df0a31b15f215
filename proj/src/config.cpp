#include "kmer/config.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "kmer/errors.hpp"

namespace kmer {

using nlohmann::json;

std::string_view to_string(RegionMode m) noexcept { return m == RegionMode::Box ? "box" : "bulk"; }

Region RunConfig::measurement_region() const {
  if (observables.region == RegionMode::Bulk) return Region::bulk(box);
  return Region::whole(box);
}

void RunConfig::validate() const {
  box.validate();
  sampler.validate();
  if (chains < 1) throw ValidationError("chains: must be >= 1");
  if (output_dir.empty()) throw ValidationError("output_dir: must not be empty");
  const Region region = measurement_region();
  if (region.empty())
    throw ValidationError("region: measurement region is empty (box has no bulk outside the peel)");
  if (observables.event) observables.event->validate(box);
  for (Site d : observables.separations)
    if (std::abs(d.x) >= region.width() || std::abs(d.y) >= region.height())
      throw ValidationError("separations: displacement (" + std::to_string(d.x) + "," +
                            std::to_string(d.y) + ") does not fit in the measurement region");
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

template <class T>
T get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) fail(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) return j.get<T>();
      if (j.get<long long>() < 0) fail(field, "must be >= 0");
      return static_cast<T>(j.get<long long>());
    } else {
      if (j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(std::numeric_limits<T>::max()))
        fail(field, "out of range");
      const long long v = j.get<long long>();
      if (v < std::numeric_limits<T>::min() || v > std::numeric_limits<T>::max()) fail(field, "out of range");
      return static_cast<T>(v);
    }
  } else {
    return j.get<T>();
  }
}

std::string get_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) fail(field, "expected true or false");
  return j.get<bool>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(where + it.key(), "unknown key (allowed: " + list + ")");
    }
}

Boundary parse_bc(const std::string& s) {
  if (s == "open") return Boundary::Open;
  if (s == "plus") return Boundary::Plus;
  if (s == "minus") return Boundary::Minus;
  fail("bc", "got \"" + s + "\", allowed values are \"open\", \"plus\", \"minus\"");
}

Containment parse_containment(const std::string& s) {
  if (s == "center_in_box") return Containment::CenterInBox;
  if (s == "fully_contained") return Containment::FullyContained;
  fail("containment", "got \"" + s + "\", allowed values are \"center_in_box\", \"fully_contained\"");
}

Orientation parse_orientation(const std::string& s, const std::string& field) {
  if (s == "horizontal" || s == "H") return Orientation::Horizontal;
  if (s == "vertical" || s == "V") return Orientation::Vertical;
  fail(field, "got \"" + s + "\", allowed values are \"horizontal\", \"vertical\"");
}

Site parse_pair(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) fail(field, "expected [x, y]");
  return {get_number<int>(j[0], field), get_number<int>(j[1], field)};
}

const std::set<std::string> kTopKeys = {
    "schema_version", "L",        "width",   "height",     "k",          "containment",
    "bc",             "z",        "sweeps",  "thermalization", "seed",   "move_mix",
    "measurement_interval", "init", "region", "event",     "separations", "chains",
    "output_dir",     "trace"};

}  // namespace

namespace detail {

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  reject_unknown(j, kTopKeys, "");
  RunConfig c;

  if (j.contains("schema_version") && get_number<int>(j["schema_version"], "schema_version") != kConfigSchemaVersion)
    fail("schema_version", "unsupported version (expected " + std::to_string(kConfigSchemaVersion) + ")");

  if (j.contains("L")) {
    const int L = get_number<int>(j["L"], "L");
    if (L < 1) fail("L", "must be >= 1");
    c.box.width = c.box.height = L;
    if (j.contains("width") && get_number<int>(j["width"], "width") != L) fail("width", "conflicts with L");
    if (j.contains("height") && get_number<int>(j["height"], "height") != L) fail("height", "conflicts with L");
  } else {
    if (!j.contains("width") || !j.contains("height")) fail("L", "required (or both width and height)");
    c.box.width = get_number<int>(j["width"], "width");
    c.box.height = get_number<int>(j["height"], "height");
    if (c.box.width < 1) fail("width", "must be >= 1");
    if (c.box.height < 1) fail("height", "must be >= 1");
  }
  if (!j.contains("k")) fail("k", "required");
  c.box.k = get_number<int>(j["k"], "k");
  if (c.box.k < 2) fail("k", "must be >= 2");
  if (j.contains("containment")) c.box.containment = parse_containment(get_string(j["containment"], "containment"));
  if (j.contains("bc")) c.box.bc = parse_bc(get_string(j["bc"], "bc"));

  if (!j.contains("z")) fail("z", "required");
  c.sampler.z = get_number<double>(j["z"], "z");
  if (!(c.sampler.z >= 0.0) || !std::isfinite(c.sampler.z)) fail("z", "must be finite and >= 0");
  if (!j.contains("sweeps")) fail("sweeps", "required");
  c.sampler.sweeps = get_number<long>(j["sweeps"], "sweeps");
  if (c.sampler.sweeps <= 0) fail("sweeps", "must be > 0");
  c.sampler.thermalization = j.contains("thermalization")
                                 ? get_number<long>(j["thermalization"], "thermalization")
                                 : c.sampler.sweeps / 4;
  if (c.sampler.thermalization < 0) fail("thermalization", "must be >= 0");
  if (!j.contains("seed")) fail("seed", "required");
  c.sampler.seed = get_number<std::uint64_t>(j["seed"], "seed");
  if (j.contains("measurement_interval")) {
    c.sampler.measurement_interval = get_number<long>(j["measurement_interval"], "measurement_interval");
    if (c.sampler.measurement_interval <= 0) fail("measurement_interval", "must be > 0");
  }
  if (j.contains("init")) {
    const std::string s = get_string(j["init"], "init");
    if (s == "empty")
      c.sampler.init = Initialization::Empty;
    else if (s == "seeded_nematic")
      c.sampler.init = Initialization::SeededNematic;
    else
      fail("init", "got \"" + s + "\", allowed values are \"empty\", \"seeded_nematic\"");
  }
  if (j.contains("move_mix")) {
    const json& m = j["move_mix"];
    if (!m.is_object()) fail("move_mix", "expected an object");
    reject_unknown(m, {"insert", "delete", "translate", "rotate"}, "move_mix.");
    for (const char* key : {"insert", "delete", "translate", "rotate"})
      if (!m.contains(key)) fail(std::string("move_mix.") + key, "required when move_mix is given");
    c.sampler.mix.insert = get_number<double>(m["insert"], "move_mix.insert");
    c.sampler.mix.remove = get_number<double>(m["delete"], "move_mix.delete");
    c.sampler.mix.translate = get_number<double>(m["translate"], "move_mix.translate");
    c.sampler.mix.rotate = get_number<double>(m["rotate"], "move_mix.rotate");
  }

  const bool has_bulk = !Region::bulk(c.box).empty();
  if (j.contains("region")) {
    const std::string s = get_string(j["region"], "region");
    if (s == "box")
      c.observables.region = RegionMode::Box;
    else if (s == "bulk")
      c.observables.region = RegionMode::Bulk;
    else
      fail("region", "got \"" + s + "\", allowed values are \"box\", \"bulk\"");
  } else {
    c.observables.region = (c.box.bc != Boundary::Open && has_bulk) ? RegionMode::Bulk : RegionMode::Box;
  }

  if (j.contains("event")) {
    const json& e = j["event"];
    if (e.is_null()) {
      c.observables.event.reset();
    } else {
      if (!e.is_object()) fail("event", "expected an object or null");
      reject_unknown(e, {"center", "side", "orientation", "include_vacuous", "min_rods"}, "event.");
      EventSpec ev = default_event(c.box);
      if (e.contains("center")) ev.center = parse_pair(e["center"], "event.center");
      if (e.contains("side")) ev.side = get_number<int>(e["side"], "event.side");
      if (e.contains("orientation"))
        ev.target = parse_orientation(get_string(e["orientation"], "event.orientation"), "event.orientation");
      if (e.contains("include_vacuous")) ev.include_vacuous = get_bool(e["include_vacuous"], "event.include_vacuous");
      if (e.contains("min_rods")) ev.min_rods = get_number<std::size_t>(e["min_rods"], "event.min_rods");
      c.observables.event = ev;
    }
  } else if (has_bulk) {
    const EventSpec ev = default_event(c.box);
    if (Region::bulk(c.box).contains(ev.window())) c.observables.event = ev;
  }

  if (j.contains("separations")) {
    const json& s = j["separations"];
    if (!s.is_array()) fail("separations", "expected an array of [dx, dy]");
    for (const auto& p : s) c.observables.separations.push_back(parse_pair(p, "separations"));
  } else {
    const Region r = c.measurement_region();
    for (Site d : default_separations(c.box.k))
      if (std::abs(d.x) < r.width() && std::abs(d.y) < r.height()) c.observables.separations.push_back(d);
  }

  if (j.contains("chains")) c.chains = get_number<int>(j["chains"], "chains");
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("trace")) c.trace = get_bool(j["trace"], "trace");

  c.validate();
  if (c.box.bulk_is_thin())
    std::cerr << "warning: box side <= 4k with a +/- boundary condition leaves little or no bulk\n";
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  if (c.box.is_square()) {
    j["L"] = c.box.width;
  } else {
    j["width"] = c.box.width;
    j["height"] = c.box.height;
  }
  j["k"] = c.box.k;
  j["containment"] = std::string(to_string(c.box.containment));
  j["bc"] = std::string(to_string(c.box.bc));
  j["z"] = c.sampler.z;
  j["sweeps"] = c.sampler.sweeps;
  j["thermalization"] = c.sampler.thermalization;
  j["seed"] = c.sampler.seed;
  j["measurement_interval"] = c.sampler.measurement_interval;
  j["init"] = c.sampler.init == Initialization::Empty ? "empty" : "seeded_nematic";
  j["move_mix"] = {{"insert", c.sampler.mix.insert},
                   {"delete", c.sampler.mix.remove},
                   {"translate", c.sampler.mix.translate},
                   {"rotate", c.sampler.mix.rotate}};
  j["region"] = std::string(to_string(c.observables.region));
  if (c.observables.event) {
    const EventSpec& e = *c.observables.event;
    j["event"] = {{"center", {e.center.x, e.center.y}},
                  {"side", e.side},
                  {"orientation", e.target == Orientation::Horizontal ? "horizontal" : "vertical"},
                  {"include_vacuous", e.include_vacuous},
                  {"min_rods", e.min_rods}};
  } else {
    j["event"] = nullptr;
  }
  j["separations"] = json::array();
  for (Site d : c.observables.separations) j["separations"].push_back({d.x, d.y});
  j["chains"] = c.chains;
  j["output_dir"] = c.output_dir;
  j["trace"] = c.trace;
  return j;
}

}  // namespace detail

RunConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("manifest_schema_version")) {
    if (!j.contains("config")) throw ValidationError("manifest: missing config");
    return detail::config_from_json(j["config"]);
  }
  return detail::config_from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const RunConfig& config) { return detail::config_to_json(config).dump(2); }

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto same_event = [](const std::optional<EventSpec>& x, const std::optional<EventSpec>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->center == y->center && x->side == y->side && x->target == y->target &&
           x->include_vacuous == y->include_vacuous && x->min_rods == y->min_rods;
  };
  return a.box == b.box && a.sampler == b.sampler && a.observables.region == b.observables.region &&
         same_event(a.observables.event, b.observables.event) &&
         a.observables.separations == b.observables.separations && a.chains == b.chains &&
         a.output_dir == b.output_dir && a.trace == b.trace;
}

}  // namespace kmer
