#include <doctest.h>

#include <string>

#include "kmer/config.hpp"
#include "kmer/errors.hpp"

using namespace kmer;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

const char* kMinimal = R"({"L":40,"k":8,"z":0.06,"bc":"plus","sweeps":1000,"seed":1})";

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const RunConfig c = parse_config_text(kMinimal);
  CHECK(c.box.width == 40);
  CHECK(c.box.height == 40);
  CHECK(c.box.k == 8);
  CHECK(c.box.bc == Boundary::Plus);
  CHECK(c.box.containment == Containment::CenterInBox);
  CHECK(c.sampler.z == 0.06);
  CHECK(c.sampler.sweeps == 1000);
  CHECK(c.sampler.thermalization == 250);
  CHECK(c.sampler.measurement_interval == 1);
  CHECK(c.sampler.mix == MoveMix{});
  CHECK(c.sampler.init == Initialization::Empty);
  CHECK(c.chains == 1);
  CHECK(c.output_dir == "out");
  CHECK_FALSE(c.trace);
  CHECK(c.observables.region == RegionMode::Bulk);
  REQUIRE(c.observables.event.has_value());
  CHECK(c.observables.event->target == Orientation::Vertical);
  CHECK(c.measurement_region() == Region{16, 16, 24, 24});
  for (Site d : c.observables.separations) CHECK((d.x < 8 && d.y < 8));
}

TEST_CASE("open boxes measure over the whole box") {
  const RunConfig c = parse_config_text(R"({"L":40,"k":8,"z":0.001,"bc":"open","sweeps":10,"seed":3})");
  CHECK(c.observables.region == RegionMode::Box);
  CHECK(c.measurement_region() == Region{0, 0, 40, 40});
}

TEST_CASE("bad values name the field") {
  const std::string bc = error_of(R"({"L":40,"k":8,"z":0.06,"bc":"sideways","sweeps":10,"seed":1})");
  CHECK(bc.find("bc") != std::string::npos);
  CHECK(bc.find("sideways") != std::string::npos);
  CHECK(bc.find("plus") != std::string::npos);
  CHECK(bc.find("minus") != std::string::npos);
  CHECK(bc.find("open") != std::string::npos);
  CHECK(error_of(R"({"L":40,"k":8,"z":-1,"bc":"plus","sweeps":10,"seed":1})").find("z") == 0);
  CHECK(error_of(R"({"L":40,"k":1,"z":0.1,"bc":"plus","sweeps":10,"seed":1})").find("k") == 0);
  CHECK(error_of(R"({"L":40,"k":8,"z":0.1,"sweeps":10,"seed":1,"chains":0})").find("chains") == 0);
  CHECK(error_of(R"({"L":40,"k":8,"z":0.1,"sweeps":10,"seed":1,"move_mix":{"insert":0.5,"delete":0.3,"translate":0.1,"rotate":0.1}})")
            .find("move_mix") == 0);
  CHECK(error_of(R"({"L":40,"k":8,"sweeps":10,"seed":1})").find("z") == 0);
  CHECK(error_of("{not json").find("JSON") != std::string::npos);
}

TEST_CASE("unknown keys are rejected") {
  const std::string e = error_of(R"({"L":40,"k":8,"z":0.06,"bc":"plus","sweeps":10,"seed":1,"sweps":5})");
  CHECK(e.find("sweps") != std::string::npos);
  CHECK(error_of(R"({"L":40,"k":8,"z":0.06,"sweeps":10,"seed":1,"event":{"centre":[20,20]}})").find("centre") !=
        std::string::npos);
}

TEST_CASE("event windows must avoid the peel") {
  const std::string e =
      error_of(R"({"L":40,"k":8,"z":0.06,"bc":"plus","sweeps":10,"seed":1,"event":{"center":[3,20]}})");
  CHECK(e.find("event") != std::string::npos);
  CHECK_NOTHROW(parse_config_text(
      R"({"L":80,"k":8,"z":0.06,"bc":"plus","sweeps":10,"seed":1,"event":{"center":[30,50],"side":4}})"));
}

TEST_CASE("serialization round-trips resolved configs") {
  for (const char* text :
       {kMinimal,
        R"({"width":30,"height":12,"k":3,"z":0.2,"bc":"open","containment":"fully_contained","sweeps":50,
            "thermalization":0,"seed":18446744073709551615,"measurement_interval":3,"init":"seeded_nematic",
            "move_mix":{"insert":0.3,"delete":0.3,"translate":0.2,"rotate":0.2},"chains":3,
            "output_dir":"runs/a","trace":true,"separations":[[1,0],[0,2]],"event":null})"}) {
    const RunConfig c = parse_config_text(text);
    const RunConfig again = parse_config_text(serialize_config(c));
    CHECK(again == c);
    CHECK(serialize_config(again) == serialize_config(c));
  }
}

TEST_CASE("manifests are accepted as configs") {
  const RunConfig c = parse_config_text(kMinimal);
  const std::string manifest =
      std::string(R"({"manifest_schema_version":1,"code_version":"x","config":)") + serialize_config(c) + "}";
  CHECK(parse_config_text(manifest) == c);
}
