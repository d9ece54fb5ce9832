#include <doctest.h>

#include <sstream>

#include "adaptm/artifact.hpp"
#include "adaptm/errors.hpp"
#include "adaptm/experiments.hpp"
#include "adaptm/imaging.hpp"

using namespace adaptm;

namespace {

const CalibBundle& small_bundle() {
    static const CalibBundle b = [] {
        SectionRequest req;
        req.runs = 1000;
        req.seed = 3;
        req.geometry = line_geometry(200, geometric_counts(12));
        return calibrate_bundle(req, benchmark_sections());
    }();
    return b;
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("bundle round trip is byte exact") {
    const auto text = bundle_to_string(small_bundle());
    const auto back = parse_bundle(text);
    REQUIRE(back.sections.size() == 4);
    CHECK(bundle_to_string(back) == text);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& a = small_bundle().sections[i];
        const auto& b = back.sections[i];
        CHECK(a.key() == b.key());
        CHECK(a.levels.s == b.levels.s);
        CHECK(a.levels.s_ring == b.levels.s_ring);
        CHECK(a.result.z.z == b.result.z.z);
        CHECK(a.result.z.zeta == b.result.z.zeta);
        CHECK(a.pair_levels == b.pair_levels);
        CHECK(a.geometry == b.geometry);
        CHECK(a.config_hash() == b.config_hash());
    }
    CHECK(back.find(LossKind::median(), SelectionRule::RingRR)->key() == "median-rr");
    CHECK(back.find(LossKind::huber(1.0), SelectionRule::RingRR) == nullptr);
    CHECK_THROWS_AS(back.require(LossKind::huber(1.0), SelectionRule::RingRR), InputError);
}

TEST_CASE("tampered settings are rejected") {
    auto text = bundle_to_string(small_bundle());
    const auto pos = text.find("alpha: 1");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 8, "alpha: 2");
    CHECK_THROWS_AS(parse_bundle(text), InputError);
    CHECK_THROWS_AS(parse_bundle("not a calibration"), InputError);
    CHECK_THROWS_AS(load_bundle("/nonexistent/file.cal"), InputError);
}

TEST_CASE("disc sections round trip") {
    SectionRequest req;
    req.runs = 1000;
    req.seed = 5;
    req.geometry = disc_geometry(default_radii());
    const auto s = calibrate_section(req);
    CalibBundle b{{s}};
    const auto back = parse_bundle(bundle_to_string(b));
    CHECK(back.sections[0].geometry == s.geometry);
    CHECK(bundle_to_string(back) == bundle_to_string(b));
}

TEST_CASE("fnv1a") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

}
