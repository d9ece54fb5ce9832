#include <doctest.h>

#include <algorithm>
#include <set>

#include "adaptm/errors.hpp"
#include "adaptm/windows.hpp"
#include "../oracles.hpp"

using namespace adaptm;

TEST_SUITE("windows") {

TEST_CASE("geometric counts") {
    const auto c = geometric_counts(17);
    CHECK(c == oracle::five_fourths(17));
    CHECK(c.front() == 5);
    CHECK(c.back() == 177);
    const auto f = geometric_counts_from_four(6);
    CHECK(f == std::vector<std::size_t>{4, 5, 6, 7, 9, 12});
}

TEST_CASE("1d windows are the nearest points and nest") {
    const auto xs = equidistant_design(200);
    CHECK(xs.front() == -1.0);
    CHECK(xs.back() == 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(xs[i] == -xs[xs.size() - 1 - i]);
    const auto counts = geometric_counts(17);
    const auto fam = build_family_1d(xs, 0.0, counts);
    CHECK(fam.K() == 16);
    CHECK_FALSE(fam.growth_violated());
    for (std::size_t k = 0; k <= fam.K(); ++k) {
        const auto m = fam.member(k);
        REQUIRE(m.size() == counts[k]);
        double inner = 0.0;
        for (auto i : m) inner = std::max(inner, std::abs(xs[i]));
        std::set<std::size_t> in(m.begin(), m.end());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (!in.count(i)) CHECK(std::abs(xs[i]) >= inner);
        }
        if (k < fam.K()) CHECK(fam.ring_indices(k).size() == counts[k + 1] - counts[k]);
    }
    // 58-point window is [-0.29, 0.29]
    double w = 0.0;
    for (auto i : fam.member(11)) w = std::max(w, std::abs(xs[i]));
    CHECK(w == doctest::Approx(0.2915).epsilon(0.01));
}

TEST_CASE("family errors") {
    const auto xs = equidistant_design(10);
    CHECK_THROWS_AS(build_family_1d(xs, 0.0, std::vector<std::size_t>{3, 3}), PreconditionError);
    CHECK_THROWS_AS(build_family_1d(xs, 0.0, std::vector<std::size_t>{5, 20}), PreconditionError);
    CHECK_THROWS_AS(WindowFamily({0, 1}, {}), PreconditionError);
    const auto fam = build_family_1d(xs, 0.0, std::vector<std::size_t>{2, 9});
    CHECK(fam.growth_violated());
    CHECK_THROWS_AS(fam.ring_indices(1), PreconditionError);
}

TEST_CASE("disc counts") {
    const std::vector<double> radii{1.5};
    CHECK(build_family_2d(64, 64, {30, 30}, radii).count(0) == 9);
    CHECK(build_family_2d(64, 64, {0, 0}, radii).count(0) == 4);
}

TEST_CASE("interior disc counts match direct lattice counts") {
    const auto radii = geometric_radii(1.5, std::sqrt(1.4), 13);
    const DiscStencil st(radii);
    const auto raw = st.raw_counts_at(200, 200, {100, 100});
    for (std::size_t k = 0; k < radii.size(); ++k) CHECK(raw[k] == oracle::disc_points(radii[k]));
}

TEST_CASE("disc windows are invariant under the square's symmetries") {
    const auto radii = geometric_radii(1.5, std::sqrt(1.4), 10);
    const int n = 41, c = 20;
    const auto fam = build_family_2d(n, n, {c, c}, radii);
    auto maps = std::vector<std::pair<int, int> (*)(int, int)>{
        [](int x, int y) { return std::pair{y, x}; },   [](int x, int y) { return std::pair{-x, y}; },
        [](int x, int y) { return std::pair{x, -y}; },  [](int x, int y) { return std::pair{-y, x}; },
        [](int x, int y) { return std::pair{-x, -y}; }, [](int x, int y) { return std::pair{y, -x}; },
        [](int x, int y) { return std::pair{-y, -x}; }};
    for (std::size_t k = 0; k <= fam.K(); ++k) {
        std::set<std::pair<int, int>> pts;
        for (auto i : fam.member(k)) pts.insert({static_cast<int>(i % n) - c, static_cast<int>(i / n) - c});
        for (auto f : maps) {
            for (const auto& [x, y] : pts) REQUIRE(pts.count(f(x, y)) == 1);
        }
    }
}

TEST_CASE("clipped discs drop levels that do not grow") {
    const std::vector<double> radii{1.0, 1.2, 2.0};
    const DiscStencil st(radii);
    const auto raw = st.raw_counts_at(10, 10, {0, 0});
    CHECK(raw == std::vector<std::size_t>{3, 3, 6});
    const auto fam = st.family_at(10, 10, {0, 0});
    CHECK(std::vector<std::size_t>(fam.counts().begin(), fam.counts().end()) == std::vector<std::size_t>{3, 6});
    CHECK_THROWS_AS(st.family_at(10, 10, {10, 0}), PreconditionError);
}

}
