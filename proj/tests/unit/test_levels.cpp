#include <doctest.h>

#include <cmath>

#include "adaptm/calibration.hpp"
#include "adaptm/errors.hpp"
#include "adaptm/levels.hpp"
#include "adaptm/windows.hpp"

using namespace adaptm;

namespace {

WindowFamily line_family(std::size_t levels = 17) {
    const auto xs = equidistant_design(200);
    return build_family_1d(xs, 0.0, geometric_counts(levels));
}

}  // namespace

TEST_SUITE("error_levels") {

TEST_CASE("exact mean levels") {
    const auto fam = line_family();
    const auto lv = levels_exact_mean(fam);
    REQUIRE(lv.K() == 16);
    for (std::size_t j = 0; j <= lv.K(); ++j) CHECK(lv.s[j] == doctest::Approx(1.0 / std::sqrt(double(fam.count(j)))));
    for (std::size_t k = 0; k < lv.K(); ++k) {
        const double ring = double(fam.count(k + 1) - fam.count(k));
        for (std::size_t j = 0; j <= k; ++j) {
            CHECK(lv.s_ring.at(k, j) == doctest::Approx(std::sqrt(1.0 / ring + 1.0 / fam.count(j))));
        }
    }
    // N = {5, 6}: s_00 = sqrt(1/1 + 1/5)
    CHECK(lv.s_ring.at(0, 0) == doctest::Approx(std::sqrt(1.2)));
    CHECK_THROWS(levels_exact_mean(fam, 1.0));
}

TEST_CASE("Monte Carlo agrees with exact mean levels") {
    const auto fam = line_family();
    const auto exact = levels_exact_mean(fam);
    const auto mc = levels_mc(fam, LossKind::mean(), NoiseKind::laplace(), 20000, 2.0, 3);
    CHECK_FALSE(mc.few_runs_warning);
    for (std::size_t j = 0; j <= exact.K(); ++j) CHECK(mc.s[j] == doctest::Approx(exact.s[j]).epsilon(0.03));
    for (std::size_t k = 0; k < exact.K(); ++k) {
        for (std::size_t j = 0; j <= k; ++j) CHECK(mc.s_ring.at(k, j) == doctest::Approx(exact.s_ring.at(k, j)).epsilon(0.03));
    }
    const auto pairs = lepski_pair_levels_exact_mean(fam);
    const auto pairs_mc = lepski_pair_levels_mc(fam, LossKind::mean(), NoiseKind::gaussian(), 20000, 2.0, 3);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        for (std::size_t l = 0; l <= k; ++l) {
            CHECK(pairs.at(k, l) == doctest::Approx(std::sqrt(1.0 / fam.count(l) - 1.0 / fam.count(k + 1))));
            CHECK(pairs_mc.at(k, l) == doctest::Approx(pairs.at(k, l)).epsilon(0.03));
        }
    }
}

TEST_CASE("asymptotic median levels approach Monte Carlo for large windows") {
    const auto fam = line_family();
    const NoiseKind g = NoiseKind::gaussian();
    const auto asym = levels_asymptotic(fam, LossKind::median(), g.pdf(0.0), 2.0);
    const auto mc = levels_mc(fam, LossKind::median(), g, 20000, 2.0, 8);
    for (std::size_t j = 8; j <= fam.K(); ++j) CHECK(asym.s[j] == doctest::Approx(mc.s[j]).epsilon(0.05));
    CHECK(asym.s[16] == doctest::Approx(std::sqrt(M_PI / 2.0 / 177.0)));
    // ring and window are disjoint
    const std::size_t k = 12, j = 5;
    const double ring = double(fam.count(k + 1) - fam.count(k));
    CHECK(asym.s_ring.at(k, j) == doctest::Approx(std::sqrt(M_PI / 2.0 * (1.0 / ring + 1.0 / fam.count(j)))));
}

TEST_CASE("moment order") {
    CHECK(normal_abs_moment_root(2.0) == doctest::Approx(1.0));
    CHECK(normal_abs_moment_root(1.0) == doctest::Approx(std::sqrt(2.0 / M_PI)));
    CHECK(normal_abs_moment_root(4.0) == doctest::Approx(std::pow(3.0, 0.25)));
}

TEST_CASE("scaling and warnings") {
    const auto fam = line_family(8);
    const auto lv = levels_exact_mean(fam).scaled(2.0);
    CHECK(lv.s[0] == doctest::Approx(2.0 / std::sqrt(5.0)));
    const auto few = levels_mc(fam, LossKind::median(), NoiseKind::laplace(), 500, 2.0, 1);
    CHECK(few.few_runs_warning);
    const auto a = levels_mc(fam, LossKind::huber(1.0), NoiseKind::laplace(), 2000, 2.0, 1, 1);
    const auto b = levels_mc(fam, LossKind::huber(1.0), NoiseKind::laplace(), 2000, 2.0, 1, 3);
    CHECK(a.s == b.s);
    CHECK(a.s_ring == b.s_ring);
}

TEST_CASE("quantile levels use the density at the quantile") {
    const auto fam = line_family(10);
    const NoiseKind lap = NoiseKind::laplace();
    const double a = 0.25;
    const double f = density_at_quantile(lap, a);
    CHECK(f == doctest::Approx(lap.pdf(noise_quantile(lap, a))));
    const auto lv = levels_asymptotic(fam, LossKind::quantile(a), f, 2.0);
    CHECK(lv.s[9] == doctest::Approx(std::sqrt(a * (1 - a) / (f * f * fam.count(9)))));
}

}
