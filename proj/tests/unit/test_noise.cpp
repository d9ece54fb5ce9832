#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptm/errors.hpp"
#include "adaptm/noise.hpp"
#include "../oracles.hpp"

using namespace adaptm;

namespace {

double mean_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

}  // namespace

TEST_SUITE("noise_models") {

TEST_CASE("standardized draws") {
    for (const auto& kind : {NoiseKind::laplace(), NoiseKind::gaussian(), NoiseKind::student_t(5)}) {
        CAPTURE(kind.name());
        const auto v = sample_noise(kind, 200000, {42, 7});
        CHECK(std::abs(mean_of(v)) < 0.01);
        CHECK(var_of(v) == doctest::Approx(1.0).epsilon(kind.family() == NoiseKind::Family::StudentT ? 0.05 : 0.02));
        CHECK(std::abs(oracle::median_sorted(v)) < 0.01);
    }
    const auto scaled = sample_noise(NoiseKind::laplace(3.0), 100000, {1, 1});
    CHECK(std::sqrt(var_of(scaled)) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("densities") {
    CHECK(NoiseKind::laplace().pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(NoiseKind::gaussian().pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)));
    for (const auto& kind : {NoiseKind::laplace(), NoiseKind::gaussian(), NoiseKind::student_t(3), NoiseKind::laplace(2.0)}) {
        CAPTURE(kind.name());
        double mass = 0.0, second = 0.0;
        const double h = 1e-3;
        for (double x = -60.0; x < 60.0; x += h) {
            const double m = x + 0.5 * h;
            mass += kind.pdf(m) * h;
            second += m * m * kind.pdf(m) * h;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
        if (kind.family() != NoiseKind::Family::StudentT) CHECK(second == doctest::Approx(kind.scale() * kind.scale()).epsilon(1e-3));
        CHECK(kind.cdf(0.0) == doctest::Approx(0.5));
        CHECK(kind.cdf(0.7) - kind.cdf(0.69) == doctest::Approx(kind.pdf(0.695) * 0.01).epsilon(1e-4));
        CHECK(kind.cdf(noise_quantile(kind, 0.1)) == doctest::Approx(0.1).epsilon(1e-6));
    }
}

TEST_CASE("streams") {
    const auto a = sample_noise(NoiseKind::laplace(), 1000, {5, 1});
    const auto b = sample_noise(NoiseKind::laplace(), 1000, {5, 1});
    const auto c = sample_noise(NoiseKind::laplace(), 1000, {5, 2});
    const auto d = sample_noise(NoiseKind::laplace(), 1000, {6, 1});
    CHECK(a == b);
    CHECK(a != c);
    CHECK(a != d);
    double cross = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) cross += a[i] * c[i];
    CHECK(std::abs(cross / a.size()) < 0.15);
    CHECK(replicate_stream(1, StreamPurpose::Levels, 3).stream_id != replicate_stream(1, StreamPurpose::Calibration, 3).stream_id);
}

TEST_CASE("median of absolute differences") {
    // Laplace: |X1 - X2| for unit-variance draws; check against simulation.
    for (const auto& kind : {NoiseKind::laplace(), NoiseKind::gaussian()}) {
        const auto a = sample_noise(kind, 200001, {9, 1});
        const auto b = sample_noise(kind, 200001, {9, 2});
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
        CHECK(median_abs_difference(kind) == doctest::Approx(oracle::median_sorted(d)).epsilon(0.01));
    }
    CHECK(median_abs_difference(NoiseKind::gaussian()) == doctest::Approx(std::sqrt(2.0) * 0.6744897501960817).epsilon(1e-6));
}

TEST_CASE("parsing") {
    CHECK(NoiseKind::parse("laplace") == NoiseKind::laplace());
    CHECK(NoiseKind::parse("normal") == NoiseKind::gaussian());
    CHECK(NoiseKind::parse("student:4") == NoiseKind::student_t(4));
    CHECK(NoiseKind::parse("t4") == NoiseKind::student_t(4));
    CHECK_THROWS_AS(NoiseKind::parse("cauchy"), InputError);
    CHECK_THROWS_AS(NoiseKind::student_t(2), UnsupportedError);
    CHECK(centering_shift(NoiseKind::laplace(), 0.5) == 0.0);
    CHECK(centering_shift(NoiseKind::laplace(), 0.25) == doctest::Approx(std::log(0.5) / std::sqrt(2.0)).epsilon(1e-6));
}

}
