#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace adaptm {

/// Symmetric noise law standardized to mean 0 and variance scale^2.
class NoiseKind {
public:
    enum class Family { Laplace, Gaussian, StudentT };

    static NoiseKind laplace(double scale = 1.0) { return NoiseKind(Family::Laplace, 0, scale); }
    static NoiseKind gaussian(double scale = 1.0) { return NoiseKind(Family::Gaussian, 0, scale); }
    /// dof >= 3; fewer degrees of freedom have no finite variance to standardize.
    static NoiseKind student_t(int dof, double scale = 1.0);

    /// Parses "laplace", "gaussian" (or "normal"), "student:3" / "t3".
    static NoiseKind parse(const std::string& text);

    Family family() const { return family_; }
    int dof() const { return dof_; }
    double scale() const { return scale_; }
    NoiseKind with_scale(double scale) const;

    std::string name() const;

    /// Density of the standardized law (times 1/scale) at x.
    double pdf(double x) const;
    double cdf(double x) const;

    friend bool operator==(const NoiseKind&, const NoiseKind&) = default;

private:
    NoiseKind(Family f, int dof, double scale);

    Family family_;
    int dof_;
    double scale_;
};

/// Reproducible substream: all draws are a function of (master_seed, stream_id, draw index).
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    std::mt19937_64 engine() const;
};

/// Stream ids are namespaced by purpose so different consumers of one seed never collide.
enum class StreamPurpose : std::uint64_t {
    Levels = 1,
    Calibration = 2,
    Verification = 3,
    Benchmark = 4,
    TwoSample = 5,
    Moments = 6,
    Tails = 7,
    Simulate = 8,
    Image = 9,
};

inline RngStream replicate_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index) {
    return {seed, (static_cast<std::uint64_t>(purpose) << 48) ^ index};
}

std::uint64_t splitmix64(std::uint64_t x);

/// n i.i.d. draws; deterministic for a given stream.
std::vector<double> sample_noise(const NoiseKind& kind, std::size_t n, const RngStream& stream);

/// Draws into an existing buffer from an already-constructed engine.
void fill_noise(const NoiseKind& kind, std::mt19937_64& engine, std::span<double> out);

/// p-quantile of the noise law (bisection on the cdf).
double noise_quantile(const NoiseKind& kind, double p);

/// Offset that makes the pure-noise target of `loss_quantile` equal to zero:
/// the noise p-quantile, 0 for p = 0.5.
double centering_shift(const NoiseKind& kind, double loss_quantile);

/// f(0) of the noise density.
double density_at_zero(const NoiseKind& kind);

/// Median of |X1 - X2| for independent X1, X2 ~ kind (numerical quadrature).
double median_abs_difference(const NoiseKind& kind);

}  // namespace adaptm
