#include "adaptm/noise.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <span>

#include "adaptm/errors.hpp"

namespace adaptm {

NoiseKind::NoiseKind(Family f, int dof, double scale) : family_(f), dof_(dof), scale_(scale) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw PreconditionError("noise scale must be finite and non-negative");
    }
}

NoiseKind NoiseKind::student_t(int dof, double scale) {
    if (dof < 3) throw UnsupportedError("Student-t noise needs dof >= 3 for a finite variance");
    return NoiseKind(Family::StudentT, dof, scale);
}

NoiseKind NoiseKind::with_scale(double scale) const { return NoiseKind(family_, dof_, scale); }

NoiseKind NoiseKind::parse(const std::string& text) {
    if (text == "laplace") return laplace();
    if (text == "gaussian" || text == "normal") return gaussian();
    std::string digits;
    if (text.rfind("student:", 0) == 0) digits = text.substr(8);
    else if (text.rfind("t", 0) == 0 && text.size() > 1) digits = text.substr(1);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
        return student_t(std::stoi(digits));
    }
    throw InputError("unknown noise '" + text + "'");
}

std::string NoiseKind::name() const {
    switch (family_) {
        case Family::Laplace: return "laplace";
        case Family::Gaussian: return "gaussian";
        case Family::StudentT: return "student:" + std::to_string(dof_);
    }
    return "?";
}

namespace {

constexpr double kLaplaceB = 0.70710678118654752440;  // 1/sqrt(2): unit variance

double t_standardizer(int dof) { return std::sqrt(static_cast<double>(dof) / (dof - 2.0)); }

}  // namespace

double NoiseKind::pdf(double x) const {
    if (scale_ == 0.0) throw PreconditionError("pdf of a degenerate (zero-scale) law");
    const double u = x / scale_;
    double f = 0.0;
    switch (family_) {
        case Family::Laplace: f = std::exp(-std::abs(u) / kLaplaceB) / (2.0 * kLaplaceB); break;
        case Family::Gaussian: f = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); break;
        case Family::StudentT: {
            const double c = t_standardizer(dof_);
            f = c * boost::math::pdf(boost::math::students_t_distribution<double>(dof_), u * c);
            break;
        }
    }
    return f / scale_;
}

double NoiseKind::cdf(double x) const {
    if (scale_ == 0.0) return x < 0.0 ? 0.0 : 1.0;
    const double u = x / scale_;
    switch (family_) {
        case Family::Laplace:
            return u < 0.0 ? 0.5 * std::exp(u / kLaplaceB) : 1.0 - 0.5 * std::exp(-u / kLaplaceB);
        case Family::Gaussian: return 0.5 * std::erfc(-u / std::numbers::sqrt2);
        case Family::StudentT:
            return boost::math::cdf(boost::math::students_t_distribution<double>(dof_),
                                    u * t_standardizer(dof_));
    }
    return 0.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 RngStream::engine() const {
    return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(~stream_id)));
}

void fill_noise(const NoiseKind& kind, std::mt19937_64& engine, std::span<double> out) {
    const double s = kind.scale();
    switch (kind.family()) {
        case NoiseKind::Family::Laplace: {
            std::exponential_distribution<double> expo(1.0);
            for (double& v : out) {
                const double e = expo(engine);
                const bool negative = (engine() >> 63) != 0;
                v = s * kLaplaceB * (negative ? -e : e);
            }
            break;
        }
        case NoiseKind::Family::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            for (double& v : out) v = s * normal(engine);
            break;
        }
        case NoiseKind::Family::StudentT: {
            std::student_t_distribution<double> t(static_cast<double>(kind.dof()));
            const double c = s / t_standardizer(kind.dof());
            for (double& v : out) v = c * t(engine);
            break;
        }
    }
}

std::vector<double> sample_noise(const NoiseKind& kind, std::size_t n, const RngStream& stream) {
    std::vector<double> out(n);
    auto engine = stream.engine();
    fill_noise(kind, engine, out);
    return out;
}

double density_at_zero(const NoiseKind& kind) {
    const double s = kind.scale();
    if (!(s > 0.0)) throw PreconditionError("density_at_zero needs a positive noise scale");
    switch (kind.family()) {
        case NoiseKind::Family::Laplace: return 1.0 / (2.0 * kLaplaceB * s);
        case NoiseKind::Family::Gaussian: return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * s);
        case NoiseKind::Family::StudentT: {
            const double nu = kind.dof();
            const double t0 = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                              std::sqrt(nu * std::numbers::pi);
            return t0 * t_standardizer(kind.dof()) / s;
        }
    }
    return 0.0;
}

double noise_quantile(const NoiseKind& kind, double p) {
    if (!(p > 0.0 && p < 1.0)) throw PreconditionError("quantile level must lie in (0,1)");
    if (p == 0.5 || kind.scale() == 0.0) return 0.0;
    double lo = -1.0, hi = 1.0;
    while (kind.cdf(lo) > p) lo *= 2.0;
    while (kind.cdf(hi) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (kind.cdf(mid) < p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double centering_shift(const NoiseKind& kind, double loss_quantile) {
    return loss_quantile == 0.5 ? 0.0 : noise_quantile(kind, loss_quantile);
}

double median_abs_difference(const NoiseKind& kind) {
    const NoiseKind unit = kind.with_scale(1.0);
    // P(|X1 - X2| <= t) = int f(x) [F(x + t) - F(x - t)] dx, Simpson on [-L, L].
    const double L = unit.family() == NoiseKind::Family::StudentT ? 200.0 : 40.0;
    const int panels = 20000;
    const double h = 2.0 * L / panels;
    std::vector<double> xs(panels + 1), fx(panels + 1);
    for (int i = 0; i <= panels; ++i) {
        xs[i] = -L + h * i;
        fx[i] = unit.pdf(xs[i]);
    }
    auto prob_within = [&](double t) {
        double acc = 0.0;
        for (int i = 0; i <= panels; ++i) {
            const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * fx[i] * (unit.cdf(xs[i] + t) - unit.cdf(xs[i] - t));
        }
        return acc * h / 3.0;
    };
    double lo = 0.0, hi = 10.0;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (prob_within(mid) < 0.5) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi) * kind.scale();
}

}  // namespace adaptm
