#include "adaptm/levels.hpp"

#include <cmath>
#include <numbers>

#include "adaptm/errors.hpp"
#include "adaptm/estimates.hpp"
#include "adaptm/parallel.hpp"

namespace adaptm {

std::size_t TriangularTable::offset(std::size_t k, std::size_t j) const {
    if (k >= rows_ || j > k) throw PreconditionError("triangular table index out of range");
    return k * (k + 1) / 2 + j;
}

std::string to_string(LevelsMethod m) {
    switch (m) {
        case LevelsMethod::ExactMean: return "exact_mean";
        case LevelsMethod::Asymptotic: return "asymptotic";
        case LevelsMethod::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

LevelsMethod parse_levels_method(const std::string& text) {
    if (text == "exact_mean") return LevelsMethod::ExactMean;
    if (text == "asymptotic") return LevelsMethod::Asymptotic;
    if (text == "monte_carlo") return LevelsMethod::MonteCarlo;
    throw InputError("unknown levels method '" + text + "'");
}

Levels Levels::scaled(double sigma) const {
    Levels out = *this;
    for (double& v : out.s) v *= sigma;
    for (double& v : out.s_ring.flat()) v *= sigma;
    return out;
}

double normal_abs_moment_root(double r) {
    if (!(r >= 1.0)) throw PreconditionError("moment order r must be >= 1");
    // E|Z|^r = 2^{r/2} Gamma((r+1)/2) / sqrt(pi)
    const double log_m = 0.5 * r * std::log(2.0) + std::lgamma(0.5 * (r + 1.0)) -
                         0.5 * std::log(std::numbers::pi);
    return std::exp(log_m / r);
}

namespace {

// Levels from a per-observation variance v: Var(theta over N points) ~ v / N.
Levels levels_from_unit_variance(const WindowFamily& family, double v, double c_r, double r,
                                 LevelsMethod method) {
    const std::size_t K = family.K();
    Levels lv;
    lv.r = r;
    lv.method = method;
    lv.s.resize(K + 1);
    for (std::size_t j = 0; j <= K; ++j) {
        lv.s[j] = c_r * std::sqrt(v / static_cast<double>(family.count(j)));
    }
    // The ring U_{k+1} \ U_k is disjoint from U_j for j <= k: variances add.
    lv.s_ring = TriangularTable(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double ring = static_cast<double>(family.count(k + 1) - family.count(k));
        for (std::size_t j = 0; j <= k; ++j) {
            lv.s_ring.at(k, j) = c_r * std::sqrt(v / ring + v / static_cast<double>(family.count(j)));
        }
    }
    return lv;
}

struct MomentSums {
    std::vector<double> base;     // sum |theta_j|^r
    std::vector<double> ring;     // sum |ring_k - theta_j|^r, flattened triangular
    std::vector<double> lepski;   // sum |theta_{k+1} - theta_l|^r, flattened triangular

    explicit MomentSums(std::size_t K)
        : base(K + 1, 0.0), ring(K * (K + 1) / 2, 0.0), lepski(K * (K + 1) / 2, 0.0) {}

    void add(const MomentSums& o) {
        for (std::size_t i = 0; i < base.size(); ++i) base[i] += o.base[i];
        for (std::size_t i = 0; i < ring.size(); ++i) ring[i] += o.ring[i];
        for (std::size_t i = 0; i < lepski.size(); ++i) lepski[i] += o.lepski[i];
    }
};

// Fixed-size replicate blocks are reduced in block order, so the sums do not
// depend on the worker count.
constexpr std::size_t kBlock = 256;

MomentSums mc_moment_sums(const WindowFamily& family, const LossKind& loss, const NoiseKind& noise,
                          std::size_t runs, double r, std::uint64_t seed, unsigned workers) {
    const std::size_t K = family.K();
    const std::size_t n = family.count(K);
    const std::size_t blocks = (runs + kBlock - 1) / kBlock;
    std::vector<MomentSums> partial(blocks, MomentSums(K));
    const double shift = loss.kind() == LossKind::Kind::Quantile
                             ? centering_shift(noise, loss.parameter())
                             : 0.0;
    auto power = [r](double x) { return r == 2.0 ? x * x : std::pow(std::abs(x), r); };

    parallel_chunks(blocks, workers, [&](std::size_t b_begin, std::size_t b_end) {
        std::vector<double> y(n), scratch(n);
        Estimates est;
        for (std::size_t b = b_begin; b < b_end; ++b) {
            MomentSums& acc = partial[b];
            const std::size_t end = std::min(runs, (b + 1) * kBlock);
            for (std::size_t rep = b * kBlock; rep < end; ++rep) {
                auto engine = replicate_stream(seed, StreamPurpose::Levels, rep).engine();
                fill_noise(noise, engine, y);
                if (shift != 0.0) {
                    for (double& v : y) v -= shift;
                }
                estimates_in_window_order(y, family.counts(), loss, scratch, est);
                for (std::size_t j = 0; j <= K; ++j) acc.base[j] += power(est.base[j]);
                std::size_t t = 0;
                for (std::size_t k = 0; k < K; ++k) {
                    for (std::size_t j = 0; j <= k; ++j, ++t) {
                        acc.ring[t] += power(est.rings[k] - est.base[j]);
                        acc.lepski[t] += power(est.base[k + 1] - est.base[j]);
                    }
                }
            }
        }
    });

    MomentSums total(K);
    for (const auto& p : partial) total.add(p);
    return total;
}

}  // namespace

Levels levels_exact_mean(const WindowFamily& family, double r) {
    if (r != 2.0) throw UnsupportedError("exact mean levels are only available for r = 2");
    return levels_from_unit_variance(family, 1.0, 1.0, r, LevelsMethod::ExactMean);
}

Levels levels_asymptotic(const WindowFamily& family, const LossKind& loss, double f0, double r) {
    if (!loss.is_order_statistic()) {
        throw UnsupportedError("asymptotic levels need a median or quantile loss");
    }
    if (!(f0 > 0.0)) throw PreconditionError("density at the quantile must be positive");
    const double a = loss.parameter();
    const double v = a * (1.0 - a) / (f0 * f0);
    return levels_from_unit_variance(family, v, normal_abs_moment_root(r), r, LevelsMethod::Asymptotic);
}

Levels levels_mc(const WindowFamily& family, const LossKind& loss, const NoiseKind& noise,
                 std::size_t runs, double r, std::uint64_t seed, unsigned workers) {
    if (runs == 0) throw PreconditionError("levels_mc needs at least one replicate");
    if (!(r >= 1.0)) throw PreconditionError("moment order r must be >= 1");
    const MomentSums sums = mc_moment_sums(family, loss, noise, runs, r, seed, workers);
    const std::size_t K = family.K();
    const double inv = 1.0 / static_cast<double>(runs);
    Levels lv;
    lv.r = r;
    lv.method = LevelsMethod::MonteCarlo;
    lv.runs = runs;
    lv.seed = seed;
    lv.few_runs_warning = runs < 1000;
    lv.s.resize(K + 1);
    for (std::size_t j = 0; j <= K; ++j) lv.s[j] = std::pow(sums.base[j] * inv, 1.0 / r);
    lv.s_ring = TriangularTable(K);
    for (std::size_t t = 0; t < sums.ring.size(); ++t) {
        lv.s_ring.flat()[t] = std::pow(sums.ring[t] * inv, 1.0 / r);
    }
    return lv;
}

TriangularTable lepski_pair_levels_exact_mean(const WindowFamily& family, double r) {
    if (r != 2.0) throw UnsupportedError("exact mean levels are only available for r = 2");
    const std::size_t K = family.K();
    TriangularTable t(K);
    // Nested means: Var(theta_{k+1} - theta_l) = 1/N_l - 1/N_{k+1}.
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l <= k; ++l) {
            t.at(k, l) = std::sqrt(1.0 / static_cast<double>(family.count(l)) -
                                   1.0 / static_cast<double>(family.count(k + 1)));
        }
    }
    return t;
}

TriangularTable lepski_pair_levels_mc(const WindowFamily& family, const LossKind& loss,
                                      const NoiseKind& noise, std::size_t runs, double r,
                                      std::uint64_t seed, unsigned workers) {
    if (runs == 0) throw PreconditionError("lepski_pair_levels_mc needs at least one replicate");
    const MomentSums sums = mc_moment_sums(family, loss, noise, runs, r, seed, workers);
    TriangularTable t(family.K());
    const double inv = 1.0 / static_cast<double>(runs);
    for (std::size_t i = 0; i < sums.lepski.size(); ++i) {
        t.flat()[i] = std::pow(sums.lepski[i] * inv, 1.0 / r);
    }
    return t;
}

}  // namespace adaptm
