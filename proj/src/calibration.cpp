#include "adaptm/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "adaptm/errors.hpp"
#include "adaptm/estimates.hpp"
#include "adaptm/parallel.hpp"

namespace adaptm {

std::string to_string(CalibMode m) { return m == CalibMode::Zeta ? "zeta" : "sequential"; }
std::string to_string(SelectionRule r) { return r == SelectionRule::RingRR ? "rr" : "lepski"; }

CalibMode parse_calib_mode(const std::string& text) {
    if (text == "zeta") return CalibMode::Zeta;
    if (text == "sequential") return CalibMode::Sequential;
    throw InputError("unknown calibration mode '" + text + "'");
}

SelectionRule parse_selection_rule(const std::string& text) {
    if (text == "rr") return SelectionRule::RingRR;
    if (text == "lepski") return SelectionRule::Lepski;
    throw InputError("unknown selection rule '" + text + "'");
}

ReplicateSet::ReplicateSet(const CalibConfig& config, const TriangularTable& test_levels,
                           StreamPurpose purpose)
    : runs_(config.runs), K_(config.family.K()), tri_(K_ * (K_ + 1) / 2) {
    if (K_ == 0) throw PreconditionError("calibration needs at least two windows");
    if (test_levels.size() != K_) throw PreconditionError("test levels do not match the window family");
    weights_.assign(runs_ * K_, 0.0);
    ratios_.assign(runs_ * tri_, 0.0);
    const std::size_t n = config.family.count(K_);
    const bool lepski = config.rule == SelectionRule::Lepski;
    const double r = config.r;
    const double shift = config.loss.kind() == LossKind::Kind::Quantile
                             ? centering_shift(config.noise, config.loss.parameter())
                             : 0.0;

    parallel_chunks(runs_, config.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> y(n), scratch(n);
        Estimates est;
        for (std::size_t rep = begin; rep < end; ++rep) {
            auto engine = replicate_stream(config.seed, purpose, rep).engine();
            fill_noise(config.noise, engine, y);
            if (shift != 0.0) {
                for (double& v : y) v -= shift;
            }
            estimates_in_window_order(y, config.family.counts(), config.loss, scratch, est);
            for (std::size_t j = 0; j < K_; ++j) {
                weights_[rep * K_ + j] = r == 2.0 ? est.base[j] * est.base[j] : std::pow(std::abs(est.base[j]), r);
                for (std::size_t l = 0; l <= j; ++l) {
                    const double stat = std::abs((lepski ? est.base[j + 1] : est.rings[j]) - est.base[l]);
                    const double level = test_levels.at(j, l);
                    double q = 0.0;
                    if (level > 0.0) q = stat / level;
                    else if (stat > 0.0) q = std::numeric_limits<double>::infinity();
                    ratios_[rep * tri_ + j * (j + 1) / 2 + l] = q;
                }
            }
        }
    });
}

double ReplicateSet::global_error(std::span<const double> z) const {
    double total = 0.0;
    for (std::size_t rep = 0; rep < runs_; ++rep) {
        for (std::size_t j = 0; j < K_; ++j) {
            for (std::size_t l = 0; l <= j; ++l) {
                if (ratio(rep, j, l) > z[l]) {
                    total += weight(rep, j);
                    break;
                }
            }
        }
    }
    return total / static_cast<double>(runs_);
}

std::vector<double> ReplicateSet::error_shares(std::span<const double> z) const {
    std::vector<double> shares(K_, 0.0);
    for (std::size_t rep = 0; rep < runs_; ++rep) {
        for (std::size_t j = 0; j < K_; ++j) {
            for (std::size_t l = 0; l <= j; ++l) {
                if (ratio(rep, j, l) > z[l]) {
                    shares[l] += weight(rep, j);
                    break;
                }
            }
        }
    }
    for (double& s : shares) s /= static_cast<double>(runs_);
    return shares;
}

double ReplicateSet::error_share(std::span<const double> z_prefix, std::size_t k, double zk) const {
    double total = 0.0;
    for (std::size_t rep = 0; rep < runs_; ++rep) {
        for (std::size_t j = k; j < K_; ++j) {
            if (!(ratio(rep, j, k) > zk)) continue;
            bool earlier_accept = true;
            for (std::size_t l = 0; l < k; ++l) {
                if (ratio(rep, j, l) > z_prefix[l]) {
                    earlier_accept = false;
                    break;
                }
            }
            if (earlier_accept) total += weight(rep, j);
        }
    }
    return total / static_cast<double>(runs_);
}

double ReplicateSet::max_ratio() const {
    double m = 0.0;
    for (double q : ratios_) {
        if (std::isfinite(q)) m = std::max(m, q);
    }
    return m;
}

const TriangularTable& test_levels_for(SelectionRule rule, const Levels& levels,
                                       const std::optional<TriangularTable>& lepski_pairs) {
    if (rule == SelectionRule::RingRR) return levels.s_ring;
    if (!lepski_pairs) throw PreconditionError("Lepski calibration needs pairwise levels");
    return *lepski_pairs;
}

namespace {

void check_config(const CalibConfig& config, const Levels& levels) {
    if (!(config.alpha > 0.0)) throw PreconditionError("alpha must be positive");
    if (config.runs < 1000) throw PreconditionError("calibration needs at least 1000 Monte Carlo runs");
    if (levels.K() != config.family.K()) throw PreconditionError("levels do not match the window family");
    if (levels.r != config.r) throw PreconditionError("levels were computed for a different moment order r");
}

double budget_of(const CalibConfig& config, const Levels& levels) {
    return config.alpha * std::pow(levels.s[levels.K()], config.r);
}

}  // namespace

CalibResult calibrate_zeta(const CalibConfig& config, const Levels& levels,
                           const TriangularTable& test_levels) {
    check_config(config, levels);
    const ReplicateSet reps(config, test_levels, StreamPurpose::Calibration);
    const double budget = budget_of(config, levels);
    auto z_at = [&](double zeta) { return critical_values_from_zeta(zeta, levels, config.alpha); };
    auto error_at = [&](double zeta) { return reps.global_error(z_at(zeta).z); };

    double lo = 0.0;
    double hi = kZetaMax;
    double chosen = 0.0;
    if (error_at(lo) > budget) {
        const double at_max = error_at(hi);
        if (at_max > budget) {
            std::ostringstream msg;
            msg << "budget unattainable: error " << at_max << " at zeta=" << kZetaMax
                << " exceeds alpha*s_K^r=" << budget;
            throw CalibrationError(msg.str());
        }
        while (hi - lo > kBisectionTolerance) {
            const double mid = 0.5 * (lo + hi);
            if (error_at(mid) <= budget) hi = mid; else lo = mid;
        }
        chosen = hi;
    }

    CalibResult out;
    out.z = z_at(chosen);
    if (config.rule == SelectionRule::RingRR && !risk_hypothesis_holds(out.z, levels)) {
        throw CalibrationError("calibrated z violates monotonicity of z_k and z_k s_k");
    }
    out.per_k_error_share = reps.error_shares(out.z.z);
    out.achieved_lhs = reps.global_error(out.z.z);
    out.budget = budget;
    out.seed = config.seed;
    out.runs = config.runs;
    out.few_runs_warning = config.runs < 10000;
    return out;
}

CalibResult calibrate_zeta(const CalibConfig& config, const Levels& levels) {
    return calibrate_zeta(config, levels, levels.s_ring);
}

CalibResult calibrate_sequential(const CalibConfig& config, const Levels& levels,
                                 const TriangularTable& test_levels) {
    check_config(config, levels);
    const ReplicateSet reps(config, test_levels, StreamPurpose::Calibration);
    const double budget = budget_of(config, levels);
    const double per_k = budget / static_cast<double>(reps.K());
    const double ceiling = reps.max_ratio() + 1.0;

    CalibResult out;
    out.z.alpha = config.alpha;
    out.z.r = config.r;
    out.z.z.assign(reps.K(), 0.0);
    out.per_k_error_share.assign(reps.K(), 0.0);
    for (std::size_t k = 0; k < reps.K(); ++k) {
        const std::span<const double> prefix(out.z.z.data(), k);
        double lo = 0.0;
        double hi = ceiling;
        if (reps.error_share(prefix, k, lo) <= per_k) {
            hi = lo;
        } else {
            while (hi - lo > kBisectionTolerance) {
                const double mid = 0.5 * (lo + hi);
                if (reps.error_share(prefix, k, mid) <= per_k) hi = mid; else lo = mid;
            }
        }
        out.z.z[k] = hi;
        out.per_k_error_share[k] = reps.error_share(prefix, k, hi);
    }
    out.achieved_lhs = reps.global_error(out.z.z);
    out.budget = budget;
    out.seed = config.seed;
    out.runs = config.runs;
    out.few_runs_warning = config.runs < 10000;
    return out;
}

CalibResult calibrate_sequential(const CalibConfig& config, const Levels& levels) {
    return calibrate_sequential(config, levels, levels.s_ring);
}

CalibResult calibrate(const CalibConfig& config, const Levels& levels, const TriangularTable& test_levels) {
    return config.mode == CalibMode::Zeta ? calibrate_zeta(config, levels, test_levels)
                                          : calibrate_sequential(config, levels, test_levels);
}

double verify_calibration(const CalibConfig& config, const CriticalValues& z, const Levels& levels,
                          const TriangularTable& test_levels) {
    if (!(config.alpha > 0.0)) throw PreconditionError("alpha must be positive");
    if (z.K() != config.family.K()) throw PreconditionError("critical values do not match the family");
    const ReplicateSet reps(config, test_levels, StreamPurpose::Verification);
    return reps.global_error(z.z) / budget_of(config, levels);
}

double density_at_quantile(const NoiseKind& noise, double alpha) {
    return noise.pdf(noise_quantile(noise, alpha));
}

Levels standard_levels(const WindowFamily& family, const LossKind& loss, const NoiseKind& noise,
                       double r, std::size_t mc_runs, std::uint64_t seed, unsigned workers) {
    if (loss.kind() == LossKind::Kind::Mean && r == 2.0 && noise.scale() == 1.0) {
        return levels_exact_mean(family, r);
    }
    if (loss.is_order_statistic()) {
        return levels_asymptotic(family, loss, density_at_quantile(noise, loss.parameter()), r);
    }
    return levels_mc(family, loss, noise, mc_runs, r, seed, workers);
}

TriangularTable standard_lepski_pairs(const WindowFamily& family, const LossKind& loss,
                                      const NoiseKind& noise, double r, std::size_t mc_runs,
                                      std::uint64_t seed, unsigned workers) {
    if (loss.kind() == LossKind::Kind::Mean && r == 2.0 && noise.scale() == 1.0) {
        return lepski_pair_levels_exact_mean(family, r);
    }
    return lepski_pair_levels_mc(family, loss, noise, mc_runs, r, seed, workers);
}

}  // namespace adaptm
