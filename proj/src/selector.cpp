#include "adaptm/selector.hpp"

#include <algorithm>
#include <cmath>

#include "adaptm/errors.hpp"

namespace adaptm {

CriticalValues critical_values_from_zeta(double zeta, const Levels& levels, double alpha) {
    if (!(zeta >= 0.0)) throw PreconditionError("zeta must be non-negative");
    if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
    const std::size_t K = levels.K();
    if (K == 0) throw PreconditionError("parametric critical values need K >= 1");
    CriticalValues crit;
    crit.zeta = zeta;
    crit.alpha = alpha;
    crit.r = levels.r;
    crit.z.resize(K);
    const double sK = levels.s[K];
    const double tail = std::log(1.0 / alpha) + std::log(static_cast<double>(K));
    for (std::size_t k = 0; k < K; ++k) {
        const double bracket = 2.0 * levels.r * std::log(levels.s[k] / sK) + tail;
        crit.z[k] = std::sqrt(zeta * std::max(bracket, 0.0));
    }
    return crit;
}

bool risk_hypothesis_holds(const CriticalValues& crit, const Levels& levels) {
    if (crit.K() != levels.K()) return false;
    for (std::size_t k = 0; k + 1 < crit.K(); ++k) {
        if (crit.z[k + 1] > crit.z[k]) return false;
        if (crit.z[k + 1] * levels.s[k + 1] > crit.z[k] * levels.s[k]) return false;
    }
    return true;
}

namespace {

void check_dimensions(const Estimates& est, std::size_t K, std::size_t crit_K) {
    if (est.base.size() != K + 1 || est.rings.size() != K || crit_K != K) {
        throw PreconditionError("selector: inconsistent numbers of windows, levels and critical values");
    }
}

}  // namespace

std::string to_string(RrThresholds t) { return t == RrThresholds::Full ? "full" : "calibration"; }

RrThresholds parse_rr_thresholds(const std::string& text) {
    if (text == "full") return RrThresholds::Full;
    if (text == "calibration") return RrThresholds::Calibration;
    throw InputError("unknown rr thresholds '" + text + "'");
}

SelectionTrace select_rr(const Estimates& est, const Levels& levels, const CriticalValues& crit,
                         RrThresholds thresholds) {
    const std::size_t K = levels.K();
    check_dimensions(est, K, crit.K());
    if (crit.zeta && !risk_hypothesis_holds(crit, levels)) {
        throw PreconditionError("select_rr: parametric critical values violate monotonicity of z_k and z_k s_k");
    }
    SelectionTrace trace;
    trace.base = est.base;
    trace.rings = est.rings;
    std::size_t k = 0;
    for (; k < K; ++k) {
        bool accepted = true;
        const double carry = thresholds == RrThresholds::Full ? crit.at(k + 1) * levels.s[k + 1] : 0.0;
        for (std::size_t step = 0; step <= k; ++step) {
            const std::size_t j = k - step;
            TestRecord t{k, j, std::abs(est.rings[k] - est.base[j]),
                         crit.at(j) * levels.s_ring.at(k, j) + carry};
            trace.tests.push_back(t);
            if (t.margin() > 0.0) {
                accepted = false;
                break;
            }
        }
        if (!accepted) break;
    }
    trace.k_hat = k;
    trace.theta_hat = est.base[k];
    return trace;
}

SelectionTrace select_lepski(const Estimates& est, const TriangularTable& pair_levels,
                             const CriticalValues& crit) {
    const std::size_t K = pair_levels.size();
    check_dimensions(est, K, crit.K());
    SelectionTrace trace;
    trace.base = est.base;
    trace.rings = est.rings;
    std::size_t k = 0;
    for (; k < K; ++k) {
        bool accepted = true;
        for (std::size_t step = 0; step <= k; ++step) {
            const std::size_t l = k - step;
            TestRecord t{k, l, std::abs(est.base[k + 1] - est.base[l]), crit.at(l) * pair_levels.at(k, l)};
            trace.tests.push_back(t);
            if (t.margin() > 0.0) {
                accepted = false;
                break;
            }
        }
        if (!accepted) break;
    }
    trace.k_hat = k;
    trace.theta_hat = est.base[k];
    return trace;
}

OracleInfo oracle_index(std::span<const double> g_on_design, const WindowFamily& family,
                        const CriticalValues& crit, const Levels& levels) {
    const std::size_t K = family.K();
    if (levels.K() != K || crit.K() != K) {
        throw PreconditionError("oracle_index: family, levels and critical values disagree on K");
    }
    OracleInfo info;
    info.variations.resize(K + 1);
    double lo = 0.0, hi = 0.0;
    const auto order = family.order();
    std::size_t pos = 0;
    for (std::size_t k = 0; k <= K; ++k) {
        for (; pos < family.count(k); ++pos) {
            if (order[pos] >= g_on_design.size()) {
                throw PreconditionError("oracle_index: window index outside the design");
            }
            const double g = g_on_design[order[pos]];
            lo = pos == 0 ? g : std::min(lo, g);
            hi = pos == 0 ? g : std::max(hi, g);
        }
        info.variations[k] = hi - lo;
    }
    info.k_star = K;
    for (std::size_t k = 0; k < K; ++k) {
        if (info.variations[k + 1] > crit.at(k + 1) * levels.s[k + 1]) {
            info.k_star = k;
            break;
        }
    }
    return info;
}

PropagationGap propagation_gap(const SelectionTrace& trace, std::size_t k, const CriticalValues& crit,
                               const Levels& levels) {
    const std::size_t K = levels.K();
    if (k >= K) throw PreconditionError("propagation_gap: k must be < K");
    PropagationGap gap;
    for (std::size_t j = k; j < K; ++j) {
        gap.rhs = std::max(gap.rhs, crit.at(k) * levels.s_ring.at(j, k) + crit.at(j + 1) * levels.s[j + 1]);
    }
    if (trace.k_hat > k) gap.lhs = std::abs(trace.theta_hat - trace.base[k]);
    return gap;
}

}  // namespace adaptm
