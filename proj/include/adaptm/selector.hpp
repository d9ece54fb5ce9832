#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adaptm/estimates.hpp"
#include "adaptm/levels.hpp"
#include "adaptm/windows.hpp"

namespace adaptm {

/// Thresholds z_0..z_{K-1}; z_K is fixed to 1.
struct CriticalValues {
    std::vector<double> z;
    std::optional<double> zeta;  // set when z comes from the parametric form
    double alpha = 1.0;
    double r = 2.0;

    std::size_t K() const { return z.size(); }
    double at(std::size_t k) const { return k == z.size() ? 1.0 : z.at(k); }
};

/// z_k^2 = zeta (2r log(s_k / s_K) + log(1/alpha) + log K), clipped at zero.
CriticalValues critical_values_from_zeta(double zeta, const Levels& levels, double alpha);

/// z non-increasing and z_k s_k non-increasing over k = 0..K-1: the hypothesis
/// of the total risk bound.
bool risk_hypothesis_holds(const CriticalValues& crit, const Levels& levels);

struct TestRecord {
    std::size_t k = 0;  // step (ring k, i.e. U_{k+1} \ U_k)
    std::size_t j = 0;  // comparison window
    double statistic = 0.0;
    double threshold = 0.0;
    double margin() const { return statistic - threshold; }
};

struct SelectionTrace {
    std::vector<double> base;
    std::vector<double> rings;
    std::size_t k_hat = 0;
    double theta_hat = 0.0;
    std::vector<TestRecord> tests;  // executed tests, in execution order
};

/// Thresholds of the ring tests.
enum class RrThresholds {
    Full,         // z_j s_kj + z_{k+1} s_{k+1}
    Calibration,  // z_j s_kj, as in the calibration step
};

std::string to_string(RrThresholds t);
RrThresholds parse_rr_thresholds(const std::string& text);

/// Ring-based sequential rule: step k is accepted when for all j <= k
///   |ring_k - base_j| <= z_j s_kj + z_{k+1} s_{k+1}.
/// Tests run j = k, k-1, ..., 0 and stop at the first rejection.
/// Throws PreconditionError for parametric critical values that violate
/// risk_hypothesis_holds.
SelectionTrace select_rr(const Estimates& est, const Levels& levels, const CriticalValues& crit,
                         RrThresholds thresholds = RrThresholds::Full);

/// Classical Lepski rule: accept k+1 when |base_{k+1} - base_l| <= z_l t(k, l) for all l <= k,
/// with t from lepski_pair_levels_*.
SelectionTrace select_lepski(const Estimates& est, const TriangularTable& pair_levels,
                             const CriticalValues& crit);

struct OracleInfo {
    std::size_t k_star = 0;
    std::vector<double> variations;  // V_k = max - min of g over U_k
};

/// k* = min{k < K : V_{k+1} > z_{k+1} s_{k+1}}, or K when no such k exists.
OracleInfo oracle_index(std::span<const double> g_on_design, const WindowFamily& family,
                        const CriticalValues& crit, const Levels& levels);

struct PropagationGap {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// lhs = |theta_hat - base_k| on {k_hat > k} (0 otherwise) and
/// rhs = max_{j = k..K-1} (z_k s_jk + z_{j+1} s_{j+1}).
PropagationGap propagation_gap(const SelectionTrace& trace, std::size_t k, const CriticalValues& crit,
                               const Levels& levels);

}  // namespace adaptm
