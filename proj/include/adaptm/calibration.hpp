#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adaptm/levels.hpp"
#include "adaptm/loss.hpp"
#include "adaptm/noise.hpp"
#include "adaptm/selector.hpp"
#include "adaptm/windows.hpp"

namespace adaptm {

enum class CalibMode { Sequential, Zeta };
/// Which test statistic the critical values are calibrated for.
enum class SelectionRule { RingRR, Lepski };

std::string to_string(CalibMode m);
std::string to_string(SelectionRule r);
CalibMode parse_calib_mode(const std::string& text);
SelectionRule parse_selection_rule(const std::string& text);

struct CalibConfig {
    double r = 2.0;
    double alpha = 1.0;
    std::size_t runs = 10000;
    WindowFamily family;
    LossKind loss = LossKind::median();
    NoiseKind noise = NoiseKind::laplace();
    std::uint64_t seed = 0;
    CalibMode mode = CalibMode::Zeta;
    SelectionRule rule = SelectionRule::RingRR;
    unsigned workers = 1;
};

struct CalibResult {
    CriticalValues z;
    std::vector<double> per_k_error_share;  // contribution of each z_k to achieved_lhs
    double achieved_lhs = 0.0;
    double budget = 0.0;                    // alpha * s_K^r
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    bool few_runs_warning = false;          // runs < 10000
};

/// Largest parametric multiplier tried before calibration gives up.
inline constexpr double kZetaMax = 100.0;
/// Absolute bisection tolerance on zeta and on z_k.
inline constexpr double kBisectionTolerance = 1e-3;

/// Pure-noise replicates reduced to what the budget needs: the weights
/// |theta_j|^r (j < K) and the normalized statistics |T_jl| / level_jl
/// (l <= j < K). Reused across candidate thresholds (common random numbers).
class ReplicateSet {
public:
    ReplicateSet(const CalibConfig& config, const TriangularTable& test_levels, StreamPurpose purpose);

    std::size_t runs() const { return runs_; }
    std::size_t K() const { return K_; }

    /// (1/runs) sum_rep sum_j w_j 1(exists l <= j : ratio_jl > z_l).
    double global_error(std::span<const double> z) const;
    /// Error attributed to z_k: first rejecting l (in order 0..j) equals k.
    std::vector<double> error_shares(std::span<const double> z) const;
    /// Share for one k given z_0..z_{k-1} and a candidate z_k.
    double error_share(std::span<const double> z_prefix, std::size_t k, double zk) const;
    double max_ratio() const;

private:
    double weight(std::size_t rep, std::size_t j) const { return weights_[rep * K_ + j]; }
    double ratio(std::size_t rep, std::size_t j, std::size_t l) const {
        return ratios_[rep * tri_ + j * (j + 1) / 2 + l];
    }

    std::size_t runs_ = 0;
    std::size_t K_ = 0;
    std::size_t tri_ = 0;
    std::vector<double> weights_;
    std::vector<double> ratios_;
};

/// Test levels matching a rule: s_ring for RingRR, the Lepski pair table otherwise.
const TriangularTable& test_levels_for(SelectionRule rule, const Levels& levels,
                                       const std::optional<TriangularTable>& lepski_pairs);

/// Smallest zeta (bisection with common random numbers) whose parametric z
/// meets sum_j E0[|theta_j|^r 1(some test rejects at z_l level_jl)] <= alpha s_K^r.
/// Throws CalibrationError if zeta = kZetaMax does not suffice or the resulting
/// z violates the monotonicity needed by the risk bound.
CalibResult calibrate_zeta(const CalibConfig& config, const Levels& levels,
                           const TriangularTable& test_levels);
CalibResult calibrate_zeta(const CalibConfig& config, const Levels& levels);

/// z_0, z_1, ... in turn, each the smallest value whose conditional error
/// share is <= (alpha / K) s_K^r with the earlier z frozen.
CalibResult calibrate_sequential(const CalibConfig& config, const Levels& levels,
                                 const TriangularTable& test_levels);
CalibResult calibrate_sequential(const CalibConfig& config, const Levels& levels);

CalibResult calibrate(const CalibConfig& config, const Levels& levels, const TriangularTable& test_levels);

/// achieved error / (alpha s_K^r) on replicates drawn from config.seed under a
/// stream namespace disjoint from calibration.
double verify_calibration(const CalibConfig& config, const CriticalValues& z, const Levels& levels,
                          const TriangularTable& test_levels);

/// Levels the benchmark uses for a loss: exact for the mean at r = 2,
/// asymptotic for median / quantile, Monte Carlo otherwise.
Levels standard_levels(const WindowFamily& family, const LossKind& loss, const NoiseKind& noise,
                       double r, std::size_t mc_runs, std::uint64_t seed, unsigned workers = 1);
/// Lepski pair levels: exact for the mean at r = 2, Monte Carlo otherwise.
TriangularTable standard_lepski_pairs(const WindowFamily& family, const LossKind& loss,
                                      const NoiseKind& noise, double r, std::size_t mc_runs,
                                      std::uint64_t seed, unsigned workers = 1);

/// Density of `noise` at its `alpha`-quantile.
double density_at_quantile(const NoiseKind& noise, double alpha);

}  // namespace adaptm
