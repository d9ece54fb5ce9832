#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaptm/loss.hpp"
#include "adaptm/noise.hpp"
#include "adaptm/windows.hpp"

namespace adaptm {

/// Lower-triangular table t(k, j), 0 <= j <= k < size().
class TriangularTable {
public:
    TriangularTable() = default;
    explicit TriangularTable(std::size_t rows, double fill = 0.0)
        : rows_(rows), data_(rows * (rows + 1) / 2, fill) {}

    std::size_t size() const { return rows_; }
    double& at(std::size_t k, std::size_t j) { return data_[offset(k, j)]; }
    double at(std::size_t k, std::size_t j) const { return data_[offset(k, j)]; }
    const std::vector<double>& flat() const { return data_; }
    std::vector<double>& flat() { return data_; }

    friend bool operator==(const TriangularTable&, const TriangularTable&) = default;

private:
    std::size_t offset(std::size_t k, std::size_t j) const;

    std::size_t rows_ = 0;
    std::vector<double> data_;
};

enum class LevelsMethod { ExactMean, Asymptotic, MonteCarlo };

std::string to_string(LevelsMethod m);
LevelsMethod parse_levels_method(const std::string& text);

/// Stochastic error levels under pure noise:
///   s_j    = E0[|theta_j|^r]^(1/r)                      (j = 0..K)
///   s_kj   = E0[|theta_ring(k) - theta_j|^r]^(1/r)       (0 <= j <= k <= K-1)
struct Levels {
    double r = 2.0;
    std::vector<double> s;
    TriangularTable s_ring;
    LevelsMethod method = LevelsMethod::ExactMean;
    std::size_t runs = 0;        // Monte Carlo only
    std::uint64_t seed = 0;      // Monte Carlo only
    bool few_runs_warning = false;

    std::size_t K() const { return s.size() - 1; }
    /// Levels for noise multiplied by `sigma` (location estimators are equivariant).
    Levels scaled(double sigma) const;
};

/// (E|Z|^r)^(1/r) for standard normal Z; equals 1 at r = 2.
double normal_abs_moment_root(double r);

/// Sample means under unit-variance noise, r = 2 only.
Levels levels_exact_mean(const WindowFamily& family, double r = 2.0);

/// Normal-limit levels for median / quantile losses; f0 is the noise density
/// at the target quantile.
Levels levels_asymptotic(const WindowFamily& family, const LossKind& loss, double f0, double r);

/// Monte Carlo levels from `runs` pure-noise replicates. Below 1000 runs the
/// result carries few_runs_warning.
Levels levels_mc(const WindowFamily& family, const LossKind& loss, const NoiseKind& noise,
                 std::size_t runs, double r, std::uint64_t seed, unsigned workers = 1);

/// Pairwise levels for the classical Lepski rule:
///   t(k, l) = E0[|theta_{k+1} - theta_l|^r]^(1/r), 0 <= l <= k <= K-1.
TriangularTable lepski_pair_levels_exact_mean(const WindowFamily& family, double r = 2.0);
TriangularTable lepski_pair_levels_mc(const WindowFamily& family, const LossKind& loss,
                                      const NoiseKind& noise, std::size_t runs, double r,
                                      std::uint64_t seed, unsigned workers = 1);

}  // namespace adaptm
