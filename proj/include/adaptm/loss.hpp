#pragma once

#include <span>
#include <string>
#include <vector>

namespace adaptm {

/// Convex loss defining a location M-estimator.
///
/// Mean:          rho(x) = x^2 / 2
/// Median:        rho(x) = |x|
/// Quantile(a):   rho(x) = |x| + (2a - 1) x
/// Huber(k):      rho(x) = x^2 / 2 for |x| <= k, k|x| - k^2/2 otherwise
class LossKind {
public:
    enum class Kind { Mean, Median, Quantile, Huber };

    static LossKind mean() { return LossKind(Kind::Mean, 0.0); }
    static LossKind median() { return LossKind(Kind::Median, 0.5); }
    static LossKind quantile(double alpha);
    static LossKind huber(double kink);

    /// Parses "mean", "median", "quantile:0.25", "huber:1.5".
    static LossKind parse(const std::string& text);

    Kind kind() const { return kind_; }
    /// Quantile level for Median/Quantile, kink for Huber, unused for Mean.
    double parameter() const { return param_; }
    bool is_order_statistic() const { return kind_ == Kind::Median || kind_ == Kind::Quantile; }

    std::string name() const;

    friend bool operator==(const LossKind&, const LossKind&) = default;

private:
    LossKind(Kind kind, double param) : kind_(kind), param_(param) {}

    Kind kind_;
    double param_;
};

/// Argmin of sum_i rho(Y_i - mu). `value` is the midpoint of [minimizer_lo, minimizer_hi].
struct LocationResult {
    double value = 0.0;
    double minimizer_lo = 0.0;
    double minimizer_hi = 0.0;
};

double rho(const LossKind& loss, double residual);

/// Derivative of rho. Mean returns the residual itself (rho = x^2/2, factor 1).
/// At kinks: 0 for the median, 2a - 1 for Quantile(a), and Huber is continuous.
double influence(const LossKind& loss, double residual);

/// Location M-estimate over `values`.
/// Throws PreconditionError on empty input and InputError on non-finite values.
LocationResult locate(std::span<const double> values, const LossKind& loss);

/// Same as locate(...).value, but may reorder `scratch` in place and skips the
/// finiteness scan. Used in the Monte Carlo inner loops.
double locate_inplace(std::span<double> scratch, const LossKind& loss);

/// Checks min_j m(block_j) <= m(all) <= max_j m(block_j) for a partition of
/// the indices of `values`.
bool betweenness_holds(std::span<const double> values,
                       const std::vector<std::vector<std::size_t>>& partition,
                       const LossKind& loss);

}  // namespace adaptm
