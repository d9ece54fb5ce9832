#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaptm/artifact.hpp"
#include "adaptm/calibration.hpp"
#include "adaptm/noise.hpp"
#include "adaptm/windows.hpp"

namespace adaptm {

/// Regression function on [-1, 1].
class Signal {
public:
    enum class Kind { Example1, Example2, Custom };

    /// 0 on |x| <= 0.2, 2 outside.
    static Signal example1();
    /// 2x(x + 1).
    static Signal example2();
    /// Piecewise-linear interpolation through (x, g) knots sorted by x,
    /// constant beyond the end knots.
    static Signal table(std::vector<std::pair<double, double>> knots, std::optional<double> oracle_halfwidth = {});
    /// Reads "x,g" lines (an optional header line is skipped).
    static Signal load_table(const std::string& path, std::optional<double> oracle_halfwidth = {});
    /// "1" / "2" / "example1" / "example2".
    static Signal parse(const std::string& text);

    Kind kind() const { return kind_; }
    double operator()(double x) const;
    std::string name() const;
    /// Half-width of the fixed oracle window around 0 (0.2 for Example 1, 0.39 for Example 2).
    std::optional<double> oracle_halfwidth() const { return oracle_halfwidth_; }

private:
    Kind kind_ = Kind::Example1;
    std::vector<std::pair<double, double>> knots_;
    std::optional<double> oracle_halfwidth_;
};

enum class Method { MeanLepski, MeanRR, MedianLepski, MedianRR, MedianOracle };

std::string to_string(Method m);
Method parse_method(const std::string& text);
/// Table column order: MeanLepski, MeanRR, MedianLepski, MedianRR, MedianOracle.
std::vector<Method> all_methods();

struct ExperimentSpec {
    Signal signal = Signal::example1();
    NoiseKind noise = NoiseKind::laplace();
    std::size_t n = 200;
    std::size_t runs = 1000;
    std::vector<Method> methods = all_methods();
    std::uint64_t seed = 0;
    std::vector<std::size_t> counts = geometric_counts(17);
    RrThresholds rr_thresholds = RrThresholds::Full;
    unsigned workers = 1;
};

struct BenchRow {
    Method method;
    double mc_median_abs_error = 0.0;
};

struct BenchReport {
    std::string example;
    std::string noise;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<BenchRow> rows;
    /// |theta_hat - g(0)| per replicate, one vector per row.
    std::vector<std::vector<double>> abs_errors;

    double error_of(Method m) const;
};

/// Monte Carlo median of |theta_hat - g(0)| at x = 0 for each method. RR and
/// Lepski methods use the matching sections of `calib`, which must have been
/// computed for the same line geometry. Their levels are rescaled by the ratio
/// of the run's noise scale to the calibration noise scale.
BenchReport run_benchmark(const ExperimentSpec& spec, const CalibBundle& calib);

void write_bench_csv(std::ostream& out, const std::vector<BenchReport>& reports, bool header = true);

/// Geometry of the benchmark windows around x = 0.
Geometry line_geometry(std::size_t n, std::vector<std::size_t> counts, double center = 0.0);
/// Window family for a geometry; discs are built around an unclipped interior pixel.
WindowFamily family_for(const Geometry& geometry);

struct SectionRequest {
    SelectionRule rule = SelectionRule::RingRR;
    LossKind loss = LossKind::median();
    NoiseKind noise = NoiseKind::laplace();
    CalibMode mode = CalibMode::Zeta;
    double r = 2.0;
    double alpha = 1.0;
    std::size_t runs = 10000;
    std::uint64_t seed = 0;
    Geometry geometry = line_geometry(200, geometric_counts(17));
    unsigned workers = 1;
};

/// Levels, Lepski pair levels when needed, and calibrated critical values.
CalibSection calibrate_section(const SectionRequest& request);

/// Sections for every (loss, rule) pair given, in order.
CalibBundle calibrate_bundle(const SectionRequest& base, const std::vector<std::pair<LossKind, SelectionRule>>& which);

/// mean/median x rr/lepski: what the benchmark needs.
std::vector<std::pair<LossKind, SelectionRule>> benchmark_sections();

struct TwoSampleReport {
    std::string noise;
    double delta = 0.0;
    std::size_t n = 0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    double var_w = 0.0;
    double var_l = 0.0;
    double formula_w = 0.0;
    double formula_l = 0.0;
};

/// Var of sqrt(n)(med_2 - med_1 - delta) and sqrt(n)(2(med_all - med_1) - delta)
/// for samples of n draws each, the second shifted by delta, plus the
/// limiting variances 1/(2f(0)^2) and the closed form for the second.
TwoSampleReport two_sample_study(const NoiseKind& kind, double delta, std::size_t n, std::size_t runs,
                                 std::uint64_t seed, unsigned workers = 1);

/// 2F(d/2)(1-F(d/2))/f(d/2)^2 + 1/f(0)^2 - 2(1-F(d/2))/(f(0)f(d/2)).
double two_sample_formula_l(const NoiseKind& kind, double delta);
double two_sample_formula_w(const NoiseKind& kind);

struct MomentRow {
    std::size_t N = 0;
    double moment = 0.0;  // E|med|^r
    double ratio = 0.0;   // (2 f(0) sqrt(N))^r E|med|^r / E|Z|^r
};

struct MomentReport {
    std::string noise;
    double r = 2.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<MomentRow> rows;
    /// Least-squares slope of log(ratio) against log(N).
    double slope = 0.0;
};

/// Normalized r-th absolute moments of the sample median for each odd N.
MomentReport median_moment_study(const NoiseKind& kind, const std::vector<std::size_t>& Ns, double r,
                                 std::size_t runs, std::uint64_t seed, unsigned workers = 1);

struct TailRow {
    double tau = 0.0;
    double exceedance = 0.0;  // P(2 sqrt(N) f(0) |med| > tau)
    double bound = 0.0;       // 2 exp(-tau^2 / 8)
};

struct TailReport {
    std::string noise;
    std::size_t N = 0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    std::vector<TailRow> rows;
};

/// Requires N odd and every tau in [0, sqrt(N)/2].
TailReport tail_study(const NoiseKind& kind, std::size_t N, const std::vector<double>& taus, std::size_t runs,
                      std::uint64_t seed, unsigned workers = 1);

void write_csv(std::ostream& out, const TwoSampleReport& report);
void write_csv(std::ostream& out, const MomentReport& report);
void write_csv(std::ostream& out, const TailReport& report);

}  // namespace adaptm
