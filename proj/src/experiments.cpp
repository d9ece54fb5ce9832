#include "adaptm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>


#include "adaptm/errors.hpp"
#include "adaptm/estimates.hpp"
#include "adaptm/loss.hpp"
#include "adaptm/parallel.hpp"
#include "adaptm/selector.hpp"

namespace adaptm {

Signal Signal::example1() {
    Signal s;
    s.kind_ = Kind::Example1;
    s.oracle_halfwidth_ = 0.2;
    return s;
}

Signal Signal::example2() {
    Signal s;
    s.kind_ = Kind::Example2;
    s.oracle_halfwidth_ = 0.39;
    return s;
}

Signal Signal::table(std::vector<std::pair<double, double>> knots, std::optional<double> oracle_halfwidth) {
    if (knots.empty()) throw InputError("signal table is empty");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second)) {
            throw InputError("signal table holds a non-finite value");
        }
        if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
            throw InputError("signal table x values must be strictly increasing");
        }
    }
    if (oracle_halfwidth && !(*oracle_halfwidth > 0.0)) {
        throw PreconditionError("oracle half-width must be positive");
    }
    Signal s;
    s.kind_ = Kind::Custom;
    s.knots_ = std::move(knots);
    s.oracle_halfwidth_ = oracle_halfwidth;
    return s;
}

Signal Signal::load_table(const std::string& path, std::optional<double> oracle_halfwidth) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read signal table '" + path + "'");
    std::vector<std::pair<double, double>> knots;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x = 0.0, g = 0.0;
        if (!(row >> x >> g)) {
            if (first) {
                first = false;
                continue;
            }
            throw InputError("signal table '" + path + "': malformed line '" + line + "'");
        }
        first = false;
        knots.emplace_back(x, g);
    }
    return table(std::move(knots), oracle_halfwidth);
}

Signal Signal::parse(const std::string& text) {
    if (text == "1" || text == "example1") return example1();
    if (text == "2" || text == "example2") return example2();
    throw InputError("unknown example '" + text + "'");
}

double Signal::operator()(double x) const {
    switch (kind_) {
        case Kind::Example1: return std::abs(x) <= 0.2 ? 0.0 : 2.0;
        case Kind::Example2: return 2.0 * x * (x + 1.0);
        case Kind::Custom: break;
    }
    if (x <= knots_.front().first) return knots_.front().second;
    if (x >= knots_.back().first) return knots_.back().second;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x,
                               [](double v, const auto& k) { return v < k.first; });
    const auto& [x1, g1] = *it;
    const auto& [x0, g0] = *(it - 1);
    return g0 + (g1 - g0) * (x - x0) / (x1 - x0);
}

std::string Signal::name() const {
    switch (kind_) {
        case Kind::Example1: return "1";
        case Kind::Example2: return "2";
        case Kind::Custom: return "custom";
    }
    return "?";
}

std::string to_string(Method m) {
    switch (m) {
        case Method::MeanLepski: return "MeanLepski";
        case Method::MeanRR: return "MeanRR";
        case Method::MedianLepski: return "MedianLepski";
        case Method::MedianRR: return "MedianRR";
        case Method::MedianOracle: return "MedianOracle";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    for (Method m : all_methods()) {
        if (to_string(m) == text) return m;
    }
    throw InputError("unknown method '" + text + "'");
}

std::vector<Method> all_methods() {
    return {Method::MeanLepski, Method::MeanRR, Method::MedianLepski, Method::MedianRR, Method::MedianOracle};
}

double BenchReport::error_of(Method m) const {
    for (const auto& row : rows) {
        if (row.method == m) return row.mc_median_abs_error;
    }
    throw PreconditionError("benchmark report has no row for " + to_string(m));
}

Geometry line_geometry(std::size_t n, std::vector<std::size_t> counts, double center) {
    Geometry g;
    g.shape = Geometry::Shape::Line;
    g.design_n = n;
    g.center = center;
    g.counts = std::move(counts);
    return g;
}

WindowFamily family_for(const Geometry& geometry) {
    if (geometry.shape == Geometry::Shape::Line) {
        const auto xs = equidistant_design(geometry.design_n);
        return build_family_1d(xs, geometry.center, geometry.counts);
    }
    if (geometry.radii.empty()) throw PreconditionError("disc geometry without radii");
    const int half = static_cast<int>(std::ceil(geometry.radii.back())) + 1;
    const int side = 2 * half + 1;
    return build_family_2d(side, side, Pixel{half, half}, geometry.radii);
}

namespace {

LossKind loss_of(Method m) {
    return (m == Method::MeanLepski || m == Method::MeanRR) ? LossKind::mean() : LossKind::median();
}

SelectionRule rule_of(Method m) {
    return (m == Method::MeanLepski || m == Method::MedianLepski) ? SelectionRule::Lepski : SelectionRule::RingRR;
}

double sample_median(std::vector<double> v) {
    return locate(v, LossKind::median()).value;
}

}  // namespace

BenchReport run_benchmark(const ExperimentSpec& spec, const CalibBundle& calib) {
    if (spec.methods.empty()) throw PreconditionError("benchmark needs at least one method");
    if (spec.runs == 0) throw PreconditionError("benchmark needs at least one replicate");
    const Geometry geometry = line_geometry(spec.n, spec.counts);
    const auto xs = equidistant_design(spec.n);
    const WindowFamily family = build_family_1d(xs, 0.0, spec.counts);
    const double theta = spec.signal(0.0);

    const std::size_t M = spec.methods.size();
    std::vector<const CalibSection*> sections(M, nullptr);
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        if (spec.methods[m] == Method::MedianOracle) continue;
        const CalibSection& s = calib.require(loss_of(spec.methods[m]), rule_of(spec.methods[m]));
        if (!(s.geometry == geometry)) {
            throw InputError("calibration section [" + s.key() + "] was computed for a different window geometry");
        }
        sections[m] = &s;
    }

    // Levels follow the noise scale of the run (calibrations are per unit scale).
    std::vector<Levels> levels(M);
    std::vector<TriangularTable> pairs(M);
    for (std::size_t m = 0; m < M; ++m) {
        if (!sections[m]) continue;
        const double ratio = spec.noise.scale() / sections[m]->noise.scale();
        levels[m] = sections[m]->levels.scaled(ratio);
        if (sections[m]->pair_levels) {
            pairs[m] = *sections[m]->pair_levels;
            for (double& v : pairs[m].flat()) v *= ratio;
        }
    }

    std::vector<std::size_t> oracle_idx;
    const bool want_oracle =
        std::find(spec.methods.begin(), spec.methods.end(), Method::MedianOracle) != spec.methods.end();
    if (want_oracle) {
        const auto h = spec.signal.oracle_halfwidth();
        if (!h) throw PreconditionError("MedianOracle needs an oracle window for this signal");
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (std::abs(xs[i]) <= *h + 1e-12) oracle_idx.push_back(i);
        }
        if (oracle_idx.empty()) throw PreconditionError("oracle window contains no design points");
    }

    std::vector<double> g(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) g[i] = spec.signal(xs[i]);

    std::vector<double> errors(spec.runs * M, 0.0);
    const auto order = family.order();
    const std::size_t nK = order.size();

    parallel_chunks(spec.runs, spec.workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> y(spec.n), ordered(nK), scratch(spec.n), oracle_vals(oracle_idx.size());
        Estimates est;
        for (std::size_t rep = begin; rep < end; ++rep) {
            auto engine = replicate_stream(spec.seed, StreamPurpose::Benchmark, rep).engine();
            fill_noise(spec.noise, engine, y);
            for (std::size_t i = 0; i < spec.n; ++i) y[i] += g[i];
            for (std::size_t i = 0; i < nK; ++i) ordered[i] = y[order[i]];
            for (std::size_t m = 0; m < M; ++m) {
                double estimate = 0.0;
                if (spec.methods[m] == Method::MedianOracle) {
                    for (std::size_t i = 0; i < oracle_idx.size(); ++i) oracle_vals[i] = y[oracle_idx[i]];
                    estimate = locate_inplace(oracle_vals, LossKind::median());
                } else {
                    const CalibSection& s = *sections[m];
                    estimates_in_window_order(ordered, family.counts(), s.loss, scratch, est);
                    const SelectionTrace trace = s.rule == SelectionRule::RingRR
                                                     ? select_rr(est, levels[m], s.result.z, spec.rr_thresholds)
                                                     : select_lepski(est, pairs[m], s.result.z);
                    estimate = trace.theta_hat;
                }
                errors[rep * M + m] = std::abs(estimate - theta);
            }
        }
    });

    BenchReport report;
    report.example = spec.signal.name();
    report.noise = spec.noise.name();
    report.runs = spec.runs;
    report.seed = spec.seed;
    for (std::size_t m = 0; m < M; ++m) {
        std::vector<double> col(spec.runs);
        for (std::size_t rep = 0; rep < spec.runs; ++rep) col[rep] = errors[rep * M + m];
        report.rows.push_back({spec.methods[m], sample_median(col)});
        report.abs_errors.push_back(std::move(col));
    }
    return report;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchReport>& reports, bool header) {
    if (header) out << "example,noise,method,mc_median_abs_error,runs,seed\n";
    out.precision(6);
    out << std::fixed;
    for (const auto& rep : reports) {
        for (const auto& row : rep.rows) {
            out << rep.example << ',' << rep.noise << ',' << to_string(row.method) << ','
                << row.mc_median_abs_error << ',' << rep.runs << ',' << rep.seed << '\n';
        }
    }
    out.unsetf(std::ios::floatfield);
}

CalibSection calibrate_section(const SectionRequest& req) {
    const WindowFamily family = family_for(req.geometry);
    CalibSection s;
    s.rule = req.rule;
    s.loss = req.loss;
    s.noise = req.noise;
    s.mode = req.mode;
    s.r = req.r;
    s.alpha = req.alpha;
    s.runs = req.runs;
    s.seed = req.seed;
    s.geometry = req.geometry;
    s.levels = standard_levels(family, req.loss, req.noise, req.r, req.runs, req.seed, req.workers);
    if (req.rule == SelectionRule::Lepski) {
        s.pair_levels = standard_lepski_pairs(family, req.loss, req.noise, req.r, req.runs, req.seed, req.workers);
    }
    CalibConfig config;
    config.r = req.r;
    config.alpha = req.alpha;
    config.runs = req.runs;
    config.family = family;
    config.loss = req.loss;
    config.noise = req.noise;
    config.seed = req.seed;
    config.mode = req.mode;
    config.rule = req.rule;
    config.workers = req.workers;
    s.result = calibrate(config, s.levels, s.test_levels());
    return s;
}

CalibBundle calibrate_bundle(const SectionRequest& base,
                             const std::vector<std::pair<LossKind, SelectionRule>>& which) {
    CalibBundle bundle;
    for (const auto& [loss, rule] : which) {
        SectionRequest req = base;
        req.loss = loss;
        req.rule = rule;
        bundle.sections.push_back(calibrate_section(req));
    }
    return bundle;
}

std::vector<std::pair<LossKind, SelectionRule>> benchmark_sections() {
    return {{LossKind::mean(), SelectionRule::Lepski},
            {LossKind::mean(), SelectionRule::RingRR},
            {LossKind::median(), SelectionRule::Lepski},
            {LossKind::median(), SelectionRule::RingRR}};
}

double two_sample_formula_w(const NoiseKind& kind) {
    const double f0 = kind.pdf(0.0);
    return 1.0 / (2.0 * f0 * f0);
}

double two_sample_formula_l(const NoiseKind& kind, double delta) {
    if (!(delta >= 0.0)) throw PreconditionError("delta must be non-negative");
    const double f0 = kind.pdf(0.0);
    const double fd = kind.pdf(0.5 * delta);
    const double Fd = kind.cdf(0.5 * delta);
    return 2.0 * Fd * (1.0 - Fd) / (fd * fd) + 1.0 / (f0 * f0) - 2.0 * (1.0 - Fd) / (f0 * fd);
}

namespace {

double sample_variance(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / (n - 1.0);
}

}  // namespace

TwoSampleReport two_sample_study(const NoiseKind& kind, double delta, std::size_t n, std::size_t runs,
                                 std::uint64_t seed, unsigned workers) {
    if (n == 0) throw PreconditionError("two-sample study needs n >= 1");
    if (runs < 2) throw PreconditionError("two-sample study needs at least two replicates");
    if (!(delta >= 0.0)) throw PreconditionError("delta must be non-negative");
    std::vector<double> tw(runs), tl(runs);
    const double root_n = std::sqrt(static_cast<double>(n));
    const LossKind med = LossKind::median();
    parallel_chunks(runs, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> y(2 * n), scratch(2 * n);
        for (std::size_t rep = begin; rep < end; ++rep) {
            auto engine = replicate_stream(seed, StreamPurpose::TwoSample, rep).engine();
            fill_noise(kind, engine, y);
            for (std::size_t i = n; i < 2 * n; ++i) y[i] += delta;
            std::copy(y.begin(), y.begin() + n, scratch.begin());
            const double m1 = locate_inplace(std::span<double>(scratch.data(), n), med);
            std::copy(y.begin() + n, y.end(), scratch.begin());
            const double m2 = locate_inplace(std::span<double>(scratch.data(), n), med);
            std::copy(y.begin(), y.end(), scratch.begin());
            const double mall = locate_inplace(scratch, med);
            tw[rep] = root_n * (m2 - m1 - delta);
            tl[rep] = root_n * (2.0 * (mall - m1) - delta);
        }
    });
    TwoSampleReport rep;
    rep.noise = kind.name();
    rep.delta = delta;
    rep.n = n;
    rep.runs = runs;
    rep.seed = seed;
    rep.var_w = sample_variance(tw);
    rep.var_l = sample_variance(tl);
    rep.formula_w = two_sample_formula_w(kind);
    rep.formula_l = two_sample_formula_l(kind, delta);
    return rep;
}

MomentReport median_moment_study(const NoiseKind& kind, const std::vector<std::size_t>& Ns, double r,
                                 std::size_t runs, std::uint64_t seed, unsigned workers) {
    if (Ns.empty()) throw PreconditionError("moment study needs at least one N");
    if (!(r >= 1.0)) throw PreconditionError("moment order r must be >= 1");
    if (runs == 0) throw PreconditionError("moment study needs at least one replicate");
    for (std::size_t N : Ns) {
        if (N % 2 == 0) throw PreconditionError("moment study needs odd N, got " + std::to_string(N));
    }
    const double f0 = density_at_zero(kind);
    const double c_r = normal_abs_moment_root(r);
    MomentReport out;
    out.noise = kind.name();
    out.r = r;
    out.runs = runs;
    out.seed = seed;
    for (std::size_t idx = 0; idx < Ns.size(); ++idx) {
        const std::size_t N = Ns[idx];
        std::vector<double> moments(runs);
        parallel_chunks(runs, workers, [&](std::size_t begin, std::size_t end) {
            std::vector<double> y(N);
            for (std::size_t rep = begin; rep < end; ++rep) {
                auto engine = replicate_stream(seed, StreamPurpose::Moments, (idx << 40) ^ rep).engine();
                fill_noise(kind, engine, y);
                const double m = locate_inplace(y, LossKind::median());
                moments[rep] = r == 2.0 ? m * m : std::pow(std::abs(m), r);
            }
        });
        MomentRow row;
        row.N = N;
        row.moment = std::accumulate(moments.begin(), moments.end(), 0.0) / static_cast<double>(runs);
        row.ratio = std::pow(2.0 * f0 * std::sqrt(static_cast<double>(N)), r) * row.moment / std::pow(c_r, r);
        out.rows.push_back(row);
    }
    if (out.rows.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (const auto& row : out.rows) {
            mx += std::log(static_cast<double>(row.N));
            my += std::log(row.ratio);
        }
        mx /= static_cast<double>(out.rows.size());
        my /= static_cast<double>(out.rows.size());
        double sxy = 0.0, sxx = 0.0;
        for (const auto& row : out.rows) {
            const double dx = std::log(static_cast<double>(row.N)) - mx;
            sxy += dx * (std::log(row.ratio) - my);
            sxx += dx * dx;
        }
        out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    return out;
}

TailReport tail_study(const NoiseKind& kind, std::size_t N, const std::vector<double>& taus, std::size_t runs,
                      std::uint64_t seed, unsigned workers) {
    if (N % 2 == 0) throw PreconditionError("tail study needs odd N");
    if (runs == 0) throw PreconditionError("tail study needs at least one replicate");
    const double tau_max = 0.5 * std::sqrt(static_cast<double>(N));
    for (double t : taus) {
        if (!(t >= 0.0 && t <= tau_max)) {
            throw PreconditionError("tau must lie in [0, sqrt(N)/2]");
        }
    }
    const double scale = 2.0 * std::sqrt(static_cast<double>(N)) * density_at_zero(kind);
    std::vector<double> stat(runs);
    parallel_chunks(runs, workers, [&](std::size_t begin, std::size_t end) {
        std::vector<double> y(N);
        for (std::size_t rep = begin; rep < end; ++rep) {
            auto engine = replicate_stream(seed, StreamPurpose::Tails, rep).engine();
            fill_noise(kind, engine, y);
            stat[rep] = scale * std::abs(locate_inplace(y, LossKind::median()));
        }
    });
    TailReport out;
    out.noise = kind.name();
    out.N = N;
    out.runs = runs;
    out.seed = seed;
    for (double t : taus) {
        const auto hits = std::count_if(stat.begin(), stat.end(), [t](double s) { return s > t; });
        out.rows.push_back({t, static_cast<double>(hits) / static_cast<double>(runs), 2.0 * std::exp(-t * t / 8.0)});
    }
    return out;
}

void write_csv(std::ostream& out, const TwoSampleReport& r) {
    out.precision(8);
    out << "noise,delta,n,runs,seed,var_w,var_l,formula_w,formula_l,ratio_mc,ratio_formula,first_order\n";
    out << r.noise << ',' << r.delta << ',' << r.n << ',' << r.runs << ',' << r.seed << ',' << r.var_w << ','
        << r.var_l << ',' << r.formula_w << ',' << r.formula_l << ',' << r.var_l / r.var_w << ','
        << r.formula_l / r.formula_w << ',' << 1.0 + 2.0 * r.delta * (1.0 / std::sqrt(2.0 * r.formula_w)) << '\n';
}

void write_csv(std::ostream& out, const MomentReport& r) {
    out.precision(8);
    out << "noise,r,N,runs,seed,moment,ratio\n";
    for (const auto& row : r.rows) {
        out << r.noise << ',' << r.r << ',' << row.N << ',' << r.runs << ',' << r.seed << ',' << row.moment << ','
            << row.ratio << '\n';
    }
}

void write_csv(std::ostream& out, const TailReport& r) {
    out.precision(8);
    out << "noise,N,runs,seed,tau,exceedance,bound\n";
    for (const auto& row : r.rows) {
        out << r.noise << ',' << r.N << ',' << r.runs << ',' << r.seed << ',' << row.tau << ',' << row.exceedance
            << ',' << row.bound << '\n';
    }
}

}  // namespace adaptm
