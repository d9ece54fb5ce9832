// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "adaptm/calibration.hpp"
#include "adaptm/estimates.hpp"
#include "adaptm/experiments.hpp"
#include "adaptm/image_io.hpp"
#include "adaptm/imaging.hpp"
#include "adaptm/parallel.hpp"
#include "oracles.hpp"

using namespace adaptm;

namespace {

constexpr std::uint64_t kCalibSeed = 11;
constexpr std::uint64_t kBenchSeed = 7;
constexpr std::uint64_t kStudySeed = 1;
constexpr std::uint64_t kFreshSeed = 20240;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::printf("%s  criterion %d  %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
}

unsigned workers() { return default_workers(); }

const CalibBundle& bench_bundle() {
    static const CalibBundle b = [] {
        SectionRequest req;
        req.noise = NoiseKind::laplace();
        req.r = 2.0;
        req.alpha = 1.0;
        req.runs = 10000;
        req.seed = kCalibSeed;
        req.workers = workers();
        return calibrate_bundle(req, benchmark_sections());
    }();
    return b;
}

struct Row {
    std::string name;
    BenchReport rep;
};

std::vector<Row> bench_rows() {
    std::vector<Row> rows;
    const std::vector<std::pair<std::string, NoiseKind>> noises{
        {"a", NoiseKind::laplace()}, {"b", NoiseKind::gaussian()}, {"c", NoiseKind::student_t(3)}};
    for (const auto& [ex, sig] : {std::pair{"1", Signal::example1()}, std::pair{"2", Signal::example2()}}) {
        for (const auto& [tag, noise] : noises) {
            ExperimentSpec spec;
            spec.signal = sig;
            spec.noise = noise;
            spec.runs = 1000;
            spec.seed = kBenchSeed;
            spec.workers = workers();
            rows.push_back({std::string(ex) + tag, run_benchmark(spec, bench_bundle())});
        }
    }
    return rows;
}

void criterion1(const Row& row1a, double seconds) {
    const auto& r = row1a.rep;
    const double rr = r.error_of(Method::MedianRR);
    const double lep = r.error_of(Method::MedianLepski);
    const double ml = r.error_of(Method::MeanLepski);
    const double mr = r.error_of(Method::MeanRR);
    const bool a = rr >= 0.067 && rr <= 0.112;
    const bool b = lep >= 0.22 && lep <= 0.36;
    const bool c = std::abs(ml - mr) <= 0.1 * ml;
    const bool t = seconds < 120.0;
    std::ostringstream d;
    d << "Ex1a MedianRR " << fmt("%.4f", rr) << (a ? " in" : " NOT in") << " [0.067,0.112]; MedianLepski "
      << fmt("%.4f", lep) << (b ? " in" : " NOT in") << " [0.22,0.36]; MeanLepski " << fmt("%.4f", ml)
      << " vs MeanRR " << fmt("%.4f", mr) << " differ by " << fmt("%.1f", 100.0 * std::abs(ml - mr) / ml)
      << "% (limit 10%); calibration + row " << fmt("%.1f", seconds) << " s (limit 120 s)";
    report(1, a && b && c && t, d.str());
}

void criterion2(const std::vector<Row>& rows) {
    bool ok = true;
    std::ostringstream d;
    for (const auto& row : rows) {
        const double rr = row.rep.error_of(Method::MedianRR);
        const double lep = row.rep.error_of(Method::MedianLepski);
        const double orc = row.rep.error_of(Method::MedianOracle);
        const bool check_lep = row.name != "1b" && row.name != "2b";
        const bool lep_ok = !check_lep || rr <= 0.6 * lep;
        const bool orc_ok = rr / orc <= 1.5;
        ok = ok && lep_ok && orc_ok;
        d << row.name << ": RR/Lepski " << fmt("%.2f", rr / lep) << (check_lep ? (lep_ok ? "" : " (>0.6)") : " (n/a)")
          << ", RR/Oracle " << fmt("%.2f", rr / orc) << (orc_ok ? "" : " (>1.5)") << "; ";
    }
    report(2, ok, d.str());
}

void criterion3() {
    const auto t0 = Clock::now();
    const double delta = 0.2;
    const auto rep = two_sample_study(NoiseKind::laplace(), delta, 1000, 20000, kStudySeed, workers());
    const double secs = seconds_since(t0);
    const double f0 = NoiseKind::laplace().pdf(0.0);
    const bool w_ok = std::abs(rep.var_w - 1.0) <= 0.05;
    const double mc_ratio = rep.var_l / rep.var_w;
    const double formula_ratio = rep.formula_l / rep.formula_w;
    const bool l_ok = std::abs(mc_ratio - formula_ratio) <= 0.10 * formula_ratio;
    const double first_order = 1.0 + 2.0 * delta * f0;
    const bool o_ok = std::abs(formula_ratio - first_order) <= delta * delta;
    const bool t_ok = secs < 60.0;
    std::ostringstream d;
    d << "var_W " << fmt("%.4f", rep.var_w) << " (formula 1, limit 5%); var_L/var_W " << fmt("%.4f", mc_ratio)
      << " vs formula " << fmt("%.4f", formula_ratio) << " (limit 10%); formula vs 1+2*delta*f(0) = "
      << fmt("%.4f", first_order) << ", gap " << fmt("%.4f", std::abs(formula_ratio - first_order))
      << " (limit delta^2 = 0.04); " << fmt("%.1f", secs) << " s (limit 60 s)";
    report(3, w_ok && l_ok && o_ok && t_ok, d.str());
}

void criterion4() {
    const CalibSection& s = bench_bundle().require(LossKind::median(), SelectionRule::RingRR);
    const auto xs = equidistant_design(200);
    const auto fam = build_family_1d(xs, 0.0, geometric_counts(17));
    const std::vector<Signal> sigs{Signal::example1(), Signal::example2()};
    const std::vector<NoiseKind> noises{NoiseKind::laplace(), NoiseKind::gaussian(), NoiseKind::student_t(3)};
    const std::size_t reps = 10000;
    std::vector<std::size_t> violations(reps, 0), checks(reps, 0);
    parallel_for(reps, workers(), [&](std::size_t rep) {
        const Signal& g = sigs[rep % 2];
        const NoiseKind& noise = noises[(rep / 2) % 3];
        auto y = sample_noise(noise, xs.size(), replicate_stream(kBenchSeed, StreamPurpose::Benchmark, rep));
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += g(xs[i]);
        const auto trace = select_rr(base_estimates(y, fam, s.loss), s.levels, s.result.z);
        for (std::size_t k = 0; k < trace.k_hat; ++k) {
            const auto gap = propagation_gap(trace, k, s.result.z, s.levels);
            ++checks[rep];
            if (gap.lhs > gap.rhs) ++violations[rep];
        }
    });
    std::size_t v = 0, c = 0;
    for (std::size_t i = 0; i < reps; ++i) {
        v += violations[i];
        c += checks[i];
    }

    // betweenness over random values, partitions and losses
    std::mt19937_64 rng(kStudySeed);
    std::uniform_int_distribution<int> size(1, 40), nblocks(1, 6), which(0, 5);
    std::student_t_distribution<double> heavy(2.0);
    const std::vector<LossKind> losses{LossKind::mean(),           LossKind::median(),      LossKind::quantile(0.1),
                                       LossKind::quantile(0.7),    LossKind::huber(1.345),  LossKind::huber(0.2)};
    std::size_t bviol = 0;
    const std::size_t cases = 100000;
    for (std::size_t t = 0; t < cases; ++t) {
        std::vector<double> ys(size(rng));
        for (double& y : ys) y = heavy(rng);
        if (t % 3 == 0) {
            for (double& y : ys) y = std::round(y);
        }
        const std::size_t b = std::min<std::size_t>(nblocks(rng), ys.size());
        std::vector<std::vector<double>> blocks(b);
        for (std::size_t i = 0; i < ys.size(); ++i) blocks[i < b ? i : rng() % b].push_back(ys[i]);
        const LossKind& loss = losses[which(rng)];
        const double whole = locate(ys, loss).value;
        double lo = INFINITY, hi = -INFINITY, scale = 0.0;
        for (const auto& blk : blocks) {
            const double m = locate(blk, loss).value;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        for (double y : ys) scale = std::max(scale, std::abs(y));
        const double slack = loss.is_order_statistic() ? 0.0 : 1e-9 * (1.0 + scale);
        if (whole < lo - slack || whole > hi + slack) ++bviol;
    }
    std::ostringstream d;
    d << v << " propagation violations in " << c << " (k < k_hat) checks over " << reps << " replicates; " << bviol
      << " betweenness violations in " << cases << " cases";
    report(4, v == 0 && bviol == 0, d.str());
}

void criterion5() {
    const auto m = median_moment_study(NoiseKind::laplace(), {101, 401, 1601}, 2.0, 20000, kStudySeed, workers());
    bool ok = true;
    std::ostringstream d;
    d << "4f(0)^2 N E[med^2]:";
    for (const auto& row : m.rows) {
        const bool in = row.ratio >= 0.9 && row.ratio <= 1.1;
        ok = ok && in;
        d << " N=" << row.N << " " << fmt("%.4f", row.ratio) << (in ? "" : " (outside [0.9,1.1])");
    }
    const auto t = tail_study(NoiseKind::laplace(), 1001, {3.0}, 100000, kStudySeed, workers());
    const double limit = 2.2 * std::exp(-9.0 / 8.0);
    const bool tail_ok = t.rows[0].exceedance <= limit;
    d << "; tail P(tau=3, N=1001) " << fmt("%.5f", t.rows[0].exceedance) << " (limit " << fmt("%.5f", limit) << ")";
    report(5, ok && tail_ok, d.str());
}

void criterion6() {
    bool ok = true;
    std::ostringstream d;
    for (const auto& s : bench_bundle().sections) {
        CalibConfig config;
        config.r = s.r;
        config.alpha = s.alpha;
        config.runs = s.runs;
        config.family = family_for(s.geometry);
        config.loss = s.loss;
        config.noise = s.noise;
        config.seed = kFreshSeed;
        config.mode = s.mode;
        config.rule = s.rule;
        config.workers = workers();
        const double ratio = verify_calibration(config, s.result.z, s.levels, s.test_levels());
        bool mono = true;
        for (std::size_t k = 0; k + 1 < s.result.z.K(); ++k) {
            mono = mono && s.result.z.z[k] >= s.result.z.z[k + 1] &&
                   s.result.z.z[k] * s.levels.s[k] >= s.result.z.z[k + 1] * s.levels.s[k + 1];
        }
        const bool rr = s.rule == SelectionRule::RingRR;
        if (rr) ok = ok && ratio <= 1.1;
        ok = ok && mono;
        d << s.key() << " ratio " << fmt("%.3f", ratio) << (rr ? (ratio <= 1.1 ? "" : " (>1.1)") : " (baseline, not graded)")
          << (mono ? ", z monotone" : ", z NOT monotone") << "; ";
    }
    report(6, ok, d.str());
}

Image two_region(int w, int h, double noise, std::uint64_t seed) {
    Image img(w, h);
    const auto eps = sample_noise(NoiseKind::laplace(noise), img.size(), replicate_stream(seed, StreamPurpose::Image, 0));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(x, y) = (2 * x < w ? 0.0 : 3.0) + (noise > 0.0 ? eps[pixel_index(w, {x, y})] : 0.0);
        }
    }
    return img;
}

std::string bytes_of(const DenoiseResult& r) {
    std::ostringstream out;
    write_grid(out, r.image);
    write_grid(out, r.khat.as_image());
    return out.str();
}

void criterion7() {
    SectionRequest req;
    req.runs = 10000;
    req.seed = kCalibSeed;
    req.geometry = disc_geometry(default_radii());
    req.workers = workers();
    const CalibSection calib = calibrate_section(req);

    const Image flat(64, 64, 5.0);
    const auto c = denoise_image(flat, DenoiseConfig{calib, std::nullopt, RrThresholds::Full, workers()});
    bool khat_full = true;
    for (auto k : c.khat.k) khat_full = khat_full && k == c.khat.K;
    const bool identity = c.image == flat && khat_full;

    const Image truth = two_region(256, 256, 0.0, 0);
    const Image noisy = two_region(256, 256, 1.0, kBenchSeed);
    const auto t0 = Clock::now();
    const auto res = denoise_image(noisy, DenoiseConfig{calib, std::nullopt, RrThresholds::Full, 4});
    const double secs = seconds_since(t0);
    double in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        in += std::pow(noisy.data[i] - truth.data[i], 2);
        out += std::pow(res.image.data[i] - truth.data[i], 2);
    }
    const double ratio = out / in;
    const auto single = denoise_image(noisy, DenoiseConfig{calib, std::nullopt, RrThresholds::Full, 1});
    const bool invariant = bytes_of(single) == bytes_of(res);
    std::ostringstream d;
    d << "constant image " << (identity ? "unchanged with k_hat = K" : "CHANGED") << "; 256^2 MSE ratio "
      << fmt("%.4f", ratio) << " (limit 0.25), sigma_hat " << fmt("%.3f", res.sigma) << "; 1 vs 4 workers "
      << (invariant ? "byte-identical" : "DIFFER") << "; " << fmt("%.1f", secs) << " s at 4 workers (limit 30 s)";
    report(7, identity && ratio <= 0.25 && invariant && secs < 30.0, d.str());
}

void criterion8() {
    const std::vector<LossKind> losses{LossKind::mean(),        LossKind::median(),   LossKind::quantile(0.25),
                                       LossKind::quantile(0.75), LossKind::huber(1.0), LossKind::huber(0.5)};
    std::size_t samples = 0, bad = 0;
    double worst = 0.0;
    for (const auto& loss : losses) {
        for (std::size_t size = 1; size <= 8; ++size) {
            oracle::for_each_multiset(-2, 2, size, [&](const std::vector<double>& ys) {
                ++samples;
                const double got = locate(ys, loss).value;
                if (loss.is_order_statistic()) {
                    if (got != oracle::argmin_at_data(ys, loss).mid()) ++bad;
                } else {
                    const double err = std::abs(got - oracle::argmin_grid(ys, loss).mid());
                    worst = std::max(worst, err);
                    if (err > 1e-6) ++bad;
                }
            });
        }
    }
    std::ostringstream d;
    d << bad << " mismatches over " << samples << " (sample, loss) pairs on values -2..2, sizes 1..8; order statistics exact, "
      << "largest mean/Huber gap " << fmt("%.2e", worst) << " (limit 1e-6)";
    report(8, bad == 0, d.str());
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    bench_bundle();
    const double calib_secs = seconds_since(t0);
    const auto rows = bench_rows();
    const auto tr = Clock::now();
    {
        ExperimentSpec spec;
        spec.runs = 1000;
        spec.seed = kBenchSeed;
        spec.workers = workers();
        run_benchmark(spec, bench_bundle());
    }
    const double row_secs = seconds_since(tr);
    criterion1(rows[0], calib_secs + row_secs);
    criterion2(rows);
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::printf("%d of 8 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
