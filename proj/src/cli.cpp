#include "adaptm/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "adaptm/artifact.hpp"
#include "adaptm/errors.hpp"
#include "adaptm/experiments.hpp"
#include "adaptm/image_io.hpp"
#include "adaptm/imaging.hpp"
#include "adaptm/parallel.hpp"

namespace adaptm {

namespace {

struct Common {
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

unsigned resolve_workers(unsigned flag) { return flag > 0 ? flag : default_workers(); }

void add_seed(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Master seed (required: results are a function of it)")->required();
}

void add_workers(CLI::App* cmd, Common& c) {
    cmd->add_option("--workers", c.workers, "Worker threads (default: ADAPTMREG_WORKERS, else all cores)")
        ->check(CLI::PositiveNumber);
}


// Writes to `path`, or to `fallback` when path is empty or "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + path + "'");
    fn(file);
    if (!file) throw IoError("write failed for '" + path + "'");
}

std::vector<std::size_t> resolve_counts(const std::vector<std::size_t>& explicit_counts, std::size_t levels,
                                        const std::string& origin) {
    if (!explicit_counts.empty()) return explicit_counts;
    if (origin == "five") return geometric_counts(levels);
    if (origin == "four") return geometric_counts_from_four(levels);
    throw InputError("unknown count origin '" + origin + "'");
}

struct CalibrateArgs {
    Common common;
    std::string mode = "zeta";
    std::size_t runs = 10000;
    double alpha = 1.0;
    double r = 2.0;
    std::string noise = "laplace";
    std::vector<std::string> losses;
    std::vector<std::string> rules;
    std::string geometry = "line";
    std::size_t n = 200;
    std::size_t levels = 17;
    std::string origin = "five";
    std::vector<std::size_t> counts;
    std::vector<double> radii;
    std::string out;
};

void run_calibrate(const CalibrateArgs& a, std::ostream& out) {
    SectionRequest base;
    base.mode = parse_calib_mode(a.mode);
    base.runs = a.runs;
    base.alpha = a.alpha;
    base.r = a.r;
    base.noise = NoiseKind::parse(a.noise);
    base.seed = a.common.seed;
    base.workers = resolve_workers(a.common.workers);
    std::vector<std::string> losses = a.losses;
    std::vector<std::string> rules = a.rules;
    if (a.geometry == "line") {
        base.geometry = line_geometry(a.n, resolve_counts(a.counts, a.levels, a.origin));
        if (losses.empty()) losses = {"mean", "median"};
        if (rules.empty()) rules = {"lepski", "rr"};
    } else if (a.geometry == "disc") {
        base.geometry = disc_geometry(a.radii.empty() ? default_radii() : a.radii);
        if (losses.empty()) losses = {"median"};
        if (rules.empty()) rules = {"rr"};
    } else {
        throw InputError("unknown geometry '" + a.geometry + "'");
    }
    std::vector<std::pair<LossKind, SelectionRule>> which;
    for (const auto& l : losses) {
        for (const auto& r : rules) which.emplace_back(LossKind::parse(l), parse_selection_rule(r));
    }
    const CalibBundle bundle = calibrate_bundle(base, which);
    with_output(a.out, out, [&](std::ostream& o) { write_bundle(o, bundle); });
}

struct VerifyArgs {
    Common common;
    std::string calib;
    std::size_t runs = 10000;
    std::string out;
};

void run_verify(const VerifyArgs& a, std::ostream& out) {
    const CalibBundle bundle = load_bundle(a.calib);
    std::ostringstream csv;
    csv << "section,ratio,runs,seed\n";
    csv.precision(6);
    for (const auto& s : bundle.sections) {
        CalibConfig config;
        config.r = s.r;
        config.alpha = s.alpha;
        config.runs = a.runs;
        config.family = family_for(s.geometry);
        config.loss = s.loss;
        config.noise = s.noise;
        config.seed = a.common.seed;
        config.mode = s.mode;
        config.rule = s.rule;
        config.workers = resolve_workers(a.common.workers);
        const double ratio = verify_calibration(config, s.result.z, s.levels, s.test_levels());
        csv << s.key() << ',' << ratio << ',' << a.runs << ',' << a.common.seed << '\n';
    }
    with_output(a.out, out, [&](std::ostream& o) { o << csv.str(); });
}

struct BenchArgs {
    Common common;
    std::string example = "1";
    std::string signal_table;
    double oracle_halfwidth = 0.0;
    std::vector<std::string> noises{"laplace"};
    double noise_scale = 1.0;
    std::size_t runs = 1000;
    std::size_t n = 200;
    std::size_t levels = 17;
    std::string origin = "five";
    std::vector<std::size_t> counts;
    std::vector<std::string> methods;
    std::string rr_thresholds = "full";
    std::string calib;
    std::string out;
};

Signal resolve_signal(const std::string& example, const std::string& table, double oracle_halfwidth) {
    if (!table.empty()) {
        return Signal::load_table(table, oracle_halfwidth > 0.0 ? std::optional<double>(oracle_halfwidth)
                                                                : std::nullopt);
    }
    return Signal::parse(example);
}

void run_bench(const BenchArgs& a, std::ostream& out) {
    const CalibBundle bundle = load_bundle(a.calib);
    ExperimentSpec spec;
    spec.signal = resolve_signal(a.example, a.signal_table, a.oracle_halfwidth);
    spec.n = a.n;
    spec.runs = a.runs;
    spec.seed = a.common.seed;
    spec.counts = resolve_counts(a.counts, a.levels, a.origin);
    spec.rr_thresholds = parse_rr_thresholds(a.rr_thresholds);
    spec.workers = resolve_workers(a.common.workers);
    if (!a.methods.empty()) {
        spec.methods.clear();
        for (const auto& m : a.methods) spec.methods.push_back(parse_method(m));
    } else if (!spec.signal.oracle_halfwidth()) {
        spec.methods.pop_back();
    }
    std::vector<BenchReport> reports;
    for (const auto& name : a.noises) {
        spec.noise = NoiseKind::parse(name).with_scale(a.noise_scale);
        reports.push_back(run_benchmark(spec, bundle));
    }
    with_output(a.out, out, [&](std::ostream& o) { write_bench_csv(o, reports); });
}

struct Prop1Args {
    Common common;
    std::string noise = "laplace";
    double delta = 0.0;
    std::size_t n = 1000;
    std::size_t runs = 20000;
    std::string out;
};

struct MomentsArgs {
    Common common;
    std::string noise = "laplace";
    std::vector<std::size_t> Ns{101, 401, 1601};
    double r = 2.0;
    std::size_t runs = 20000;
    std::string out;
};

struct TailsArgs {
    Common common;
    std::string noise = "laplace";
    std::size_t N = 1001;
    std::vector<double> taus{0.0, 1.0, 2.0, 3.0, 4.0};
    std::size_t runs = 100000;
    std::string out;
};

struct DenoiseArgs {
    Common common;
    std::string in;
    std::string calib;
    std::string sigma = "auto";
    std::string out;
    std::string khat;
    std::string rr_thresholds = "full";
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void run_denoise(const DenoiseArgs& a, std::ostream& out) {
    const CalibBundle bundle = load_bundle(a.calib);
    const CalibSection* section = nullptr;
    for (const auto& s : bundle.sections) {
        if (s.rule == SelectionRule::RingRR && s.geometry.shape == Geometry::Shape::Disc) {
            section = &s;
            break;
        }
    }
    if (!section) throw InputError("calibration artifact '" + a.calib + "' has no rr section on a disc geometry");
    const PgmImage input = read_image(a.in);
    DenoiseConfig config{*section, std::nullopt, parse_rr_thresholds(a.rr_thresholds), resolve_workers(a.common.workers)};
    if (a.sigma != "auto") {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(a.sigma, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != a.sigma.size()) throw InputError("--sigma must be 'auto' or a number");
        config.noise_scale = v;
    }
    const DenoiseResult res = denoise_image(input.image, config);
    if (ends_with(a.out, ".pgm")) {
        write_pgm(a.out, res.image, input.maxval > 0 ? input.maxval : 65535);
    } else {
        write_grid(a.out, res.image);
    }
    if (!a.khat.empty()) {
        write_pgm(a.khat, res.khat.as_image(), std::max<int>(1, static_cast<int>(res.khat.K)));
    }
    out.precision(8);
    out << "sigma: " << res.sigma << '\n';
    out << "sigma_degenerate: " << (res.sigma_degenerate ? "true" : "false") << '\n';
    out << "section: " << section->key() << '\n';
    out << "K: " << res.khat.K << '\n';
    out << "window_shapes: " << res.geometries << '\n';
}

struct SimulateArgs {
    Common common;
    std::string kind = "line";
    std::string example = "1";
    std::string signal_table;
    std::string noise = "laplace";
    double noise_scale = 1.0;
    std::size_t n = 200;
    int width = 256;
    int height = 256;
    double low = 0.0;
    double high = 3.0;
    std::string out;
};

void run_simulate(const SimulateArgs& a, std::ostream& out) {
    const NoiseKind noise = NoiseKind::parse(a.noise).with_scale(a.noise_scale);
    if (a.kind == "line") {
        const Signal signal = resolve_signal(a.example, a.signal_table, 0.0);
        const auto xs = equidistant_design(a.n);
        const auto eps = sample_noise(noise, a.n, replicate_stream(a.common.seed, StreamPurpose::Simulate, 0));
        with_output(a.out, out, [&](std::ostream& o) {
            o.precision(17);
            o << "x,g,y\n";
            for (std::size_t i = 0; i < a.n; ++i) {
                o << xs[i] << ',' << signal(xs[i]) << ',' << signal(xs[i]) + eps[i] << '\n';
            }
        });
        return;
    }
    if (a.kind != "image") throw InputError("unknown simulate kind '" + a.kind + "'");
    if (a.out.empty() || a.out == "-") throw InputError("simulate --kind image needs --out");
    Image img(a.width, a.height);
    const auto eps = sample_noise(noise, img.size(), replicate_stream(a.common.seed, StreamPurpose::Image, 0));
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            img.at(x, y) = (2 * x < a.width ? a.low : a.high) + eps[pixel_index(a.width, {x, y})];
        }
    }
    if (ends_with(a.out, ".pgm")) write_pgm(a.out, img, 255);
    else write_grid(a.out, img);
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pointwise adaptive robust regression: calibration, benchmarks, studies and image denoising",
                 "adaptmreg"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file of options, one [subcommand] section each; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    CalibrateArgs ca;
    auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo calibration of critical values");
    calibrate->add_option("--mode", ca.mode, "zeta | sequential")->check(CLI::IsMember({"zeta", "sequential"}));
    calibrate->add_option("--runs", ca.runs, "Pure-noise replicates")->check(CLI::Range(1000ul, 100000000ul));
    calibrate->add_option("--alpha", ca.alpha, "Error budget alpha")->check(CLI::PositiveNumber);
    calibrate->add_option("--r", ca.r, "Moment order r")->check(CLI::Range(1.0, 64.0));
    calibrate->add_option("--noise", ca.noise, "laplace | gaussian | student:<dof>");
    calibrate->add_option("--loss", ca.losses, "Losses to calibrate (mean, median, quantile:a, huber:k)");
    calibrate->add_option("--rule", ca.rules, "Rules to calibrate (rr, lepski)");
    calibrate->add_option("--geometry", ca.geometry, "line | disc")->check(CLI::IsMember({"line", "disc"}));
    calibrate->add_option("--n", ca.n, "Design size (line)");
    calibrate->add_option("--levels", ca.levels, "Number of windows (line)");
    calibrate->add_option("--count-origin", ca.origin, "five: floor(5^(k+1)/4^k); four: floor(4(5/4)^k)")
        ->check(CLI::IsMember({"five", "four"}));
    calibrate->add_option("--counts", ca.counts, "Explicit window counts (line)");
    calibrate->add_option("--radii", ca.radii, "Disc radii (disc)");
    calibrate->add_option("--out", ca.out, "Artifact path (default stdout)");
    add_seed(calibrate, ca.common);
    add_workers(calibrate, ca.common);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Budget check of an artifact on fresh replicates");
    verify->add_option("--calib", va.calib, "Calibration artifact")->required();
    verify->add_option("--runs", va.runs, "Fresh replicates")->check(CLI::Range(1000ul, 100000000ul));
    verify->add_option("--out", va.out, "CSV path (default stdout)");
    add_seed(verify, va.common);
    add_workers(verify, va.common);

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Monte Carlo benchmark at x = 0 (CSV)");
    bench->add_option("--example", ba.example, "1 (step) | 2 (2x(x+1))");
    bench->add_option("--signal-table", ba.signal_table, "CSV of x,g knots instead of --example");
    bench->add_option("--oracle-halfwidth", ba.oracle_halfwidth, "Oracle window for --signal-table");
    bench->add_option("--noise", ba.noises, "Noise laws (one CSV block each)");
    bench->add_option("--noise-scale", ba.noise_scale, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    bench->add_option("--runs", ba.runs, "Replicates")->check(CLI::PositiveNumber);
    bench->add_option("--n", ba.n, "Design size");
    bench->add_option("--levels", ba.levels, "Number of windows");
    bench->add_option("--count-origin", ba.origin, "five | four")->check(CLI::IsMember({"five", "four"}));
    bench->add_option("--counts", ba.counts, "Explicit window counts");
    bench->add_option("--methods", ba.methods, "Subset of MeanLepski MeanRR MedianLepski MedianRR MedianOracle");
    bench->add_option("--rr-thresholds", ba.rr_thresholds, "full: z_j s_kj + z_(k+1) s_(k+1); calibration: z_j s_kj")
        ->check(CLI::IsMember({"full", "calibration"}));
    bench->add_option("--calib", ba.calib, "Calibration artifact")->required();
    bench->add_option("--out", ba.out, "CSV path (default stdout)");
    add_seed(bench, ba.common);
    add_workers(bench, ba.common);

    Prop1Args pa;
    auto* prop1 = app.add_subcommand("prop1", "Two-sample variances of the Wald and Lepski median statistics");
    prop1->add_option("--noise", pa.noise, "Noise law");
    prop1->add_option("--delta", pa.delta, "Shift of the second sample")->check(CLI::NonNegativeNumber);
    prop1->add_option("--n", pa.n, "Sample size per group")->check(CLI::PositiveNumber);
    prop1->add_option("--runs", pa.runs, "Replicates")->check(CLI::Range(2ul, 100000000ul));
    prop1->add_option("--out", pa.out, "CSV path (default stdout)");
    add_seed(prop1, pa.common);
    add_workers(prop1, pa.common);

    MomentsArgs ma;
    auto* moments = app.add_subcommand("moments", "Normalized moments of the sample median");
    moments->add_option("--noise", ma.noise, "Noise law");
    moments->add_option("--N", ma.Ns, "Odd sample sizes");
    moments->add_option("--r", ma.r, "Moment order")->check(CLI::Range(1.0, 64.0));
    moments->add_option("--runs", ma.runs, "Replicates")->check(CLI::PositiveNumber);
    moments->add_option("--out", ma.out, "CSV path (default stdout)");
    add_seed(moments, ma.common);
    add_workers(moments, ma.common);

    TailsArgs ta;
    auto* tails = app.add_subcommand("tails", "Tail exceedances of the normalized sample median");
    tails->add_option("--noise", ta.noise, "Noise law");
    tails->add_option("--N", ta.N, "Odd sample size");
    tails->add_option("--tau", ta.taus, "Thresholds in [0, sqrt(N)/2]");
    tails->add_option("--runs", ta.runs, "Replicates")->check(CLI::PositiveNumber);
    tails->add_option("--out", ta.out, "CSV path (default stdout)");
    add_seed(tails, ta.common);
    add_workers(tails, ta.common);

    DenoiseArgs da;
    auto* denoise = app.add_subcommand("denoise", "Adaptive median denoising of a PGM or RGRID image");
    denoise->add_option("--in", da.in, "Input image (P5 PGM or RGRID)")->required();
    denoise->add_option("--calib", da.calib, "Disc calibration artifact")->required();
    denoise->add_option("--sigma", da.sigma, "Noise scale or 'auto'");
    denoise->add_option("--out", da.out, "Output image (.pgm, otherwise RGRID)")->required();
    denoise->add_option("--khat", da.khat, "Selected radius level map (PGM, maxval K)");
    denoise->add_option("--rr-thresholds", da.rr_thresholds, "full | calibration")
        ->check(CLI::IsMember({"full", "calibration"}));
    add_workers(denoise, da.common);

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Dump a simulated sample (line CSV or two-region image)");
    simulate->add_option("--kind", sa.kind, "line | image")->check(CLI::IsMember({"line", "image"}));
    simulate->add_option("--example", sa.example, "1 | 2 (line)");
    simulate->add_option("--signal-table", sa.signal_table, "CSV of x,g knots (line)");
    simulate->add_option("--noise", sa.noise, "Noise law");
    simulate->add_option("--noise-scale", sa.noise_scale, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    simulate->add_option("--n", sa.n, "Design size (line)")->check(CLI::Range(2ul, 100000000ul));
    simulate->add_option("--width", sa.width, "Image width")->check(CLI::PositiveNumber);
    simulate->add_option("--height", sa.height, "Image height")->check(CLI::PositiveNumber);
    simulate->add_option("--low", sa.low, "Left region intensity (image)");
    simulate->add_option("--high", sa.high, "Right region intensity (image)");
    simulate->add_option("--out", sa.out, "Output path (default stdout for line)");
    add_seed(simulate, sa.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kExitValidation;
    }

    try {
        if (*calibrate) run_calibrate(ca, out);
        else if (*verify) run_verify(va, out);
        else if (*bench) run_bench(ba, out);
        else if (*prop1) {
            const auto rep = two_sample_study(NoiseKind::parse(pa.noise), pa.delta, pa.n, pa.runs, pa.common.seed,
                                              resolve_workers(pa.common.workers));
            with_output(pa.out, out, [&](std::ostream& o) { write_csv(o, rep); });
        } else if (*moments) {
            const auto rep = median_moment_study(NoiseKind::parse(ma.noise), ma.Ns, ma.r, ma.runs, ma.common.seed,
                                                 resolve_workers(ma.common.workers));
            with_output(ma.out, out, [&](std::ostream& o) { write_csv(o, rep); });
        } else if (*tails) {
            const auto rep = tail_study(NoiseKind::parse(ta.noise), ta.N, ta.taus, ta.runs, ta.common.seed,
                                        resolve_workers(ta.common.workers));
            with_output(ta.out, out, [&](std::ostream& o) { write_csv(o, rep); });
        } else if (*denoise) run_denoise(da, out);
        else if (*simulate) run_simulate(sa, out);
    } catch (const std::invalid_argument& e) {
        err << "error: validation: " << one_line(e.what()) << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: runtime: " << one_line(e.what()) << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace adaptm
