#include "adaptm/artifact.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "adaptm/errors.hpp"

namespace adaptm {

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename Seq>
std::string join(const Seq& xs) {
    std::string out;
    for (const auto& x : xs) {
        if (!out.empty()) out += ' ';
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(x)>>) out += fmt(x);
        else out += std::to_string(x);
    }
    return out;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex << std::setw(16) << std::setfill('0') << v;
    return s.str();
}

double to_double(const std::string& text, const std::string& key) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("calibration artifact: bad number '" + text + "' for " + key);
    }
    return v;
}

std::uint64_t to_u64(const std::string& text, const std::string& key, int base = 10) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    auto res = std::from_chars(text.data(), end, v, base);
    if (res.ec != std::errc() || res.ptr != end) {
        throw InputError("calibration artifact: bad integer '" + text + "' for " + key);
    }
    return v;
}

std::vector<std::string> words(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::vector<double> doubles(const std::string& text, const std::string& key) {
    std::vector<double> out;
    for (const auto& w : words(text)) out.push_back(to_double(w, key));
    return out;
}

std::string settings_text(const CalibSection& s) {
    std::ostringstream out;
    out << "rule: " << to_string(s.rule) << '\n';
    out << "loss: " << s.loss.name() << '\n';
    out << "noise: " << s.noise.name() << '\n';
    out << "noise_scale: " << fmt(s.noise.scale()) << '\n';
    out << "mode: " << to_string(s.mode) << '\n';
    out << "r: " << fmt(s.r) << '\n';
    out << "alpha: " << fmt(s.alpha) << '\n';
    out << "runs: " << s.runs << '\n';
    out << "seed: " << s.seed << '\n';
    if (s.geometry.shape == Geometry::Shape::Line) {
        out << "geometry: line\n";
        out << "design_n: " << s.geometry.design_n << '\n';
        out << "center: " << fmt(s.geometry.center) << '\n';
        out << "counts: " << join(s.geometry.counts) << '\n';
    } else {
        out << "geometry: disc\n";
        out << "radii: " << join(s.geometry.radii) << '\n';
    }
    out << "levels_method: " << to_string(s.levels.method) << '\n';
    out << "levels_runs: " << s.levels.runs << '\n';
    out << "levels_seed: " << s.levels.seed << '\n';
    out << "s: " << join(s.levels.s) << '\n';
    out << "s_ring: " << join(s.levels.s_ring.flat()) << '\n';
    if (s.pair_levels) out << "pair_levels: " << join(s.pair_levels->flat()) << '\n';
    return out.str();
}

std::size_t triangle_rows(std::size_t flat_size, const std::string& key) {
    std::size_t rows = 0;
    while (rows * (rows + 1) / 2 < flat_size) ++rows;
    if (rows * (rows + 1) / 2 != flat_size) {
        throw InputError("calibration artifact: " + key + " is not a triangular table");
    }
    return rows;
}

TriangularTable table_from(const std::vector<double>& flat, const std::string& key) {
    TriangularTable t(triangle_rows(flat.size(), key));
    t.flat() = flat;
    return t;
}

CalibSection section_from(const std::string& name, const std::map<std::string, std::string>& kv,
                          const std::vector<std::vector<std::string>>& z_rows) {
    auto get = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw InputError("calibration artifact: section [" + name + "] lacks '" + key + "'");
        return it->second;
    };
    CalibSection s;
    s.rule = parse_selection_rule(get("rule"));
    s.loss = LossKind::parse(get("loss"));
    s.noise = NoiseKind::parse(get("noise")).with_scale(to_double(get("noise_scale"), "noise_scale"));
    s.mode = parse_calib_mode(get("mode"));
    s.r = to_double(get("r"), "r");
    s.alpha = to_double(get("alpha"), "alpha");
    s.runs = to_u64(get("runs"), "runs");
    s.seed = to_u64(get("seed"), "seed");
    const std::string& shape = get("geometry");
    if (shape == "line") {
        s.geometry.shape = Geometry::Shape::Line;
        s.geometry.design_n = to_u64(get("design_n"), "design_n");
        s.geometry.center = to_double(get("center"), "center");
        for (const auto& w : words(get("counts"))) s.geometry.counts.push_back(to_u64(w, "counts"));
    } else if (shape == "disc") {
        s.geometry.shape = Geometry::Shape::Disc;
        s.geometry.radii = doubles(get("radii"), "radii");
    } else {
        throw InputError("calibration artifact: unknown geometry '" + shape + "'");
    }
    s.levels.r = s.r;
    s.levels.method = parse_levels_method(get("levels_method"));
    s.levels.runs = to_u64(get("levels_runs"), "levels_runs");
    s.levels.seed = to_u64(get("levels_seed"), "levels_seed");
    s.levels.s = doubles(get("s"), "s");
    s.levels.s_ring = table_from(doubles(get("s_ring"), "s_ring"), "s_ring");
    if (s.levels.s.size() < 2 || s.levels.s_ring.size() != s.levels.K()) {
        throw InputError("calibration artifact: levels s and s_ring disagree on K");
    }
    if (kv.count("pair_levels")) {
        s.pair_levels = table_from(doubles(get("pair_levels"), "pair_levels"), "pair_levels");
        if (s.pair_levels->size() != s.levels.K()) {
            throw InputError("calibration artifact: pair_levels disagree on K");
        }
    }
    if (s.rule == SelectionRule::Lepski && !s.pair_levels) {
        throw InputError("calibration artifact: Lepski section [" + name + "] lacks pair_levels");
    }

    const std::uint64_t stored = to_u64(get("config_hash"), "config_hash", 16);
    if (stored != s.config_hash()) {
        throw InputError("calibration artifact: config_hash mismatch in section [" + name + "]");
    }

    CalibResult& res = s.result;
    const std::string& zeta = get("zeta");
    if (zeta != "none") res.z.zeta = to_double(zeta, "zeta");
    res.z.alpha = s.alpha;
    res.z.r = s.r;
    res.achieved_lhs = to_double(get("achieved_lhs"), "achieved_lhs");
    res.budget = to_double(get("budget"), "budget");
    res.seed = s.seed;
    res.runs = s.runs;
    res.few_runs_warning = s.runs < 10000;
    for (std::size_t k = 0; k < z_rows.size(); ++k) {
        const auto& row = z_rows[k];
        if (row.size() != 3 || to_u64(row[0], "z") != k) {
            throw InputError("calibration artifact: malformed z table in section [" + name + "]");
        }
        res.z.z.push_back(to_double(row[1], "z"));
        res.per_k_error_share.push_back(to_double(row[2], "z share"));
    }
    if (res.z.K() != s.levels.K()) {
        throw InputError("calibration artifact: z table has " + std::to_string(res.z.K()) +
                         " entries, levels have K=" + std::to_string(s.levels.K()));
    }
    if (name != s.key()) {
        throw InputError("calibration artifact: section [" + name + "] should be named [" + s.key() + "]");
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string CalibSection::key() const { return loss.name() + "-" + to_string(rule); }

std::uint64_t CalibSection::config_hash() const { return fnv1a64(settings_text(*this)); }

const TriangularTable& CalibSection::test_levels() const {
    return test_levels_for(rule, levels, pair_levels);
}

const CalibSection* CalibBundle::find(const LossKind& loss, SelectionRule rule) const {
    for (const auto& s : sections) {
        if (s.loss == loss && s.rule == rule) return &s;
    }
    return nullptr;
}

const CalibSection& CalibBundle::require(const LossKind& loss, SelectionRule rule) const {
    const CalibSection* s = find(loss, rule);
    if (!s) {
        throw InputError("calibration artifact has no section [" + loss.name() + "-" + to_string(rule) + "]");
    }
    return *s;
}

void write_bundle(std::ostream& out, const CalibBundle& bundle) {
    out << "# adaptmreg calibration\n";
    for (const auto& s : bundle.sections) {
        out << '\n' << '[' << s.key() << "]\n";
        out << settings_text(s);
        out << "config_hash: " << hex64(s.config_hash()) << '\n';
        out << "zeta: " << (s.result.z.zeta ? fmt(*s.result.z.zeta) : std::string("none")) << '\n';
        out << "achieved_lhs: " << fmt(s.result.achieved_lhs) << '\n';
        out << "budget: " << fmt(s.result.budget) << '\n';
        out << "z_table: k z share\n";
        for (std::size_t k = 0; k < s.result.z.K(); ++k) {
            const double share = k < s.result.per_k_error_share.size() ? s.result.per_k_error_share[k] : 0.0;
            out << k << ' ' << fmt(s.result.z.z[k]) << ' ' << fmt(share) << '\n';
        }
    }
}

std::string bundle_to_string(const CalibBundle& bundle) {
    std::ostringstream out;
    write_bundle(out, bundle);
    return out.str();
}

CalibBundle read_bundle(std::istream& in) {
    CalibBundle bundle;
    std::string name;
    std::map<std::string, std::string> kv;
    std::vector<std::vector<std::string>> z_rows;
    bool in_table = false;
    auto flush = [&] {
        if (!name.empty()) bundle.sections.push_back(section_from(name, kv, z_rows));
        kv.clear();
        z_rows.clear();
        in_table = false;
    };
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw InputError("calibration artifact: bad section header at line " + std::to_string(lineno));
            flush();
            name = line.substr(1, line.size() - 2);
            continue;
        }
        if (name.empty()) throw InputError("calibration artifact: content before the first section at line " + std::to_string(lineno));
        if (in_table) {
            z_rows.push_back(words(line));
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            throw InputError("calibration artifact: expected 'key: value' at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, colon));
        if (key == "z_table") {
            in_table = true;
            continue;
        }
        if (!kv.emplace(key, trim(line.substr(colon + 1))).second) {
            throw InputError("calibration artifact: duplicate key '" + key + "' at line " + std::to_string(lineno));
        }
    }
    flush();
    if (bundle.sections.empty()) throw InputError("calibration artifact has no sections");
    return bundle;
}

CalibBundle parse_bundle(const std::string& text) {
    std::istringstream in(text);
    return read_bundle(in);
}

void save_bundle(const std::string& path, const CalibBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_bundle(out, bundle);
    if (!out) throw IoError("write failed for '" + path + "'");
}

CalibBundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read calibration artifact '" + path + "'");
    return read_bundle(in);
}

}  // namespace adaptm
