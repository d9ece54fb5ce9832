#include "adaptm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adaptm/errors.hpp"

namespace adaptm {

LossKind LossKind::quantile(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("quantile level must lie strictly inside (0,1)");
    }
    return LossKind(Kind::Quantile, alpha);
}

LossKind LossKind::huber(double kink) {
    if (!(kink > 0.0) || !std::isfinite(kink)) {
        throw PreconditionError("Huber kink must be positive and finite");
    }
    return LossKind(Kind::Huber, kink);
}

LossKind LossKind::parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    auto number = [&]() {
        if (colon == std::string::npos) {
            throw InputError("loss '" + text + "' needs a parameter, e.g. " + head + ":0.5");
        }
        std::istringstream in(text.substr(colon + 1));
        double v = 0.0;
        if (!(in >> v) || !in.eof()) {
            throw InputError("bad loss parameter in '" + text + "'");
        }
        return v;
    };
    if (head == "mean" && colon == std::string::npos) return mean();
    if (head == "median" && colon == std::string::npos) return median();
    if (head == "quantile") return quantile(number());
    if (head == "huber") return huber(number());
    throw InputError("unknown loss '" + text + "'");
}

std::string LossKind::name() const {
    std::ostringstream out;
    out.precision(17);
    switch (kind_) {
        case Kind::Mean: return "mean";
        case Kind::Median: return "median";
        case Kind::Quantile: out << "quantile:" << param_; return out.str();
        case Kind::Huber: out << "huber:" << param_; return out.str();
    }
    return "?";
}

double rho(const LossKind& loss, double x) {
    switch (loss.kind()) {
        case LossKind::Kind::Mean: return 0.5 * x * x;
        case LossKind::Kind::Median: return std::abs(x);
        case LossKind::Kind::Quantile: return std::abs(x) + (2.0 * loss.parameter() - 1.0) * x;
        case LossKind::Kind::Huber: {
            const double k = loss.parameter();
            const double a = std::abs(x);
            return a <= k ? 0.5 * x * x : k * a - 0.5 * k * k;
        }
    }
    return 0.0;
}

double influence(const LossKind& loss, double x) {
    auto sign = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
    switch (loss.kind()) {
        case LossKind::Kind::Mean: return x;
        case LossKind::Kind::Median: return sign(x);
        case LossKind::Kind::Quantile: return sign(x) + (2.0 * loss.parameter() - 1.0);
        case LossKind::Kind::Huber: return std::clamp(x, -loss.parameter(), loss.parameter());
    }
    return 0.0;
}

namespace {

// Argmin interval of the check loss via order statistics. Reorders `v`.
LocationResult quantile_interval(std::span<double> v, double alpha) {
    const std::size_t n = v.size();
    const double t = static_cast<double>(n) * alpha;
    const double m = std::round(t);
    const bool flat = std::abs(t - m) <= 1e-9 * static_cast<double>(n) && m >= 1.0 &&
                      m <= static_cast<double>(n - 1);
    if (flat) {
        const auto lo_rank = static_cast<std::size_t>(m) - 1;
        std::nth_element(v.begin(), v.begin() + lo_rank, v.end());
        const double lo = v[lo_rank];
        const double hi = *std::min_element(v.begin() + lo_rank + 1, v.end());
        return {0.5 * (lo + hi), lo, hi};
    }
    auto rank = static_cast<std::size_t>(std::ceil(t));
    rank = std::clamp<std::size_t>(rank, 1, n) - 1;
    std::nth_element(v.begin(), v.begin() + rank, v.end());
    return {v[rank], v[rank], v[rank]};
}

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double y : v) sum += y;
    return sum / static_cast<double>(v.size());
}

double huber_psi(std::span<const double> v, double mu, double k) {
    double s = 0.0;
    long clipped = 0;
    for (double y : v) {
        const double x = y - mu;
        if (x >= k) ++clipped;
        else if (x <= -k) --clipped;
        else s += x;
    }
    return s + k * static_cast<double>(clipped);
}

// psi is continuous and non-increasing; its zero set is [lo, hi].
LocationResult huber_interval(std::span<const double> v, double k) {
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    if (mn == mx) return {mn, mn, mn};
    const double tol = 1e-12 * (1.0 + (mx - mn));

    // inf{mu : psi(mu) <= 0}
    double a = mn, b = mx;
    if (huber_psi(v, a, k) <= 0.0) {
        b = a;
    }
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (huber_psi(v, mid, k) <= 0.0) b = mid; else a = mid;
    }
    const double lo = 0.5 * (a + b);

    // sup{mu : psi(mu) >= 0}
    a = mn;
    b = mx;
    if (huber_psi(v, b, k) >= 0.0) {
        a = b;
    }
    while (b - a > tol) {
        const double mid = 0.5 * (a + b);
        if (huber_psi(v, mid, k) >= 0.0) a = mid; else b = mid;
    }
    const double hi = std::max(lo, 0.5 * (a + b));
    return {0.5 * (lo + hi), lo, hi};
}

}  // namespace

LocationResult locate(std::span<const double> values, const LossKind& loss) {
    if (values.empty()) throw PreconditionError("locate: empty sample");
    for (double y : values) {
        if (!std::isfinite(y)) throw InputError("locate: non-finite observation");
    }
    switch (loss.kind()) {
        case LossKind::Kind::Mean: {
            const double m = mean_of(values);
            return {m, m, m};
        }
        case LossKind::Kind::Median:
        case LossKind::Kind::Quantile: {
            std::vector<double> scratch(values.begin(), values.end());
            return quantile_interval(scratch, loss.parameter());
        }
        case LossKind::Kind::Huber: return huber_interval(values, loss.parameter());
    }
    return {};
}

double locate_inplace(std::span<double> scratch, const LossKind& loss) {
    switch (loss.kind()) {
        case LossKind::Kind::Mean: return mean_of(scratch);
        case LossKind::Kind::Median:
        case LossKind::Kind::Quantile: return quantile_interval(scratch, loss.parameter()).value;
        case LossKind::Kind::Huber: return huber_interval(scratch, loss.parameter()).value;
    }
    return 0.0;
}

bool betweenness_holds(std::span<const double> values,
                       const std::vector<std::vector<std::size_t>>& partition,
                       const LossKind& loss) {
    if (partition.empty()) throw PreconditionError("betweenness: empty partition");
    std::vector<char> seen(values.size(), 0);
    std::size_t covered = 0;
    for (const auto& block : partition) {
        if (block.empty()) throw PreconditionError("betweenness: empty block");
        for (std::size_t i : block) {
            if (i >= values.size() || seen[i]) {
                throw PreconditionError("betweenness: blocks must be disjoint index sets");
            }
            seen[i] = 1;
            ++covered;
        }
    }
    if (covered != values.size()) throw PreconditionError("betweenness: blocks must cover all indices");

    const double whole = locate(values, loss).value;
    double lo = whole, hi = whole;
    bool first = true;
    std::vector<double> block_values;
    for (const auto& block : partition) {
        block_values.clear();
        for (std::size_t i : block) block_values.push_back(values[i]);
        const double m = locate(block_values, loss).value;
        lo = first ? m : std::min(lo, m);
        hi = first ? m : std::max(hi, m);
        first = false;
    }
    // Order statistics are exact; the mean and the Huber root carry rounding
    // and solver error, absorbed by a slack relative to the data magnitude.
    double slack = 0.0;
    if (!loss.is_order_statistic()) {
        double scale = 0.0;
        for (double y : values) scale = std::max(scale, std::abs(y));
        slack = 1e-10 * (1.0 + scale);
    }
    return lo - slack <= whole && whole <= hi + slack;
}

}  // namespace adaptm
