#include "adaptm/windows.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adaptm/errors.hpp"

namespace adaptm {

WindowFamily::WindowFamily(std::vector<std::size_t> order, std::vector<std::size_t> counts,
                           double growth_lo, double growth_hi)
    : order_(std::move(order)), counts_(std::move(counts)), growth_lo_(growth_lo),
      growth_hi_(growth_hi) {
    if (counts_.empty()) throw PreconditionError("window family needs at least one level");
    if (counts_.front() == 0) throw PreconditionError("window counts must be positive");
    for (std::size_t k = 0; k + 1 < counts_.size(); ++k) {
        if (counts_[k + 1] <= counts_[k]) {
            throw PreconditionError("window counts must be strictly increasing");
        }
        const double ratio = static_cast<double>(counts_[k + 1]) / static_cast<double>(counts_[k]);
        if (ratio < growth_lo_ || ratio > growth_hi_) growth_violated_ = true;
    }
    if (counts_.back() != order_.size()) {
        throw PreconditionError("window ordering must cover exactly the largest window");
    }
}

std::span<const std::size_t> WindowFamily::member(std::size_t k) const {
    if (k >= counts_.size()) throw PreconditionError("window index out of range");
    return std::span<const std::size_t>(order_).first(counts_[k]);
}

std::span<const std::size_t> WindowFamily::ring_indices(std::size_t k) const {
    if (k >= K()) throw PreconditionError("ring index must satisfy 0 <= k < K");
    return std::span<const std::size_t>(order_).subspan(counts_[k], counts_[k + 1] - counts_[k]);
}

std::vector<double> equidistant_design(std::size_t n) {
    if (n < 2) throw PreconditionError("design needs at least two points");
    std::vector<double> xs(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        // Integer numerator keeps x_i = -x_{n-1-i} exact.
        const auto num = 2 * static_cast<long long>(i) - static_cast<long long>(n - 1);
        xs[i] = static_cast<double>(num) / denom;
    }
    return xs;
}

namespace {

std::size_t floor_ratio_pow(unsigned num_exp, unsigned den_exp, unsigned factor) {
    unsigned __int128 num = factor;
    unsigned __int128 den = 1;
    for (unsigned i = 0; i < num_exp; ++i) num *= 5;
    for (unsigned i = 0; i < den_exp; ++i) den *= 4;
    return static_cast<std::size_t>(num / den);
}

}  // namespace

std::vector<std::size_t> geometric_counts(std::size_t levels) {
    if (levels > 40) throw PreconditionError("too many window levels");
    std::vector<std::size_t> counts(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        counts[k] = floor_ratio_pow(static_cast<unsigned>(k + 1), static_cast<unsigned>(k), 1);
    }
    return counts;
}

std::vector<std::size_t> geometric_counts_from_four(std::size_t levels) {
    if (levels > 40) throw PreconditionError("too many window levels");
    std::vector<std::size_t> counts(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        counts[k] = floor_ratio_pow(static_cast<unsigned>(k), static_cast<unsigned>(k), 4);
    }
    return counts;
}

WindowFamily build_family_1d(std::span<const double> design_xs, double center,
                             std::span<const std::size_t> counts) {
    if (counts.empty()) throw PreconditionError("build_family_1d: no counts");
    if (counts.back() > design_xs.size()) {
        throw PreconditionError("build_family_1d: window count exceeds design size");
    }
    if (!std::is_sorted(design_xs.begin(), design_xs.end())) {
        throw PreconditionError("build_family_1d: design must be sorted");
    }
    std::vector<std::size_t> idx(design_xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(design_xs[a] - center) < std::abs(design_xs[b] - center);
    });
    idx.resize(counts.back());
    return WindowFamily(std::move(idx), std::vector<std::size_t>(counts.begin(), counts.end()));
}

std::vector<double> geometric_radii(double r0, double growth, std::size_t levels) {
    if (!(r0 > 0.0) || !(growth > 1.0)) {
        throw PreconditionError("radii need r0 > 0 and growth > 1");
    }
    std::vector<double> radii(levels);
    for (std::size_t k = 0; k < levels; ++k) radii[k] = r0 * std::pow(growth, static_cast<double>(k));
    return radii;
}

DiscStencil::DiscStencil(std::span<const double> radii) : radii_(radii.begin(), radii.end()) {
    if (radii_.empty()) throw PreconditionError("disc stencil needs at least one radius");
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        if (!(radii_[k] > 0.0) || (k > 0 && !(radii_[k] > radii_[k - 1]))) {
            throw PreconditionError("radii must be positive and strictly increasing");
        }
        radius_d2_.push_back(static_cast<long>(std::floor(radii_[k] * radii_[k] + 1e-9)));
    }
    const long rmax2 = radius_d2_.back();
    const int reach = static_cast<int>(std::floor(std::sqrt(static_cast<double>(rmax2)))) + 1;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            const long d2 = static_cast<long>(dx) * dx + static_cast<long>(dy) * dy;
            if (d2 <= rmax2) offsets_.push_back({dx, dy, d2});
        }
    }
    // Equal distances fall back to row-major order, matching pixel index order.
    std::sort(offsets_.begin(), offsets_.end(), [](const Offset& a, const Offset& b) {
        if (a.d2 != b.d2) return a.d2 < b.d2;
        if (a.dy != b.dy) return a.dy < b.dy;
        return a.dx < b.dx;
    });
}

std::vector<std::size_t> DiscStencil::raw_counts_at(int width, int height, Pixel c) const {
    std::vector<std::size_t> counts(radius_d2_.size(), 0);
    std::size_t level = 0;
    std::size_t inside = 0;
    for (const auto& o : offsets_) {
        while (o.d2 > radius_d2_[level]) {
            counts[level++] = inside;
        }
        const int x = c.x + o.dx;
        const int y = c.y + o.dy;
        if (x >= 0 && y >= 0 && x < width && y < height) ++inside;
    }
    for (; level < counts.size(); ++level) counts[level] = inside;
    return counts;
}

WindowFamily DiscStencil::family_at(int width, int height, Pixel c) const {
    if (c.x < 0 || c.y < 0 || c.x >= width || c.y >= height) {
        throw PreconditionError("window center outside image");
    }
    std::vector<std::size_t> order;
    order.reserve(offsets_.size());
    std::vector<std::size_t> counts;
    std::size_t level = 0;
    auto close_level = [&]() {
        if (counts.empty() || order.size() > counts.back()) counts.push_back(order.size());
        ++level;
    };
    for (const auto& o : offsets_) {
        while (o.d2 > radius_d2_[level]) close_level();
        const int x = c.x + o.dx;
        const int y = c.y + o.dy;
        if (x >= 0 && y >= 0 && x < width && y < height) {
            order.push_back(pixel_index(width, {x, y}));
        }
    }
    while (level < radius_d2_.size()) close_level();
    // Clipped discs carry no declared growth band.
    return WindowFamily(std::move(order), std::move(counts), 1.0 + 1e-12, 1e9);
}

WindowFamily build_family_2d(int width, int height, Pixel center, std::span<const double> radii) {
    return DiscStencil(radii).family_at(width, height, center);
}

}  // namespace adaptm
