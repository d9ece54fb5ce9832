#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adaptm {

struct Pixel {
    int x = 0;
    int y = 0;
};

/// Nested neighbourhoods U_0 c U_1 c ... c U_K around one point.
///
/// Every U_k is a prefix of a single ordering of design indices, so nesting
/// holds by construction: U_k = order[0, N_k) and the ring U_{k+1} \ U_k is
/// order[N_k, N_{k+1}).
class WindowFamily {
public:
    WindowFamily() = default;
    WindowFamily(std::vector<std::size_t> order, std::vector<std::size_t> counts,
                 double growth_lo = 1.15, double growth_hi = 1.35);

    /// Highest index K (there are K + 1 windows).
    std::size_t K() const { return counts_.size() - 1; }
    std::size_t levels() const { return counts_.size(); }

    std::span<const std::size_t> counts() const { return counts_; }
    std::size_t count(std::size_t k) const { return counts_.at(k); }

    /// Design indices of U_k.
    std::span<const std::size_t> member(std::size_t k) const;
    /// Design indices of U_{k+1} \ U_k; throws PreconditionError unless k < K.
    std::span<const std::size_t> ring_indices(std::size_t k) const;
    /// All indices of U_K, nearest first.
    std::span<const std::size_t> order() const { return order_; }

    double growth_lo() const { return growth_lo_; }
    double growth_hi() const { return growth_hi_; }
    /// True when some ratio N_{k+1}/N_k falls outside [growth_lo, growth_hi].
    bool growth_violated() const { return growth_violated_; }

private:
    std::vector<std::size_t> order_;
    std::vector<std::size_t> counts_;
    double growth_lo_ = 1.15;
    double growth_hi_ = 1.35;
    bool growth_violated_ = false;
};

/// Equidistant design on [-1, 1] with both endpoints; symmetric bitwise.
std::vector<double> equidistant_design(std::size_t n);

/// floor(5^{k+1} / 4^k) for k = 0..levels-1, i.e. 5, 6, 7, 9, 12, ...
std::vector<std::size_t> geometric_counts(std::size_t levels);
/// floor(4 (5/4)^k) for k = 0..levels-1, starting at 4.
std::vector<std::size_t> geometric_counts_from_four(std::size_t levels);

/// U_k = the counts[k] design points nearest to `center`, ties to the smaller index.
WindowFamily build_family_1d(std::span<const double> design_xs, double center,
                             std::span<const std::size_t> counts);

/// Pixel index of (x, y) in a row-major width x height grid.
inline std::size_t pixel_index(int width, Pixel p) {
    return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(p.x);
}

/// Discs of the given radii around `center`, clipped at the image border.
/// Levels whose clipped count does not grow are dropped.
WindowFamily build_family_2d(int width, int height, Pixel center, std::span<const double> radii);

/// r_k = r0 * growth^k for k = 0..levels-1.
std::vector<double> geometric_radii(double r0, double growth, std::size_t levels);

/// Lattice offsets within max(radii), sorted by squared distance; reused
/// across pixels when building many 2D families.
class DiscStencil {
public:
    explicit DiscStencil(std::span<const double> radii);

    WindowFamily family_at(int width, int height, Pixel center) const;
    /// Clipped per-level counts before duplicate removal.
    std::vector<std::size_t> raw_counts_at(int width, int height, Pixel center) const;

    std::span<const double> radii() const { return radii_; }

private:
    struct Offset {
        int dx;
        int dy;
        long d2;
    };
    std::vector<double> radii_;
    std::vector<long> radius_d2_;  // floor(r_k^2): lattice d2 <= r^2 iff d2 <= floor(r^2)
    std::vector<Offset> offsets_;
};

}  // namespace adaptm
