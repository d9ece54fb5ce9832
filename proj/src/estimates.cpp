#include "adaptm/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "adaptm/errors.hpp"

namespace adaptm {

void estimates_in_window_order(std::span<const double> ordered, std::span<const std::size_t> counts,
                               const LossKind& loss, std::span<double> scratch, Estimates& out) {
    const std::size_t levels = counts.size();
    out.base.resize(levels);
    out.rings.resize(levels - 1);

    if (loss.kind() == LossKind::Kind::Mean) {
        // One pass: each ring sum is accumulated on its own, then folded into U_k.
        double running = 0.0;
        for (std::size_t i = 0; i < counts[0]; ++i) running += ordered[i];
        out.base[0] = running / static_cast<double>(counts[0]);
        for (std::size_t k = 0; k + 1 < levels; ++k) {
            double ring_sum = 0.0;
            for (std::size_t i = counts[k]; i < counts[k + 1]; ++i) ring_sum += ordered[i];
            out.rings[k] = ring_sum / static_cast<double>(counts[k + 1] - counts[k]);
            running += ring_sum;
            out.base[k + 1] = running / static_cast<double>(counts[k + 1]);
        }
        return;
    }

    for (std::size_t k = 0; k < levels; ++k) {
        auto window = scratch.first(counts[k]);
        std::copy_n(ordered.begin(), counts[k], window.begin());
        out.base[k] = locate_inplace(window, loss);
        if (k + 1 < levels) {
            const std::size_t width = counts[k + 1] - counts[k];
            auto ring = scratch.first(width);
            std::copy_n(ordered.begin() + static_cast<std::ptrdiff_t>(counts[k]), width, ring.begin());
            out.rings[k] = locate_inplace(ring, loss);
        }
    }
}

Estimates base_estimates(std::span<const double> values, const WindowFamily& family,
                         const LossKind& loss) {
    const auto order = family.order();
    std::vector<double> ordered(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (order[i] >= values.size()) {
            throw PreconditionError("base_estimates: window index outside the observation vector");
        }
        ordered[i] = values[order[i]];
        if (!std::isfinite(ordered[i])) throw InputError("base_estimates: non-finite observation");
    }
    std::vector<double> scratch(ordered.size());
    Estimates out;
    estimates_in_window_order(ordered, family.counts(), loss, scratch, out);
    return out;
}

}  // namespace adaptm
