#pragma once

#include <span>
#include <vector>

#include "adaptm/loss.hpp"
#include "adaptm/windows.hpp"

namespace adaptm {

/// Base estimates over U_0..U_K and ring estimates over U_{k+1} \ U_k.
struct Estimates {
    std::vector<double> base;   // K + 1 entries
    std::vector<double> rings;  // K entries
};

/// M-estimates over every window and every ring of `family`; `values` is
/// indexed by design index.
Estimates base_estimates(std::span<const double> values, const WindowFamily& family,
                         const LossKind& loss);

/// Same computation for observations already listed in window order
/// (ordered[i] belongs to design index family.order()[i]). `scratch` must hold
/// at least counts.back() doubles; `out` is resized as needed.
void estimates_in_window_order(std::span<const double> ordered, std::span<const std::size_t> counts,
                               const LossKind& loss, std::span<double> scratch, Estimates& out);

}  // namespace adaptm
