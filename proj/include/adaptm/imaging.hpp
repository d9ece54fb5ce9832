#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "adaptm/artifact.hpp"
#include "adaptm/image_io.hpp"
#include "adaptm/loss.hpp"
#include "adaptm/noise.hpp"
#include "adaptm/selector.hpp"

namespace adaptm {

/// r_k = 1.5 * sqrt(1.4)^k, k = 0..12.
std::vector<double> default_radii();
/// Disc geometry for a radius sequence.
Geometry disc_geometry(std::vector<double> radii);

struct NoiseScaleEstimate {
    double sigma = 0.0;
    bool degenerate = false;  // all horizontal differences have median zero
};

/// median |Y(x+1, y) - Y(x, y)| / c, with c the median of |X1 - X2| for
/// independent unit-variance draws of `kind`.
NoiseScaleEstimate estimate_noise_scale(const Image& image, const NoiseKind& kind = NoiseKind::laplace());

struct KhatMap {
    int width = 0;
    int height = 0;
    std::size_t K = 0;             // radius levels - 1
    std::vector<std::uint16_t> k;  // selected radius level per pixel

    Image as_image() const;
};

struct DenoiseConfig {
    /// Zeta-mode RR section calibrated on a disc geometry.
    CalibSection calib;
    /// Noise scale; estimated from the image when absent.
    std::optional<double> noise_scale;
    RrThresholds thresholds = RrThresholds::Full;
    unsigned workers = 1;
};

struct DenoiseResult {
    Image image;
    KhatMap khat;
    double sigma = 0.0;
    bool sigma_degenerate = false;
    std::size_t geometries = 0;  // distinct clipped window shapes
};

/// Throws InputError when the artifact is not a zeta-mode RR disc calibration
/// or its loss needs Monte Carlo levels (Huber).
void check_denoise_artifact(const CalibSection& calib);

/// Per pixel: clipped disc family, base and ring estimates, RR selection.
/// k̂ is reported as a radius level, so interior and border pixels share the
/// scale 0..K.
DenoiseResult denoise_image(const Image& image, const DenoiseConfig& config);

}  // namespace adaptm
