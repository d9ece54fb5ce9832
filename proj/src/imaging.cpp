#include "adaptm/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "adaptm/calibration.hpp"
#include "adaptm/errors.hpp"
#include "adaptm/estimates.hpp"
#include "adaptm/parallel.hpp"

namespace adaptm {

std::vector<double> default_radii() { return geometric_radii(1.5, std::sqrt(1.4), 13); }

Geometry disc_geometry(std::vector<double> radii) {
    Geometry g;
    g.shape = Geometry::Shape::Disc;
    g.radii = std::move(radii);
    return g;
}

NoiseScaleEstimate estimate_noise_scale(const Image& image, const NoiseKind& kind) {
    if (image.width < 2 || image.height < 2) throw PreconditionError("noise scale needs an image of at least 2x2");
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(image.width - 1) * image.height);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x + 1 < image.width; ++x) diffs.push_back(std::abs(image.at(x + 1, y) - image.at(x, y)));
    }
    const double med = locate(diffs, LossKind::median()).value;
    NoiseScaleEstimate out;
    if (med == 0.0) {
        out.degenerate = true;
        return out;
    }
    out.sigma = med / median_abs_difference(kind.with_scale(1.0));
    return out;
}

Image KhatMap::as_image() const {
    Image img(width, height);
    for (std::size_t i = 0; i < k.size(); ++i) img.data[i] = k[i];
    return img;
}

void check_denoise_artifact(const CalibSection& calib) {
    if (calib.geometry.shape != Geometry::Shape::Disc) {
        throw InputError("denoising needs a calibration computed on a disc geometry");
    }
    if (calib.rule != SelectionRule::RingRR) throw InputError("denoising needs an rr calibration section");
    if (calib.mode != CalibMode::Zeta || !calib.result.z.zeta) {
        throw InputError("denoising needs a zeta-mode calibration (z is recomputed for clipped windows)");
    }
    const bool closed_form = calib.loss.is_order_statistic() ||
                             (calib.loss.kind() == LossKind::Kind::Mean && calib.r == 2.0);
    if (!closed_form) {
        throw InputError("denoising supports median, quantile and (r = 2) mean losses");
    }
}

namespace {

struct Geometry2d {
    Levels scaled;
    CriticalValues z;
    std::vector<std::uint16_t> radius_level;  // family level -> radius level
};

std::vector<std::size_t> distinct_counts(const std::vector<std::size_t>& raw) {
    std::vector<std::size_t> out;
    for (std::size_t c : raw) {
        if (out.empty() || c > out.back()) out.push_back(c);
    }
    return out;
}

}  // namespace

DenoiseResult denoise_image(const Image& image, const DenoiseConfig& config) {
    const CalibSection& calib = config.calib;
    check_denoise_artifact(calib);
    if (image.width <= 0 || image.height <= 0 || image.size() != static_cast<std::size_t>(image.width) * image.height) {
        throw PreconditionError("image dimensions do not match its data");
    }
    for (double v : image.data) {
        if (!std::isfinite(v)) throw InputError("image holds a non-finite intensity");
    }

    DenoiseResult result;
    if (config.noise_scale) {
        if (!(*config.noise_scale >= 0.0) || !std::isfinite(*config.noise_scale)) {
            throw PreconditionError("noise scale must be finite and non-negative");
        }
        result.sigma = *config.noise_scale;
    } else {
        const auto est = estimate_noise_scale(image, calib.noise);
        result.sigma = est.sigma;
        result.sigma_degenerate = est.degenerate;
    }

    const DiscStencil stencil(calib.geometry.radii);
    const NoiseKind unit = calib.noise.with_scale(1.0);
    const double zeta = *calib.result.z.zeta;
    const std::size_t npx = image.size();

    // Levels and z per distinct clipped shape, before the parallel phase.
    std::map<std::vector<std::size_t>, Geometry2d> cache;
    std::vector<const Geometry2d*> shape_of(npx, nullptr);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            auto raw = stencil.raw_counts_at(image.width, image.height, {x, y});
            auto it = cache.find(raw);
            if (it == cache.end()) {
                Geometry2d g;
                const auto counts = distinct_counts(raw);
                for (std::size_t c : counts) {
                    const auto last = std::find(raw.rbegin(), raw.rend(), c);
                    g.radius_level.push_back(static_cast<std::uint16_t>(raw.rend() - last - 1));
                }
                if (counts.size() > 1) {
                    std::vector<std::size_t> order(counts.back());
                    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
                    const WindowFamily fam(std::move(order), counts, 1.0 + 1e-12, 1e9);
                    const Levels unit_levels = standard_levels(fam, calib.loss, unit, calib.r, calib.runs, calib.seed);
                    g.z = critical_values_from_zeta(zeta, unit_levels, calib.alpha);
                    g.scaled = unit_levels.scaled(result.sigma);
                }
                it = cache.emplace(std::move(raw), std::move(g)).first;
            }
            shape_of[pixel_index(image.width, {x, y})] = &it->second;
        }
    }
    result.geometries = cache.size();

    result.image = Image(image.width, image.height);
    result.khat.width = image.width;
    result.khat.height = image.height;
    result.khat.K = calib.geometry.radii.size() - 1;
    result.khat.k.assign(npx, 0);

    parallel_chunks(static_cast<std::size_t>(image.height), config.workers, [&](std::size_t y0, std::size_t y1) {
        std::vector<double> ordered, scratch;
        Estimates est;
        for (int y = static_cast<int>(y0); y < static_cast<int>(y1); ++y) {
            for (int x = 0; x < image.width; ++x) {
                const std::size_t idx = pixel_index(image.width, {x, y});
                const Geometry2d& g = *shape_of[idx];
                const WindowFamily fam = stencil.family_at(image.width, image.height, {x, y});
                const auto order = fam.order();
                ordered.resize(order.size());
                scratch.resize(order.size());
                for (std::size_t i = 0; i < order.size(); ++i) ordered[i] = image.data[order[i]];
                estimates_in_window_order(ordered, fam.counts(), calib.loss, scratch, est);
                std::size_t k_hat = 0;
                double value = est.base[0];
                if (fam.K() > 0) {
                    const SelectionTrace trace = select_rr(est, g.scaled, g.z, config.thresholds);
                    k_hat = trace.k_hat;
                    value = trace.theta_hat;
                }
                result.image.data[idx] = value;
                result.khat.k[idx] = g.radius_level[k_hat];
            }
        }
    });
    return result;
}

}  // namespace adaptm
