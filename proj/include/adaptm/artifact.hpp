#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adaptm/calibration.hpp"
#include "adaptm/levels.hpp"
#include "adaptm/loss.hpp"
#include "adaptm/noise.hpp"
#include "adaptm/selector.hpp"

namespace adaptm {

/// Window geometry a calibration was computed for.
struct Geometry {
    enum class Shape { Line, Disc };
    Shape shape = Shape::Line;
    // Line: equidistant design of design_n points on [-1, 1], windows around `center`.
    std::size_t design_n = 0;
    double center = 0.0;
    std::vector<std::size_t> counts;
    // Disc: radii of the unclipped interior stencil.
    std::vector<double> radii;

    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// One calibrated rule: settings, levels and critical values.
struct CalibSection {
    SelectionRule rule = SelectionRule::RingRR;
    LossKind loss = LossKind::median();
    NoiseKind noise = NoiseKind::laplace();
    CalibMode mode = CalibMode::Zeta;
    double r = 2.0;
    double alpha = 1.0;
    std::size_t runs = 0;
    std::uint64_t seed = 0;
    Geometry geometry;
    Levels levels;
    std::optional<TriangularTable> pair_levels;  // Lepski only
    CalibResult result;

    /// Name of the section, e.g. "median-rr".
    std::string key() const;
    /// FNV-1a of the canonical settings text (everything except results).
    std::uint64_t config_hash() const;
    /// Levels the rule's tests use (s_ring or pair_levels).
    const TriangularTable& test_levels() const;
};

struct CalibBundle {
    std::vector<CalibSection> sections;

    /// Section for (loss, rule); nullptr when absent.
    const CalibSection* find(const LossKind& loss, SelectionRule rule) const;
    /// As find(), but throws InputError naming the missing section.
    const CalibSection& require(const LossKind& loss, SelectionRule rule) const;
};

/// Byte-deterministic text form: "key: value" lines inside [section] blocks.
void write_bundle(std::ostream& out, const CalibBundle& bundle);
std::string bundle_to_string(const CalibBundle& bundle);
/// Throws InputError on malformed input or a config hash mismatch.
CalibBundle read_bundle(std::istream& in);
CalibBundle parse_bundle(const std::string& text);

void save_bundle(const std::string& path, const CalibBundle& bundle);
CalibBundle load_bundle(const std::string& path);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace adaptm
