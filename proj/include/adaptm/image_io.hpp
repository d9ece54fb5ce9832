#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace adaptm {

/// Row-major grid of finite intensities.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0);

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const Image&, const Image&) = default;
};

struct PgmImage {
    Image image;
    int maxval = 255;
};

/// Binary PGM (P5), 8-bit (maxval < 256) or 16-bit big-endian samples.
PgmImage read_pgm(std::istream& in);
PgmImage read_pgm(const std::string& path);
/// Values are rounded and clamped to [0, maxval].
void write_pgm(std::ostream& out, const Image& image, int maxval);
void write_pgm(const std::string& path, const Image& image, int maxval);

/// "RGRID <w> <h> float64\n" followed by w*h little-endian doubles.
Image read_grid(std::istream& in);
Image read_grid(const std::string& path);
void write_grid(std::ostream& out, const Image& image);
void write_grid(const std::string& path, const Image& image);

/// Reads PGM or RGRID by magic; maxval is 0 for grids.
PgmImage read_image(const std::string& path);

}  // namespace adaptm
