#include "adaptm/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "adaptm/errors.hpp"

namespace adaptm {

Image::Image(int w, int h, double fill) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw PreconditionError("image dimensions must be positive");
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int header_int(std::istream& in, const char* what) {
    const std::string tok = header_token(in);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
        throw InputError(std::string("PGM: bad ") + what + " '" + tok + "'");
    }
    return std::stoi(tok);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

void check_finite(const Image& image) {
    for (double v : image.data) {
        if (!std::isfinite(v)) throw InputError("image holds a non-finite intensity");
    }
}

}  // namespace

PgmImage read_pgm(std::istream& in) {
    if (header_token(in) != "P5") throw InputError("PGM: only binary P5 files are supported");
    const int w = header_int(in, "width");
    const int h = header_int(in, "height");
    const int maxval = header_int(in, "maxval");
    if (w <= 0 || h <= 0) throw InputError("PGM: empty image");
    if (maxval < 1 || maxval > 65535) throw InputError("PGM: maxval must lie in [1, 65535]");
    PgmImage out{Image(w, h), maxval};
    const std::size_t n = out.image.size();
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw InputError("PGM: truncated pixel data");
    for (std::size_t i = 0; i < n; ++i) {
        const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
        if (v > maxval) throw InputError("PGM: sample exceeds maxval");
        out.image.data[i] = v;
    }
    return out;
}

PgmImage read_pgm(const std::string& path) {
    auto in = open_in(path);
    return read_pgm(in);
}

void write_pgm(std::ostream& out, const Image& image, int maxval) {
    if (maxval < 1 || maxval > 65535) throw PreconditionError("PGM maxval must lie in [1, 65535]");
    check_finite(image);
    out << "P5\n" << image.width << ' ' << image.height << '\n' << maxval << '\n';
    const bool wide = maxval >= 256;
    std::vector<unsigned char> raw(image.size() * (wide ? 2 : 1));
    for (std::size_t i = 0; i < image.size(); ++i) {
        const int v = static_cast<int>(std::clamp(std::lround(image.data[i]), 0L, static_cast<long>(maxval)));
        if (wide) {
            raw[2 * i] = static_cast<unsigned char>(v >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        } else {
            raw[i] = static_cast<unsigned char>(v);
        }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_pgm(const std::string& path, const Image& image, int maxval) {
    auto out = open_out(path);
    write_pgm(out, image, maxval);
    if (!out) throw IoError("write failed for '" + path + "'");
}

Image read_grid(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("RGRID: missing header");
    char magic[8] = {};
    char type[16] = {};
    int w = 0, h = 0;
    if (std::sscanf(line.c_str(), "%7s %d %d %15s", magic, &w, &h, type) != 4 || std::strcmp(magic, "RGRID") != 0 ||
        std::strcmp(type, "float64") != 0) {
        throw InputError("RGRID: bad header '" + line + "'");
    }
    if (w <= 0 || h <= 0) throw InputError("RGRID: empty grid");
    Image img(w, h);
    std::vector<unsigned char> raw(img.size() * 8);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw InputError("RGRID: truncated data");
    for (std::size_t i = 0; i < img.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | raw[8 * i + b];
        img.data[i] = std::bit_cast<double>(bits);
    }
    check_finite(img);
    return img;
}

Image read_grid(const std::string& path) {
    auto in = open_in(path);
    return read_grid(in);
}

void write_grid(std::ostream& out, const Image& image) {
    check_finite(image);
    out << "RGRID " << image.width << ' ' << image.height << " float64\n";
    std::vector<unsigned char> raw(image.size() * 8);
    for (std::size_t i = 0; i < image.size(); ++i) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(image.data[i]);
        for (int b = 0; b < 8; ++b, bits >>= 8) raw[8 * i + b] = static_cast<unsigned char>(bits & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

void write_grid(const std::string& path, const Image& image) {
    auto out = open_out(path);
    write_grid(out, image);
    if (!out) throw IoError("write failed for '" + path + "'");
}

PgmImage read_image(const std::string& path) {
    auto in = open_in(path);
    char magic[2] = {};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(in);
    if (magic[0] == 'R' && magic[1] == 'G') return {read_grid(in), 0};
    throw InputError("'" + path + "' is neither a P5 PGM nor an RGRID file");
}

}  // namespace adaptm
