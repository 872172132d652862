#include "ssr/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) continue;
        tok.push_back(static_cast<char>(ch));
        while ((ch = in.get()) != EOF && !std::isspace(ch)) tok.push_back(static_cast<char>(ch));
        break;
    }
    return tok;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    if (next_token(in) != "P5") throw io_error(path + ": only binary (P5) PGM is supported");
    PgmImage img;
    try {
        img.width = std::stoi(next_token(in));
        img.height = std::stoi(next_token(in));
        img.maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw io_error(path + ": malformed PGM header");
    }
    if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535)
        throw io_error(path + ": bad PGM dimensions or maxval");

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(n);
    if (img.maxval <= 255) {
        std::vector<unsigned char> raw(n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) throw io_error(path + ": truncated raster");
        for (std::size_t i = 0; i < n; ++i) img.pixels[i] = raw[i];
    } else {
        std::vector<unsigned char> raw(2 * n);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(2 * n));
        if (static_cast<std::size_t>(in.gcount()) != 2 * n)
            throw io_error(path + ": truncated raster");
        for (std::size_t i = 0; i < n; ++i)
            img.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return img;
}

void write_pgm(const std::string& path, const PgmImage& image) {
    if (image.width <= 0 || image.height <= 0 || image.maxval <= 0 || image.maxval > 65535)
        throw io_error("bad PGM dimensions or maxval");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write " + path);
    out << "P5\n" << image.width << " " << image.height << "\n" << image.maxval << "\n";
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
    if (image.maxval <= 255) {
        std::vector<unsigned char> raw(n);
        for (std::size_t i = 0; i < n; ++i)
            raw[i] = static_cast<unsigned char>(std::min<int>(image.pixels[i], image.maxval));
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(n));
    } else {
        std::vector<unsigned char> raw(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint16_t v =
                static_cast<std::uint16_t>(std::min<int>(image.pixels[i], image.maxval));
            raw[2 * i] = static_cast<unsigned char>(v >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(2 * n));
    }
    if (!out) throw io_error("failed writing " + path);
}

ImageHistogram histogram_from_pgm(const PgmImage& image) {
    if (image.width != image.height)
        throw io_error("image must be square (got " + std::to_string(image.width) + "x" +
                       std::to_string(image.height) + ")");
    std::vector<double> counts(image.pixels.begin(), image.pixels.end());
    return make_histogram(image.width, std::move(counts));
}

PgmImage grid_to_pgm(const DensityGrid& grid, int maxval, double* scale_out) {
    double peak = 0.0;
    for (double v : grid.values) peak = std::max(peak, v);
    const double scale = peak > 0.0 ? maxval / peak : 0.0;
    if (scale_out) *scale_out = scale;
    PgmImage img;
    img.width = img.height = grid.side;
    img.maxval = maxval;
    img.pixels.resize(grid.values.size());
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const double v = std::max(grid.values[i], 0.0) * scale;
        img.pixels[i] = static_cast<std::uint16_t>(std::lround(std::min<double>(v, maxval)));
    }
    return img;
}

PgmImage mask_to_pgm(const std::vector<std::uint8_t>& mask, int side) {
    PgmImage img;
    img.width = img.height = side;
    img.maxval = 255;
    img.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) img.pixels[i] = mask[i] ? 255 : 0;
    return img;
}

}  // namespace ssr
