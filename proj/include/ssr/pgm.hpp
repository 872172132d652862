#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssr/core_model.hpp"

namespace ssr {

struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<std::uint16_t> pixels;   // row-major
};

// Binary (P5) PGM, 8-bit or 16-bit big-endian raster.
PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& image);

// Square grayscale image as a count histogram (pixel values are the counts).
ImageHistogram histogram_from_pgm(const PgmImage& image);

// Linear rescale of a nonnegative grid onto [0, maxval]; the factor applied
// is maxval / max(values) (0 stays 0) and is returned through `scale_out`
// so callers can record it.
PgmImage grid_to_pgm(const DensityGrid& grid, int maxval, double* scale_out = nullptr);

PgmImage mask_to_pgm(const std::vector<std::uint8_t>& mask, int side);

}  // namespace ssr
