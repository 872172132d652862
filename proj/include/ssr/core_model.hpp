#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace ssr {

// Square grayscale image interpreted as a bivariate count histogram:
// counts(i, j) >= 0 with (i, j) = (row, column), row-major storage.
struct ImageHistogram {
    int side = 0;                 // M, pixels per axis
    std::vector<double> counts;   // side*side values Y(s_i)
    double total = 0.0;           // T = sum of counts

    double at(int i, int j) const { return counts[static_cast<std::size_t>(i) * side + j]; }
    int pixel_count() const { return side * side; }  // D = M^2
};

// Builds a histogram from raw values, clamping negatives to zero.
// Throws std::invalid_argument on empty/zero-mass input.
ImageHistogram make_histogram(int side, std::vector<double> counts);

// Nonnegative raster with unit cell width 1/M; represents a density when
// sum(values)/M^2 == 1.
struct DensityGrid {
    int side = 0;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * side + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * side + j]; }
    double cell_width() const { return 1.0 / side; }
};

DensityGrid make_density_grid(int side, std::vector<double> values);
DensityGrid zeros_like(int side);

// Point on the torus T^2, stored as the pair of angles in [0, 2*pi).
struct TorusPoint {
    double z_angle = 0.0;
    double w_angle = 0.0;
};

// Per-pixel empirical density: value_i = (D/T) * Y(s_i). Integrates to one
// under the cell measure 1/D.
DensityGrid empirical_density(const ImageHistogram& h);

// Maps pixel (i, j) of an M x M grid to the arc-center root of unity pair,
// angle pi*(2i+1)/M per coordinate. Throws std::out_of_range on bad indices.
TorusPoint pixel_to_torus(int i, int j, int side);

// Wraps an angular difference into (-pi, pi). A difference of exactly pi is
// mapped just inside the negative end; the boundary has measure zero and the
// tie-break only needs to be deterministic.
double wrap_angle(double delta);

// Componentwise signed angular difference T(w * w0^{-1}).
std::array<double, 2> template_statistic(const TorusPoint& w, const TorusPoint& w0);

// Group metric || w1 * conj(w2) || on T^2.
double torus_distance(const TorusPoint& a, const TorusPoint& b);

}  // namespace ssr
