#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ssr/core_model.hpp"

namespace ssr {

// Center-peaked nonnegative weight grid over an odd-sized window. Values are
// zero on the outermost frame, so embeddings vanish outside their window.
struct SupportFunction {
    int window_size = 0;          // m = 2t + 1
    std::vector<double> values;   // m*m, row-major
    double tau = 0.0;

    int half_width() const { return (window_size - 1) / 2; }
    // Value at offset (di, dj) from the window center; zero outside.
    double at_offset(int di, int dj) const {
        const int t = half_width();
        if (di < -t || di > t || dj < -t || dj > t) return 0.0;
        return values[static_cast<std::size_t>(di + t) * window_size + (dj + t)];
    }
    double peak() const { return at_offset(0, 0); }
};

// Trapezoid height of the first convolution factor at 1-based (n1, n2) on the
// (t+1) x (t+1) window: zero outside {2..t}^2, 0.5 on that block's frame, 1 inside.
double trapezoid_weight(int n1, int n2, int half_width);

// Tangent-taper height of the second factor at 1-based (n1, n2): a product of
// exp(-tan^2(pi*(n - c)/(2*tau))) terms centered at c = (t+2)/2, zero outside
// the (t+1) x (t+1) window.
double taper_weight(int n1, int n2, int half_width, double tau);

// Convolves the two factors into the (2t+1) x (2t+1) support grid and shifts
// it so the peak sits on the window center. The raw convolution of two blocks
// centered at (t+2)/2 peaks one cell past the middle; the shift restores the
// center-peak and zero-frame invariants without changing any value.
SupportFunction build_support_sized(int half_width, double tau);

// The 11x11 support used throughout (half width 5, the 6x6 factor windows).
SupportFunction build_support(double tau);

// A support function pinned at an image pixel.
struct PlacedSupport {
    std::array<int, 2> center;    // (i, j)
    SupportFunction fn;
};

// Value of a placed support at image pixel (i, j); zero outside its window.
double placed_support_value(const PlacedSupport& p, int i, int j);

struct LpSolution {
    std::vector<double> alphas;   // one per placement, >= 0
    double t_star = 0.0;          // achieved max-min coverage at centers
};

// Maximizes t subject to t <= sum_i alpha_i rho_i(center_j) <= 1 for every
// center j and alpha >= 0, by scanning t over {0, step, 2*step, ..., 1} and
// deciding feasibility with a phase-one simplex. Placements with disjoint
// supports decouple and are solved per connected component. Exact duplicate
// placements are merged (the first occurrence carries the weight).
LpSolution solve_partition_lp(const std::vector<PlacedSupport>& placements,
                              double t_grid_step = 0.005);

struct Partition {
    std::vector<double> alphas;
    double t_star = 0.0;
    bool degenerate = false;      // t_star == 0: supports conflict at some center
    DensityGrid edge_field;       // P_e
    DensityGrid smooth_field;     // P_s = 1 - P_e
};

// Accumulates P_e = sum_i alpha_i rho_i over the image (positions outside the
// image are dropped) and sets P_s = 1 - P_e. Excess above 1 by more than 1e-9
// signals an upstream constraint violation and throws; smaller excess is clipped.
Partition assemble_fields(const LpSolution& lp, const std::vector<PlacedSupport>& placements,
                          int side);

}  // namespace ssr
