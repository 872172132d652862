#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ssr/core_model.hpp"
#include "ssr/ltm.hpp"
#include "ssr/partition.hpp"

namespace ssr {

// One LRT p-value and free fit per window placement. Centers follow the
// stride lattice (t, t), (t, t+s), ... up to side - t - 2 per axis; the last
// t + 1 rows/columns stay unscanned, matching the reference sweep.
struct ScanResult {
    std::vector<std::array<int, 2>> centers;
    std::vector<double> pvalues;
    std::vector<LtmFit> fits;                 // eta-free fits, aligned with centers
    std::vector<std::uint8_t> degenerate;     // windows with zero weighted mass
    int stride = 0;
    int window_half_width = 0;
    int image_side = 0;
};

// Slides the template across the histogram. Degenerate windows (no counts
// under the support) record p = 1 and a flag instead of failing, so the lists
// stay aligned with the lattice. Placements are evaluated in parallel; the
// result is deterministic.
ScanResult scan(const ImageHistogram& h, int half_width, int stride,
                const SupportFunction& rho);

// Holm step-down multiple testing. Sorts the p-values, rejects while
// p_(k) <= alpha / (n - k + 1), stops at the first failure; flags are
// returned in input order. alpha outside (0, 1) rejects nothing.
std::vector<std::uint8_t> holm_adjust(const std::vector<double>& pvalues, double alpha);

struct EdgeSet {
    std::vector<std::array<int, 2>> rejected_centers;
    double alpha = 0.0;
    int side = 0;
    std::vector<std::uint8_t> edge_mask;   // side*side, row-major

    bool at(int i, int j) const { return edge_mask[static_cast<std::size_t>(i) * side + j] != 0; }
};

// Renders edge lines: for each rejected center, window pixels lying within
// half a pixel of the zero set of beta'T are marked, then filtered by
// edge_field > threshold. The outer one-pixel image frame is always marked.
// A rejected center with a vanishing beta marks only the center pixel.
EdgeSet render_edge_lines(const ScanResult& sc, const std::vector<std::uint8_t>& rejects,
                          const DensityGrid& edge_field, double threshold, double alpha);

}  // namespace ssr
