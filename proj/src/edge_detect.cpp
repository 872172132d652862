#include "ssr/edge_detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ssr/parallel.hpp"

namespace ssr {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ScanResult scan(const ImageHistogram& h, int half_width, int stride,
                const SupportFunction& rho) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (half_width < 1) throw std::invalid_argument("half width must be >= 1");
    if (h.side <= 2 * half_width + 1)
        throw std::invalid_argument("image smaller than the scan window");
    if (rho.half_width() != half_width)
        throw std::invalid_argument("support size does not match half width");

    ScanResult res;
    res.stride = stride;
    res.window_half_width = half_width;
    res.image_side = h.side;
    const int lo = half_width;
    const int hi = h.side - half_width - 2;  // last t+1 rows/cols stay unscanned
    for (int i = lo; i <= hi; i += stride)
        for (int j = lo; j <= hi; j += stride) res.centers.push_back({i, j});

    const std::size_t n = res.centers.size();
    res.pvalues.assign(n, 1.0);
    res.fits.assign(n, LtmFit{});
    res.degenerate.assign(n, 0);

    parallel_for(n, [&](std::size_t idx) {
        Window w = window_from_histogram(h, res.centers[idx], half_width, rho);
        if (w.weighted_mass <= 0.0) {
            res.degenerate[idx] = 1;
            res.pvalues[idx] = 1.0;
            return;
        }
        const LtmFit free_fit = fit_mle(w, true);
        const LtmFit pinned_fit = fit_mle(w, false);
        const double stat = lrt_statistic(free_fit, pinned_fit, effective_sample_size(w));
        res.fits[idx] = free_fit;
        res.pvalues[idx] = stat <= 0.0 ? 1.0 : std::clamp(chi1_survival(stat), 0.0, 1.0);
    });
    return res;
}

std::vector<std::uint8_t> holm_adjust(const std::vector<double>& pvalues, double alpha) {
    const std::size_t n = pvalues.size();
    std::vector<std::uint8_t> reject(n, 0);
    if (n == 0 || alpha <= 0.0 || alpha >= 1.0) return reject;
    for (double p : pvalues)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
    for (std::size_t k = 0; k < n; ++k) {
        if (pvalues[order[k]] > alpha / static_cast<double>(n - k)) break;
        reject[order[k]] = 1;
    }
    return reject;
}

EdgeSet render_edge_lines(const ScanResult& sc, const std::vector<std::uint8_t>& rejects,
                          const DensityGrid& edge_field, double threshold, double alpha) {
    if (rejects.size() != sc.centers.size())
        throw std::invalid_argument("reject flags do not match scan placements");
    if (edge_field.side != sc.image_side)
        throw std::invalid_argument("edge field does not match the scanned image");

    const int side = sc.image_side;
    EdgeSet es;
    es.alpha = alpha;
    es.side = side;
    es.edge_mask.assign(static_cast<std::size_t>(side) * side, 0);
    const auto mark = [&](int i, int j) {
        es.edge_mask[static_cast<std::size_t>(i) * side + j] = 1;
    };

    const int t = sc.window_half_width;
    const double pitch = 2.0 * kPi / side;  // per-pixel angular step
    for (std::size_t idx = 0; idx < rejects.size(); ++idx) {
        if (!rejects[idx]) continue;
        const auto& c = sc.centers[idx];
        es.rejected_centers.push_back(c);
        const auto& beta = sc.fits[idx].params.beta;
        const double norm1 = std::abs(beta[0]) + std::abs(beta[1]);
        if (std::hypot(beta[0], beta[1]) < 1e-6) {
            if (edge_field.at(c[0], c[1]) > threshold) mark(c[0], c[1]);
            continue;
        }
        // Zero set of beta'T rasterized at half a pixel's angular width.
        const double bound = 0.5 * norm1 * pitch * 0.5;
        for (int di = -t; di <= t; ++di) {
            const int i = c[0] + di;
            if (i < 0 || i >= side) continue;
            for (int dj = -t; dj <= t; ++dj) {
                const int j = c[1] + dj;
                if (j < 0 || j >= side) continue;
                const double val = beta[0] * wrap_angle(pitch * di) + beta[1] * wrap_angle(pitch * dj);
                if (std::abs(val) <= bound && edge_field.at(i, j) > threshold) mark(i, j);
            }
        }
    }

    // The image frame counts as edge unconditionally.
    for (int i = 0; i < side; ++i) {
        mark(0, i);
        mark(side - 1, i);
        mark(i, 0);
        mark(i, side - 1);
    }
    return es;
}

}  // namespace ssr
