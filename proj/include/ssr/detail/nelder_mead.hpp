#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ssr::detail {

struct NmResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free simplex descent (Nelder-Mead) with standard coefficients.
// Stops when the simplex diameter drops below `diam_tol` or after `max_iter`
// iterations. Deterministic for a given start.
template <typename F>
NmResult nelder_mead(F&& f, const std::vector<double>& x0, double step, int max_iter,
                     double diam_tol) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    NmResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double diam = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = i + 1; j <= n; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    const double d = pts[i][c] - pts[j][c];
                    d2 += d * d;
                }
                diam = std::max(diam, d2);
            }
        if (std::sqrt(diam) < diam_tol) {
            res.converged = true;
            res.iterations = iter;
            res.x = pts[best];
            res.fx = fv[best];
            return res;
        }

        for (std::size_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                if (i != worst) s += pts[i][c];
            centroid[c] = s / static_cast<double>(n);
        }

        for (std::size_t c = 0; c < n; ++c) xr[c] = centroid[c] + (centroid[c] - pts[worst][c]);
        const double fr = f(xr);
        if (fr < fv[order[0]]) {
            for (std::size_t c = 0; c < n; ++c) xe[c] = centroid[c] + 2.0 * (centroid[c] - pts[worst][c]);
            const double fe = f(xe);
            if (fe < fr) {
                pts[worst] = xe;
                fv[worst] = fe;
            } else {
                pts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            pts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            if (outside)
                for (std::size_t c = 0; c < n; ++c)
                    xc[c] = centroid[c] + 0.5 * (xr[c] - centroid[c]);
            else
                for (std::size_t c = 0; c < n; ++c)
                    xc[c] = centroid[c] + 0.5 * (pts[worst][c] - centroid[c]);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[worst])) {
                pts[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t c = 0; c < n; ++c)
                        pts[i][c] = pts[best][c] + 0.5 * (pts[i][c] - pts[best][c]);
                    fv[i] = f(pts[i]);
                }
            }
        }
        res.iterations = iter + 1;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pts[best];
    res.fx = fv[best];
    res.converged = false;
    return res;
}

}  // namespace ssr::detail
