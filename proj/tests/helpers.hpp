#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ssr/core_model.hpp"
#include "ssr/ltm.hpp"
#include "ssr/rng.hpp"

namespace ssr_test {

// Multinomial draw by inverse CDF, one uniform per sample.
inline std::vector<double> draw_multinomial(ssr::Rng& rng, const std::vector<double>& weights,
                                            long long total) {
    std::vector<double> counts(weights.size(), 0.0);
    std::vector<double> cdf(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cdf[i] = acc;
    }
    for (long long d = 0; d < total; ++d) {
        const double u = rng.uniform() * acc;
        const std::size_t idx =
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        counts[std::min(idx, weights.size() - 1)] += 1.0;
    }
    return counts;
}

// Cell weights proportional to the template density exp(b'T + eta|b'T|); the
// support function enters the model as rho * f, so samples of f carry no rho.
inline std::vector<double> ltm_cell_weights(const ssr::Window& proto,
                                            const ssr::LtmParams& params) {
    std::vector<double> w(proto.tstats.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double lin = params.beta[0] * proto.tstats[i][0] +
                           params.beta[1] * proto.tstats[i][1];
        w[i] = std::exp(lin + params.eta * std::abs(lin));
    }
    return w;
}

inline double ks_distance_uniform(std::vector<double> sorted_values) {
    std::sort(sorted_values.begin(), sorted_values.end());
    const double n = static_cast<double>(sorted_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_values.size(); ++i) {
        d = std::max(d, std::abs((i + 1) / n - sorted_values[i]));
        d = std::max(d, std::abs(i / n - sorted_values[i]));
    }
    return d;
}

// Two constant regions split at `split_col`, ratio `contrast`:1, normalized
// to a density.
inline ssr::DensityGrid step_density(int side, int split_col, double contrast) {
    ssr::DensityGrid g = ssr::zeros_like(side);
    double mass = 0.0;
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            g.at(i, j) = j < split_col ? contrast : 1.0;
            mass += g.at(i, j);
        }
    const double scale = static_cast<double>(side) * side / mass;
    for (double& v : g.values) v *= scale;   // integrates to 1 under 1/M^2
    return g;
}

}  // namespace ssr_test
