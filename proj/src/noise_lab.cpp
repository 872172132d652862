#include "ssr/noise_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ssr/errors.hpp"
#include "ssr/parallel.hpp"
#include "ssr/rng.hpp"

#include "json.hpp"

namespace ssr {

namespace {

// Inverse-CDF draw from one row of a table of per-state cumulative sums.
int draw_from_cdf(const std::vector<double>& cdf, int offset, int n, double u) {
    const double target = u * cdf[offset + n - 1];
    int lo = 0, hi = n - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (cdf[offset + mid] <= target)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

ImageHistogram gibbs_sample(const DensityGrid& truth, const GibbsConfig& cfg) {
    const int side = truth.side;
    if (cfg.sample_size_multiplier <= 0)
        throw std::invalid_argument("sample size multiplier must be positive");
    if (cfg.burn_in < 0 || cfg.thinning < 1)
        throw std::invalid_argument("bad burn-in or thinning");
    double mass = 0.0;
    for (double v : truth.values) {
        if (!(v >= 0.0)) throw std::invalid_argument("truth must be nonnegative");
        mass += v;
    }
    if (mass <= 0.0) throw std::invalid_argument("truth has zero mass");

    // Conditional CDFs: row-wise (column given row) and column-wise (row
    // given column).
    std::vector<double> row_cdf(static_cast<std::size_t>(side) * side);
    std::vector<double> col_cdf(static_cast<std::size_t>(side) * side);
    std::vector<double> row_mass(side, 0.0);
    for (int i = 0; i < side; ++i) {
        double acc = 0.0;
        for (int j = 0; j < side; ++j) {
            acc += truth.at(i, j);
            row_cdf[static_cast<std::size_t>(i) * side + j] = acc;
        }
        row_mass[i] = acc;
    }
    for (int j = 0; j < side; ++j) {
        double acc = 0.0;
        for (int i = 0; i < side; ++i) {
            acc += truth.at(i, j);
            col_cdf[static_cast<std::size_t>(j) * side + i] = acc;
        }
    }

    Rng rng(cfg.seed);

    // Start from the marginal so the chain begins inside the support.
    std::vector<double> row_marginal_cdf(side);
    double acc = 0.0;
    for (int i = 0; i < side; ++i) {
        acc += row_mass[i];
        row_marginal_cdf[i] = acc;
    }
    int r = draw_from_cdf(row_marginal_cdf, 0, side, rng.uniform());
    int c = draw_from_cdf(row_cdf, r * side, side, rng.uniform());

    const long long total = static_cast<long long>(cfg.sample_size_multiplier) * side * side;
    std::vector<double> counts(static_cast<std::size_t>(side) * side, 0.0);
    const auto step = [&] {
        r = draw_from_cdf(col_cdf, c * side, side, rng.uniform());
        c = draw_from_cdf(row_cdf, r * side, side, rng.uniform());
    };
    for (int b = 0; b < cfg.burn_in; ++b) step();
    for (long long n = 0; n < total; ++n) {
        for (int t = 0; t < cfg.thinning; ++t) step();
        counts[static_cast<std::size_t>(r) * side + c] += 1.0;
    }
    return make_histogram(side, std::move(counts));
}

double dmse(const DensityGrid& truth, const std::vector<DensityGrid>& replicate_estimates) {
    if (replicate_estimates.empty())
        throw std::invalid_argument("dmse needs at least one replicate");
    const int side = truth.side;
    const double cell = 1.0 / (static_cast<double>(side) * side);
    double acc = 0.0;
    for (const auto& est : replicate_estimates) {
        if (est.side != side) throw std::invalid_argument("replicate size mismatch");
        double sum = 0.0;
        for (std::size_t i = 0; i < truth.values.size(); ++i) {
            const double d = (est.values[i] - truth.values[i]) * cell;
            sum += d * d;
        }
        acc += sum;
    }
    const double h1 = 1.0 / side;
    return acc / (h1 * replicate_estimates.size());
}

double within_sample_variance(const std::vector<DensityGrid>& replicate_estimates) {
    const std::size_t n = replicate_estimates.size();
    if (n < 2) throw std::invalid_argument("within-sample variance needs >= 2 replicates");
    const int side = replicate_estimates.front().side;
    const double cell = 1.0 / (static_cast<double>(side) * side);
    for (const auto& est : replicate_estimates)
        if (est.side != side) throw std::invalid_argument("replicate size mismatch");

    double acc = 0.0;
    const std::size_t cells = replicate_estimates.front().values.size();
    for (std::size_t i = 0; i < cells; ++i) {
        double mean = 0.0;
        for (const auto& est : replicate_estimates) mean += est.values[i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& est : replicate_estimates) {
            const double d = (est.values[i] - mean) * cell;
            var += d * d;
        }
        acc += var / static_cast<double>(n);
    }
    const double h1 = 1.0 / side;
    return acc / h1;
}

ExperimentReport run_experiment(const DensityGrid& truth, const std::vector<int>& multipliers,
                                int replicates, const RestorePipeline& pipeline,
                                const GibbsConfig& cfg) {
    if (multipliers.empty()) throw std::invalid_argument("need at least one multiplier");
    if (replicates < 1) throw std::invalid_argument("need at least one replicate");

    ExperimentReport report;
    report.multipliers = multipliers;
    report.replicates = replicates;
    report.variance_available = replicates >= 2;

    for (std::size_t mi = 0; mi < multipliers.size(); ++mi) {
        const int m = multipliers[mi];
        std::vector<DensityGrid> estimates(replicates);
        std::vector<std::string> failures(replicates);
        parallel_for(static_cast<std::size_t>(replicates), [&](std::size_t rep) {
            GibbsConfig local = cfg;
            local.sample_size_multiplier = m;
            local.seed = derive_seed(cfg.seed, mi * static_cast<std::size_t>(replicates) + rep);
            try {
                const ImageHistogram noisy = gibbs_sample(truth, local);
                estimates[rep] = pipeline(noisy);
            } catch (const std::exception& e) {
                failures[rep] = e.what();
            }
        });
        for (int rep = 0; rep < replicates; ++rep)
            if (!failures[rep].empty())
                throw numeric_error("experiment failed at multiplier " + std::to_string(m) +
                                    ", replicate " + std::to_string(rep) + ": " + failures[rep]);

        report.dmse_by_m.push_back(dmse(truth, estimates));
        if (report.variance_available) {
            const double wv = within_sample_variance(estimates);
            report.within_var_by_m.push_back(wv);
            report.ratio_by_m.push_back(report.dmse_by_m.back() / wv);
        }
    }
    return report;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::vector<std::size_t> order(report.multipliers.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return report.multipliers[a] < report.multipliers[b];
    });
    std::ostringstream out;
    out << "m,dmse,within_var,ratio\n";
    out.precision(10);
    for (std::size_t i : order) {
        out << report.multipliers[i] << ',' << report.dmse_by_m[i] << ',';
        if (report.variance_available)
            out << report.within_var_by_m[i] << ',' << report.ratio_by_m[i];
        else
            out << "nan,nan";
        out << '\n';
    }
    return out.str();
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["replicates"] = report.replicates;
    j["variance_available"] = report.variance_available;
    j["rows"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.multipliers.size(); ++i) {
        nlohmann::json row;
        row["m"] = report.multipliers[i];
        row["dmse"] = report.dmse_by_m[i];
        if (report.variance_available) {
            row["within_var"] = report.within_var_by_m[i];
            row["ratio"] = report.ratio_by_m[i];
        }
        j["rows"].push_back(row);
    }
    return j.dump(2);
}

}  // namespace ssr
