#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ssr/core_model.hpp"

namespace ssr {

struct GibbsConfig {
    int sample_size_multiplier = 50;   // m in T = m * M^2
    int burn_in = 1000;
    int thinning = 1;
    std::uint64_t seed = 0;
};

// Draws T = multiplier * M^2 points from the discrete bivariate distribution
// proportional to `truth` by systematic-scan Gibbs sampling (row given column,
// then column given row) and bins them into a count histogram. Rows or
// columns of zero mass are never visited. Deterministic in the seed.
ImageHistogram gibbs_sample(const DensityGrid& truth, const GibbsConfig& cfg);

// Discretized mean squared error: (1/h1) * mean over replicates of
// sum_i (mass_hat(s_i) - mass_truth(s_i))^2 where mass = value / M^2 and
// h1 = 1/M.
double dmse(const DensityGrid& truth, const std::vector<DensityGrid>& replicate_estimates);

// Same scaling with the replicate mean in place of the truth: (1/h1) * sum_i
// population variance across replicates of the cell masses. Needs >= 2
// replicates.
double within_sample_variance(const std::vector<DensityGrid>& replicate_estimates);

struct ExperimentReport {
    std::vector<int> multipliers;
    std::vector<double> dmse_by_m;
    std::vector<double> within_var_by_m;   // empty when variance_available is false
    std::vector<double> ratio_by_m;        // dmse / within_var
    int replicates = 0;
    bool variance_available = false;
};

using RestorePipeline = std::function<DensityGrid(const ImageHistogram&)>;

// For each multiplier: N seeded Gibbs draws, N restorations, then DMSE
// against the truth, within-sample variance and their ratio. Replicates run
// in parallel on seeds derived from cfg.seed by counter, so reports are
// reproducible bit for bit. A pipeline failure aborts with the offending
// (multiplier, replicate) named.
ExperimentReport run_experiment(const DensityGrid& truth, const std::vector<int>& multipliers,
                                int replicates, const RestorePipeline& pipeline,
                                const GibbsConfig& cfg);

// CSV with header m,dmse,within_var,ratio; rows sorted by multiplier.
std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);

}  // namespace ssr
