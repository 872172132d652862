#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssr/core_model.hpp"
#include "ssr/edge_detect.hpp"
#include "ssr/partition.hpp"
#include "ssr/spectral.hpp"

namespace ssr {

struct PipelineConfig {
    int window_half_width = 5;      // 11x11 template
    int stride = 3;
    double alpha = 0.01;
    double tau = 5.0;
    double edge_threshold = 0.8;
    std::vector<double> lambda_grid = default_lambda_grid();
    double t_grid_step = 0.005;
    std::uint64_t seed = 0;
    std::optional<double> fixed_lambda;   // skip selection when set

    void validate() const;   // throws std::invalid_argument
};

// Flat key=value serialization; keys use the CLI flag spelling so a saved
// config is directly loadable with --config.
std::string pipeline_config_to_toml(const PipelineConfig& cfg);
PipelineConfig pipeline_config_from_toml(const std::string& text);

struct RestorationResult {
    DensityGrid edge_estimate;      // accumulated local template estimates
    DensityGrid smooth_estimate;    // spectral TPS reconstruction of P_s * f_emp
    DensityGrid combined;           // edge_estimate + smooth_estimate, exact
    ScanResult scan;
    std::vector<std::uint8_t> rejected;
    Partition partition;
    EdgeSet edge_set;
    SpectralField spectral;         // post-filter coefficients
    double selected_lambda = 0.0;
};

// Full restoration: support construction, template scan, Holm step-down,
// partition of unity, local template accumulation (g += alpha * f * S per
// rejected window, S the plain window mass), spectral smoothing of
// P_s * f_emp, additive recombination. `truth` (optional) switches lambda
// selection to simulation mode; it is masked by P_s internally.
RestorationResult restore(const ImageHistogram& image, const PipelineConfig& cfg,
                          const DensityGrid* truth = nullptr);

// Pure spectral smoothing of the full empirical density with the same lambda
// machinery and no edge removal; the comparison baseline.
DensityGrid spectral_baseline(const ImageHistogram& image, const PipelineConfig& cfg,
                              const DensityGrid* truth = nullptr);

}  // namespace ssr
