#include "ssr/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ssr/errors.hpp"
#include "ssr/ltm.hpp"

namespace ssr {

void PipelineConfig::validate() const {
    if (window_half_width < 2) throw std::invalid_argument("window half width must be >= 2");
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha must lie in [0, 1)");
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    if (edge_threshold <= 0.0 || edge_threshold >= 1.0)
        throw std::invalid_argument("edge threshold must lie in (0, 1)");
    if (t_grid_step <= 0.0 || t_grid_step > 1.0)
        throw std::invalid_argument("t grid step must lie in (0, 1]");
    if (lambda_grid.empty()) throw std::invalid_argument("lambda grid must be nonempty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (lambda_grid[i] < 0.0) throw std::invalid_argument("lambda grid values must be >= 0");
        if (i > 0 && lambda_grid[i] <= lambda_grid[i - 1])
            throw std::invalid_argument("lambda grid must be strictly increasing");
    }
    if (fixed_lambda && *fixed_lambda < 0.0)
        throw std::invalid_argument("lambda must be nonnegative");
}

std::string pipeline_config_to_toml(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "window-half-width = " << cfg.window_half_width << "\n";
    out << "stride = " << cfg.stride << "\n";
    out << "alpha = " << cfg.alpha << "\n";
    out << "tau = " << cfg.tau << "\n";
    out << "edge-threshold = " << cfg.edge_threshold << "\n";
    out << "t-grid-step = " << cfg.t_grid_step << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "lambda-grid = \"";
    for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i)
        out << (i ? "," : "") << cfg.lambda_grid[i];
    out << "\"\n";
    if (cfg.fixed_lambda) out << "lambda = " << *cfg.fixed_lambda << "\n";
    return out.str();
}

PipelineConfig pipeline_config_from_toml(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r\"");
            const auto b = s.find_last_not_of(" \t\r\"");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        try {
            if (key == "window-half-width") cfg.window_half_width = std::stoi(value);
            else if (key == "stride") cfg.stride = std::stoi(value);
            else if (key == "alpha") cfg.alpha = std::stod(value);
            else if (key == "tau") cfg.tau = std::stod(value);
            else if (key == "edge-threshold") cfg.edge_threshold = std::stod(value);
            else if (key == "t-grid-step") cfg.t_grid_step = std::stod(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "lambda") cfg.fixed_lambda = std::stod(value);
            else if (key == "lambda-grid") {
                std::vector<double> grid;
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ',')) grid.push_back(std::stod(item));
                cfg.lambda_grid = std::move(grid);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("bad config value for key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RestorationResult restore(const ImageHistogram& image, const PipelineConfig& cfg,
                          const DensityGrid* truth) {
    cfg.validate();
    const int t = cfg.window_half_width;
    if (image.side <= 2 * t + 2)
        throw std::invalid_argument("image side must exceed 2*half_width + 2");
    if (truth && truth->side != image.side)
        throw std::invalid_argument("truth grid does not match the image");

    RestorationResult res;
    const DensityGrid emp = empirical_density(image);
    const SupportFunction support = build_support_sized(t, cfg.tau);

    res.scan = scan(image, t, cfg.stride, support);
    res.rejected = cfg.alpha > 0.0 ? holm_adjust(res.scan.pvalues, cfg.alpha)
                                   : std::vector<std::uint8_t>(res.scan.centers.size(), 0);

    std::vector<PlacedSupport> placements;
    std::vector<std::size_t> placement_scan_index;
    for (std::size_t i = 0; i < res.rejected.size(); ++i) {
        if (!res.rejected[i]) continue;
        placements.push_back({res.scan.centers[i], support});
        placement_scan_index.push_back(i);
    }

    LpSolution lp;
    if (!placements.empty()) {
        lp = solve_partition_lp(placements, cfg.t_grid_step);
    } else {
        lp.t_star = 1.0;   // vacuous: no coverage constraints to satisfy
    }
    res.partition = assemble_fields(lp, placements, image.side);

    // Local template accumulation over the rejected windows.
    res.edge_estimate = zeros_like(image.side);
    const int m = 2 * t + 1;
    for (std::size_t p = 0; p < placements.size(); ++p) {
        const std::size_t scan_idx = placement_scan_index[p];
        const auto& center = res.scan.centers[scan_idx];
        const LtmFit& fit = res.scan.fits[scan_idx];
        const Window w = window_from_histogram(image, center, t, support);

        // The fitted template is the mass-one estimate of the localized
        // density rho*f, so its scale is the window's rho-weighted empirical
        // mass. A plain (unweighted) sum under-scales the patch by
        // sum(f)/sum(rho f) and leaves a dark seam along every detected edge.
        double window_mass = 0.0;
        for (int di = -t; di <= t; ++di)
            for (int dj = -t; dj <= t; ++dj)
                window_mass += support.at_offset(di, dj) * emp.at(center[0] + di, center[1] + dj);

        const double weight = lp.alphas[p] * window_mass;
        if (weight == 0.0) continue;
        for (int di = -t; di <= t; ++di) {
            for (int dj = -t; dj <= t; ++dj) {
                const std::size_t idx = static_cast<std::size_t>(di + t) * m + (dj + t);
                const double rho = w.rho[idx];
                if (rho <= 0.0) continue;
                const double lin =
                    fit.params.beta[0] * w.tstats[idx][0] + fit.params.beta[1] * w.tstats[idx][1];
                const double density =
                    rho * std::exp(lin + fit.params.eta * std::abs(lin) - fit.normalizer);
                res.edge_estimate.at(center[0] + di, center[1] + dj) += weight * density;
            }
        }
    }

    // Spectral reconstruction of the smooth field.
    DensityGrid masked = zeros_like(image.side);
    for (std::size_t i = 0; i < masked.values.size(); ++i)
        masked.values[i] = res.partition.smooth_field.values[i] * emp.values[i];

    TpsConfig tps = make_tps_config(0.0, cfg.lambda_grid);
    if (cfg.fixed_lambda) {
        tps.lambda = *cfg.fixed_lambda;
    } else if (truth) {
        DensityGrid masked_truth = zeros_like(image.side);
        for (std::size_t i = 0; i < masked_truth.values.size(); ++i)
            masked_truth.values[i] = res.partition.smooth_field.values[i] * truth->values[i];
        tps.lambda = select_lambda(masked, &masked_truth, tps);
    } else {
        tps.lambda = select_lambda(masked, nullptr, tps);
    }
    res.selected_lambda = tps.lambda;
    res.spectral = tps_filter(forward_transform(masked), tps.lambda);
    res.smooth_estimate = smooth_estimate(masked, tps);

    res.combined = zeros_like(image.side);
    for (std::size_t i = 0; i < res.combined.values.size(); ++i)
        res.combined.values[i] = res.edge_estimate.values[i] + res.smooth_estimate.values[i];

    res.edge_set = render_edge_lines(res.scan, res.rejected, res.partition.edge_field,
                                     cfg.edge_threshold, cfg.alpha);
    return res;
}

DensityGrid spectral_baseline(const ImageHistogram& image, const PipelineConfig& cfg,
                              const DensityGrid* truth) {
    cfg.validate();
    const DensityGrid emp = empirical_density(image);
    TpsConfig tps = make_tps_config(0.0, cfg.lambda_grid);
    if (cfg.fixed_lambda)
        tps.lambda = *cfg.fixed_lambda;
    else
        tps.lambda = select_lambda(emp, truth, tps);
    return smooth_estimate(emp, tps);
}

}  // namespace ssr
