// Command-line front end: detect / restore / simulate / report.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssr/core_model.hpp"
#include "ssr/edge_detect.hpp"
#include "ssr/errors.hpp"
#include "ssr/ltm.hpp"
#include "ssr/noise_lab.hpp"
#include "ssr/partition.hpp"
#include "ssr/pgm.hpp"
#include "ssr/pipeline.hpp"
#include "ssr/rng.hpp"
#include "ssr/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string input;
    std::string output_dir = ".";
    std::string format = "pgm16";
    ssr::PipelineConfig cfg;
    std::string lambda_grid_spec;
    double fixed_lambda = -1.0;
};

std::vector<double> parse_lambda_grid(const std::string& spec) {
    std::vector<double> grid;
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) grid.push_back(std::stod(item));
    }
    return grid;
}

void add_common_options(CLI::App* sub, CommonArgs& args, bool needs_input = true) {
    auto* in = sub->add_option("-i,--input", args.input, "input PGM image (binary P5)");
    if (needs_input) in->required();
    sub->add_option("-o,--output-dir", args.output_dir, "output directory");
    sub->add_option("--format", args.format, "image output depth: pgm8 or pgm16")
        ->check(CLI::IsMember({"pgm8", "pgm16"}));
    sub->add_option("--window-half-width", args.cfg.window_half_width,
                    "template half width t (window is 2t+1 square)");
    sub->add_option("--stride", args.cfg.stride, "scan stride in pixels");
    sub->add_option("--alpha", args.cfg.alpha, "familywise level for the Holm procedure");
    sub->add_option("--tau", args.cfg.tau, "spread of the support function taper");
    sub->add_option("--edge-threshold", args.cfg.edge_threshold,
                    "edge-field level for keeping rendered line pixels");
    sub->add_option("--t-grid-step", args.cfg.t_grid_step, "grid step for the partition LP");
    sub->add_option("--seed", args.cfg.seed, "random seed");
    sub->add_option("--lambda-grid", args.lambda_grid_spec,
                    "comma-separated smoothing penalties to search");
    sub->add_option("--lambda", args.fixed_lambda, "fixed smoothing penalty (skips the search)");
    sub->set_config("--config", "", "flat key = value config file; flags override it");
}

void finalize_config(CommonArgs& args) {
    if (!args.lambda_grid_spec.empty()) args.cfg.lambda_grid = parse_lambda_grid(args.lambda_grid_spec);
    if (args.fixed_lambda >= 0.0) args.cfg.fixed_lambda = args.fixed_lambda;
    args.cfg.validate();
}

int image_maxval(const CommonArgs& args) { return args.format == "pgm8" ? 255 : 65535; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ssr::io_error("cannot write " + path.string());
    out << text;
    if (!out) throw ssr::io_error("failed writing " + path.string());
}

// Minimal line-plot rasterizer: one polyline over labeled sample points,
// written as an 8-bit PGM. Keeps the report target free of plotting
// dependencies; the numbers live in the CSV next to it.
ssr::PgmImage render_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                               int width = 480, int height = 320) {
    ssr::PgmImage img;
    img.width = width;
    img.height = height;
    img.maxval = 255;
    img.pixels.assign(static_cast<std::size_t>(width) * height, 255);
    const auto put = [&](int x, int y, std::uint16_t v) {
        if (x >= 0 && x < width && y >= 0 && y < height)
            img.pixels[static_cast<std::size_t>(y) * width + x] = v;
    };
    const int ml = 40, mr = 15, mt = 15, mb = 30;
    for (int x = ml; x < width - mr; ++x) put(x, height - mb, 0);
    for (int y = mt; y < height - mb; ++y) put(ml, y, 0);
    if (xs.empty()) return img;

    double xlo = xs.front(), xhi = xs.front(), ylo = ys.front(), yhi = ys.front();
    for (double x : xs) { xlo = std::min(xlo, x); xhi = std::max(xhi, x); }
    for (double y : ys) { ylo = std::min(ylo, y); yhi = std::max(yhi, y); }
    if (xhi <= xlo) xhi = xlo + 1.0;
    if (yhi <= ylo) yhi = ylo + 1.0;
    ylo = std::min(ylo, 0.0);

    const auto px = [&](double x) {
        return ml + static_cast<int>((x - xlo) / (xhi - xlo) * (width - ml - mr - 1));
    };
    const auto py = [&](double y) {
        return height - mb - 1 - static_cast<int>((y - ylo) / (yhi - ylo) * (height - mt - mb - 2));
    };
    const auto line = [&](int x0, int y0, int x1, int y1) {
        const int steps = std::max(std::abs(x1 - x0), std::abs(y1 - y0)) + 1;
        for (int s = 0; s <= steps; ++s) {
            const double f = static_cast<double>(s) / steps;
            put(static_cast<int>(std::lround(x0 + f * (x1 - x0))),
                static_cast<int>(std::lround(y0 + f * (y1 - y0))), 0);
        }
    };
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        line(px(xs[i]), py(ys[i]), px(xs[i + 1]), py(ys[i + 1]));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const int cx = px(xs[i]), cy = py(ys[i]);
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx)
                if (dx * dx + dy * dy <= 4) put(cx + dx, cy + dy, 0);
    }
    return img;
}

json config_to_json(const ssr::PipelineConfig& cfg) {
    json j;
    j["window_half_width"] = cfg.window_half_width;
    j["stride"] = cfg.stride;
    j["alpha"] = cfg.alpha;
    j["tau"] = cfg.tau;
    j["edge_threshold"] = cfg.edge_threshold;
    j["t_grid_step"] = cfg.t_grid_step;
    j["seed"] = cfg.seed;
    j["lambda_grid"] = cfg.lambda_grid;
    if (cfg.fixed_lambda) j["lambda"] = *cfg.fixed_lambda;
    return j;
}

int run_detect(CommonArgs& args) {
    finalize_config(args);
    const ssr::ImageHistogram hist = ssr::histogram_from_pgm(ssr::read_pgm(args.input));
    const ssr::SupportFunction support =
        ssr::build_support_sized(args.cfg.window_half_width, args.cfg.tau);
    const ssr::ScanResult sc =
        ssr::scan(hist, args.cfg.window_half_width, args.cfg.stride, support);
    const auto rejected = ssr::holm_adjust(sc.pvalues, args.cfg.alpha);

    std::vector<ssr::PlacedSupport> placements;
    for (std::size_t i = 0; i < rejected.size(); ++i)
        if (rejected[i]) placements.push_back({sc.centers[i], support});
    ssr::LpSolution lp;
    if (!placements.empty()) lp = ssr::solve_partition_lp(placements, args.cfg.t_grid_step);
    else lp.t_star = 1.0;
    const ssr::Partition part = ssr::assemble_fields(lp, placements, hist.side);
    const ssr::EdgeSet edges = ssr::render_edge_lines(sc, rejected, part.edge_field,
                                                      args.cfg.edge_threshold, args.cfg.alpha);

    const fs::path dir(args.output_dir);
    fs::create_directories(dir);
    ssr::write_pgm((dir / "edge_mask.pgm").string(), ssr::mask_to_pgm(edges.edge_mask, edges.side));

    std::ostringstream csv;
    csv << "center_i,center_j,pvalue,rejected,beta1,beta2,eta,converged,degenerate\n";
    csv.precision(10);
    for (std::size_t i = 0; i < sc.centers.size(); ++i) {
        const auto& f = sc.fits[i];
        csv << sc.centers[i][0] << ',' << sc.centers[i][1] << ',' << sc.pvalues[i] << ','
            << int(rejected[i]) << ',' << f.params.beta[0] << ',' << f.params.beta[1] << ','
            << f.params.eta << ',' << int(f.converged) << ',' << int(sc.degenerate[i]) << '\n';
    }
    write_text(dir / "detections.csv", csv.str());
    std::cout << "detect: " << edges.rejected_centers.size() << " of " << sc.centers.size()
              << " placements rejected; outputs in " << dir.string() << "\n";
    return 0;
}

int run_restore(CommonArgs& args) {
    finalize_config(args);
    const ssr::ImageHistogram hist = ssr::histogram_from_pgm(ssr::read_pgm(args.input));
    const ssr::RestorationResult res = ssr::restore(hist, args.cfg);

    const fs::path dir(args.output_dir);
    fs::create_directories(dir);
    const int maxval = image_maxval(args);
    double s_combined = 0, s_edge = 0, s_smooth = 0;
    ssr::write_pgm((dir / "combined.pgm").string(),
                   ssr::grid_to_pgm(res.combined, maxval, &s_combined));
    ssr::write_pgm((dir / "edge.pgm").string(),
                   ssr::grid_to_pgm(res.edge_estimate, maxval, &s_edge));
    ssr::write_pgm((dir / "smooth.pgm").string(),
                   ssr::grid_to_pgm(res.smooth_estimate, maxval, &s_smooth));
    write_text(dir / "coefficients.csv", ssr::spectral_to_csv(res.spectral));

    json meta;
    meta["lambda"] = res.selected_lambda;
    meta["t_star"] = res.partition.t_star;
    meta["partition_degenerate"] = res.partition.degenerate;
    meta["rejected_windows"] = res.edge_set.rejected_centers.size();
    meta["placements"] = res.scan.centers.size();
    meta["image_side"] = hist.side;
    meta["pixel_scale"] = {{"combined", s_combined}, {"edge", s_edge}, {"smooth", s_smooth}};
    meta["config"] = config_to_json(args.cfg);
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
    std::cout << "restore: lambda=" << res.selected_lambda << " t*=" << res.partition.t_star
              << " rejected=" << res.edge_set.rejected_centers.size() << "; outputs in "
              << dir.string() << "\n";
    return 0;
}

int run_simulate(CommonArgs& args, int multiplier, int count, int burn_in, int thinning) {
    finalize_config(args);
    const ssr::ImageHistogram hist = ssr::histogram_from_pgm(ssr::read_pgm(args.input));
    const ssr::DensityGrid truth = ssr::empirical_density(hist);
    const fs::path dir(args.output_dir);
    fs::create_directories(dir);
    for (int n = 0; n < count; ++n) {
        ssr::GibbsConfig gc;
        gc.sample_size_multiplier = multiplier;
        gc.burn_in = burn_in;
        gc.thinning = thinning;
        gc.seed = count == 1 ? args.cfg.seed : ssr::derive_seed(args.cfg.seed, n);
        const ssr::ImageHistogram noisy = ssr::gibbs_sample(truth, gc);
        double peak = 0.0;
        for (double c : noisy.counts) peak = std::max(peak, c);
        if (peak > 65535.0)
            throw ssr::io_error("counts exceed the 16-bit PGM range; lower the multiplier");
        ssr::PgmImage img;
        img.width = img.height = noisy.side;
        img.maxval = std::max(1, static_cast<int>(peak));
        img.pixels.resize(noisy.counts.size());
        for (std::size_t i = 0; i < noisy.counts.size(); ++i)
            img.pixels[i] = static_cast<std::uint16_t>(noisy.counts[i]);
        char name[32];
        std::snprintf(name, sizeof name, "noisy_%04d.pgm", n);
        ssr::write_pgm((dir / name).string(), img);
    }
    std::cout << "simulate: wrote " << count << " histogram image(s) at m=" << multiplier
              << " in " << dir.string() << "\n";
    return 0;
}

int run_report(CommonArgs& args, const std::string& multipliers_spec, int replicates,
               bool surrogate_lambda) {
    finalize_config(args);
    const ssr::ImageHistogram hist = ssr::histogram_from_pgm(ssr::read_pgm(args.input));
    const ssr::DensityGrid truth = ssr::empirical_density(hist);

    std::vector<int> multipliers;
    {
        std::istringstream in(multipliers_spec);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) multipliers.push_back(std::stoi(item));
    }
    if (multipliers.empty()) throw std::invalid_argument("no multipliers given");

    const ssr::PipelineConfig cfg = args.cfg;
    const ssr::RestorePipeline pipeline = [&](const ssr::ImageHistogram& noisy) {
        return ssr::restore(noisy, cfg, surrogate_lambda ? nullptr : &truth).combined;
    };
    ssr::GibbsConfig gc;
    gc.seed = args.cfg.seed;
    const ssr::ExperimentReport report =
        ssr::run_experiment(truth, multipliers, replicates, pipeline, gc);

    const fs::path dir(args.output_dir);
    fs::create_directories(dir);
    write_text(dir / "report.csv", ssr::report_to_csv(report));
    write_text(dir / "report.json", ssr::report_to_json(report) + "\n");

    std::vector<double> xs(report.multipliers.begin(), report.multipliers.end());
    ssr::write_pgm((dir / "dmse_plot.pgm").string(), render_line_plot(xs, report.dmse_by_m));
    if (report.variance_available)
        ssr::write_pgm((dir / "ratio_plot.pgm").string(), render_line_plot(xs, report.ratio_by_m));
    std::cout << "report: " << report.multipliers.size() << " multipliers x " << replicates
              << " replicates; outputs in " << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatio-spectral edge-preserving image restoration"};
    app.require_subcommand(1);

    CommonArgs detect_args, restore_args, simulate_args, report_args;
    int sim_multiplier = 50, sim_count = 1, sim_burn_in = 1000, sim_thinning = 1;
    std::string report_multipliers = "10,20,50,100";
    int report_replicates = 20;
    bool report_surrogate = false;

    auto* detect = app.add_subcommand("detect", "scan for edges, write mask and p-value table");
    add_common_options(detect, detect_args);

    auto* restore = app.add_subcommand("restore", "full edge-preserving restoration");
    add_common_options(restore, restore_args);

    auto* simulate = app.add_subcommand("simulate", "draw noisy histogram images by Gibbs sampling");
    add_common_options(simulate, simulate_args);
    simulate->add_option("-m,--multiplier", sim_multiplier, "sample size multiplier (T = m*M^2)");
    simulate->add_option("-n,--count", sim_count, "number of images to draw");
    simulate->add_option("--burn-in", sim_burn_in, "Gibbs burn-in sweeps");
    simulate->add_option("--thinning", sim_thinning, "Gibbs thinning");

    auto* report = app.add_subcommand("report", "replicate the noise study tables and plots");
    add_common_options(report, report_args);
    report->add_option("-m,--multipliers", report_multipliers, "comma-separated multipliers");
    report->add_option("-N,--replicates", report_replicates, "replicates per multiplier");
    report->add_flag("--surrogate-lambda", report_surrogate,
                     "select lambda without ground truth (default uses the clean input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (detect->parsed()) return run_detect(detect_args);
        if (restore->parsed()) return run_restore(restore_args);
        if (simulate->parsed())
            return run_simulate(simulate_args, sim_multiplier, sim_count, sim_burn_in,
                                sim_thinning);
        if (report->parsed())
            return run_report(report_args, report_multipliers, report_replicates,
                              report_surrogate);
    } catch (const ssr::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const ssr::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
