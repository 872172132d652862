#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ssr/errors.hpp"
#include "ssr/partition.hpp"
#include "ssr/rng.hpp"

using namespace ssr;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Literal piecewise definitions, written out independently of the library.
double oracle_h1(int n1, int n2) {
    const bool in1 = n1 >= 2 && n1 <= 5;
    const bool in2 = n2 >= 2 && n2 <= 5;
    if (!in1 || !in2) return 0.0;
    if (n1 == 2 || n1 == 5 || n2 == 2 || n2 == 5) return 0.5;
    return 1.0;
}

double oracle_h2(double n1, double n2, double tau) {
    if (n1 < 1 || n1 > 6 || n2 < 1 || n2 > 6) return 0.0;
    const double u = std::tan(kPi * (n1 - 3.5) / (2 * tau));
    const double v = std::tan(kPi * (n2 - 3.5) / (2 * tau));
    return std::exp(-u * u) * std::exp(-v * v);
}

// Direct double-loop convolution, sampled with the same one-cell shift the
// library applies to center the peak.
double oracle_support_value(int a, int b, double tau) {
    const int n1 = a + 2, n2 = b + 2;
    double acc = 0.0;
    for (int k1 = -10; k1 <= 20; ++k1)
        for (int k2 = -10; k2 <= 20; ++k2)
            acc += oracle_h1(k1, k2) * oracle_h2(n1 - k1, n2 - k2, tau);
    return acc;
}

SupportFunction tiny_support(double peak_value) {
    // 5x5 bump, zero frame, peak at the center.
    SupportFunction s;
    s.window_size = 5;
    s.tau = 1.0;
    s.values.assign(25, 0.0);
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
            s.values[(di + 2) * 5 + (dj + 2)] =
                peak_value * (di == 0 && dj == 0 ? 1.0 : 0.5);
    return s;
}

// Exhaustive alpha-grid search for max-min coverage under the "<= 1
// everywhere" cap; coarse pass then local refinement (the objective is
// concave, so the coarse argmax brackets the optimum).
double oracle_maxmin_t(const std::vector<PlacedSupport>& placements, double lo, double hi,
                       double coarse, double fine) {
    const int k = static_cast<int>(placements.size());
    REQUIRE(k <= 3);
    // Collect every pixel covered by at least one support.
    std::vector<std::array<int, 2>> pixels;
    for (const auto& p : placements) {
        const int t = p.fn.half_width();
        for (int di = -t; di <= t; ++di)
            for (int dj = -t; dj <= t; ++dj)
                pixels.push_back({p.center[0] + di, p.center[1] + dj});
    }
    const auto evaluate = [&](const std::vector<double>& alpha) {
        for (const auto& px : pixels) {
            double v = 0.0;
            for (int i = 0; i < k; ++i)
                v += alpha[i] * placed_support_value(placements[i], px[0], px[1]);
            if (v > 1.0 + 1e-12) return -1.0;   // infeasible
        }
        double worst = 2.0;
        for (int j = 0; j < k; ++j) {
            double v = 0.0;
            for (int i = 0; i < k; ++i)
                v += alpha[i] *
                     placed_support_value(placements[i], placements[j].center[0],
                                          placements[j].center[1]);
            worst = std::min(worst, v);
        }
        return worst;
    };
    const auto sweep = [&](std::vector<double> lows, std::vector<double> highs, double step) {
        double best = 0.0;
        std::vector<double> alpha(k, 0.0), best_alpha(k, 0.0);
        const auto run = [&](auto&& self, int dim) -> void {
            if (dim == k) {
                const double v = evaluate(alpha);
                if (v > best) {
                    best = v;
                    best_alpha = alpha;
                }
                return;
            }
            for (double a = lows[dim]; a <= highs[dim] + 1e-12; a += step) {
                alpha[dim] = a;
                self(self, dim + 1);
            }
        };
        run(run, 0);
        return std::pair{best, best_alpha};
    };
    // The objective (a minimum of linear functions) is concave on a convex
    // feasible set, so refining around each stage's argmax is sound.
    auto [t_best, alpha_best] =
        sweep(std::vector<double>(k, lo), std::vector<double>(k, hi), coarse);
    for (double step = coarse; step > fine * 0.5;) {
        const double next = std::max(step / 10.0, fine);
        std::vector<double> lows(k), highs(k);
        for (int i = 0; i < k; ++i) {
            lows[i] = std::max(lo, alpha_best[i] - 2 * step);
            highs[i] = std::min(hi, alpha_best[i] + 2 * step);
        }
        auto [t_ref, alpha_ref] = sweep(lows, highs, next);
        if (t_ref > t_best) {
            t_best = t_ref;
            alpha_best = alpha_ref;
        }
        if (next <= fine) break;
        step = next;
    }
    return t_best;
}

}  // namespace

TEST_CASE("trapezoid factor matches its piecewise definition") {
    CHECK(trapezoid_weight(3, 3, 5) == 1.0);
    CHECK(trapezoid_weight(2, 4, 5) == 0.5);
    CHECK(trapezoid_weight(5, 5, 5) == 0.5);
    CHECK(trapezoid_weight(1, 1, 5) == 0.0);
    CHECK(trapezoid_weight(6, 3, 5) == 0.0);
}

TEST_CASE("taper factor is one at a lattice center and decays symmetrically") {
    // Half width 4 puts the taper center on the lattice: tan(0) = 0.
    CHECK(taper_weight(3, 3, 4, 5.0) == doctest::Approx(1.0));
    CHECK(taper_weight(2, 3, 4, 5.0) == doctest::Approx(taper_weight(4, 3, 4, 5.0)));
    CHECK(taper_weight(2, 3, 4, 5.0) < 1.0);
    CHECK(taper_weight(0, 3, 4, 5.0) == 0.0);
    // The 6x6 factor window: value at (4,4), offset one half cell.
    const double a = std::tan(kPi * 0.5 / 10.0);
    CHECK(taper_weight(4, 4, 5, 5.0) == doctest::Approx(std::exp(-2 * a * a)));
}

TEST_CASE("support function matches the direct convolution oracle") {
    const SupportFunction s = build_support(5.0);
    REQUIRE(s.window_size == 11);
    for (int a = 0; a < 11; ++a)
        for (int b = 0; b < 11; ++b)
            CHECK(s.values[a * 11 + b] ==
                  doctest::Approx(oracle_support_value(a, b, 5.0)).epsilon(1e-12));
}

TEST_CASE("support function peaks at the center and vanishes on the frame") {
    for (double tau : {3.0, 5.0, 8.0}) {
        const SupportFunction s = build_support(tau);
        const double peak = s.at_offset(0, 0);
        CHECK(peak > 0.0);
        for (int di = -5; di <= 5; ++di)
            for (int dj = -5; dj <= 5; ++dj) {
                CHECK(s.at_offset(di, dj) >= 0.0);
                CHECK(s.at_offset(di, dj) <= peak + 1e-12);
                if (std::abs(di) == 5 || std::abs(dj) == 5) CHECK(s.at_offset(di, dj) == 0.0);
            }
    }
}

TEST_CASE("support sizes generalize while keeping the invariants") {
    for (int t : {2, 3, 4, 7}) {
        const SupportFunction s = build_support_sized(t, 5.0);
        CHECK(s.window_size == 2 * t + 1);
        CHECK(s.at_offset(0, 0) > 0.0);
        for (int d = -t; d <= t; ++d) {
            CHECK(s.at_offset(t, d) == 0.0);
            CHECK(s.at_offset(d, -t) == 0.0);
        }
    }
    CHECK_THROWS_AS(build_support_sized(1, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(build_support(-1.0), std::invalid_argument);
}

TEST_CASE("partition LP: single center saturates at one") {
    const SupportFunction s = tiny_support(0.8);
    const std::vector<PlacedSupport> pls{{{10, 10}, s}};
    const LpSolution lp = solve_partition_lp(pls, 0.005);
    CHECK(lp.t_star == doctest::Approx(1.0));
    CHECK(lp.alphas[0] == doctest::Approx(1.0 / 0.8).epsilon(1e-9));
}

TEST_CASE("partition LP: disjoint centers decouple") {
    const SupportFunction a = tiny_support(0.5);
    const SupportFunction b = tiny_support(2.0);
    const std::vector<PlacedSupport> pls{{{5, 5}, a}, {{30, 30}, b}};
    const LpSolution lp = solve_partition_lp(pls, 0.005);
    CHECK(lp.t_star == doctest::Approx(1.0));
    CHECK(lp.alphas[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(lp.alphas[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("partition LP: overlapping supports match the dense grid oracle") {
    const SupportFunction s = build_support(5.0);
    for (int gap : {2, 3, 5}) {
        const std::vector<PlacedSupport> pls{{{20, 20}, s}, {{20, 20 + gap}, s}};
        const LpSolution lp = solve_partition_lp(pls, 0.005);
        const double oracle = oracle_maxmin_t(pls, 0.0, 0.3, 0.01, 1e-4);
        CHECK(std::abs(lp.t_star - oracle) <= 5e-3 + 1e-9);
    }
}

TEST_CASE("partition LP: duplicate centers merge deterministically") {
    const SupportFunction s = tiny_support(1.0);
    const std::vector<PlacedSupport> pls{{{8, 8}, s}, {{8, 8}, s}, {{8, 8}, s}};
    const LpSolution lp = solve_partition_lp(pls, 0.005);
    CHECK(lp.t_star == doctest::Approx(1.0));
    CHECK(lp.alphas[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lp.alphas[1] == 0.0);
    CHECK(lp.alphas[2] == 0.0);
}

TEST_CASE("partition LP rejects zero self-support and empty input") {
    SupportFunction zero = tiny_support(1.0);
    zero.values.assign(zero.values.size(), 0.0);
    CHECK_THROWS_AS(solve_partition_lp({{{4, 4}, zero}}, 0.005), std::invalid_argument);
    CHECK_THROWS_AS(solve_partition_lp({}, 0.005), std::invalid_argument);
}

TEST_CASE("assemble: no detected centers gives the all-smooth partition") {
    LpSolution lp;
    lp.t_star = 1.0;
    const Partition part = assemble_fields(lp, {}, 12);
    for (std::size_t i = 0; i < part.edge_field.values.size(); ++i) {
        CHECK(part.edge_field.values[i] == 0.0);
        CHECK(part.smooth_field.values[i] == 1.0);
    }
}

TEST_CASE("assemble: overlapping bumps equal the direct sum and stay in [0,1]") {
    const SupportFunction s = build_support(5.0);
    const std::vector<PlacedSupport> pls{{{15, 15}, s}, {{15, 18}, s}, {{18, 15}, s}};
    const LpSolution lp = solve_partition_lp(pls, 0.005);
    const Partition part = assemble_fields(lp, pls, 32);
    for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) {
            double direct = 0.0;
            for (std::size_t p = 0; p < pls.size(); ++p)
                direct += lp.alphas[p] * placed_support_value(pls[p], i, j);
            direct = std::min(direct, 1.0);
            CHECK(part.edge_field.at(i, j) == doctest::Approx(direct).epsilon(1e-9));
            CHECK(part.edge_field.at(i, j) >= 0.0);
            CHECK(part.edge_field.at(i, j) <= 1.0);
            CHECK(part.edge_field.at(i, j) + part.smooth_field.at(i, j) == 1.0);
        }
}

TEST_CASE("assemble flags real constraint violations") {
    const SupportFunction s = tiny_support(1.0);
    LpSolution bad;
    bad.alphas = {5.0};   // coverage 5 at the center
    bad.t_star = 1.0;
    CHECK_THROWS_AS(assemble_fields(bad, {{{6, 6}, s}}, 12), numeric_error);
}

TEST_CASE("partition axioms hold on random configurations") {
    Rng rng(777);
    for (int rep = 0; rep < 30; ++rep) {
        const int k = 1 + static_cast<int>(rng.below(5));
        const double tau = rng.uniform(3.0, 8.0);
        const SupportFunction s = build_support(tau);
        std::vector<PlacedSupport> pls;
        for (int i = 0; i < k; ++i)
            pls.push_back({{static_cast<int>(8 + rng.below(24)),
                            static_cast<int>(8 + rng.below(24))},
                           s});
        const LpSolution lp = solve_partition_lp(pls, 0.005);
        const Partition part = assemble_fields(lp, pls, 40);
        for (std::size_t i = 0; i < part.edge_field.values.size(); ++i) {
            CHECK(part.edge_field.values[i] >= 0.0);
            CHECK(part.edge_field.values[i] <= 1.0);
            CHECK(part.edge_field.values[i] + part.smooth_field.values[i] == 1.0);
        }
        // Every kept center must be covered at least to t_star.
        for (std::size_t p = 0; p < pls.size(); ++p) {
            double cover = 0.0;
            for (std::size_t q = 0; q < pls.size(); ++q)
                cover += lp.alphas[q] *
                         placed_support_value(pls[q], pls[p].center[0], pls[p].center[1]);
            CHECK(cover >= lp.t_star - 1e-9);
            CHECK(cover <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("adding a disjoint center never lowers t*") {
    const SupportFunction s = build_support(5.0);
    std::vector<PlacedSupport> pls{{{15, 15}, s}, {{15, 19}, s}};
    const double before = solve_partition_lp(pls, 0.005).t_star;
    pls.push_back({{60, 60}, s});
    const double after = solve_partition_lp(pls, 0.005).t_star;
    CHECK(after >= before - 1e-12);
}
