#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "ssr/errors.hpp"
#include "ssr/spectral.hpp"
#include "ssr/rng.hpp"

using namespace ssr;

namespace {

constexpr double kPi = 3.14159265358979323846;

DensityGrid random_grid(Rng& rng, int side) {
    DensityGrid g = zeros_like(side);
    for (auto& v : g.values) v = rng.uniform(0.0, 2.0);
    return g;
}

// O(M^4) transform straight from the definition.
SpectralField naive_forward(const DensityGrid& g) {
    SpectralField u;
    u.side = g.side;
    u.coeffs.assign(static_cast<std::size_t>(g.side) * g.side, 0.0);
    for (int k = u.freq_min(); k <= u.freq_max(); ++k)
        for (int l = u.freq_min(); l <= u.freq_max(); ++l) {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < g.side; ++a)
                for (int b = 0; b < g.side; ++b) {
                    const double phase = -k * kPi * (2 * a + 1) / g.side -
                                         l * kPi * (2 * b + 1) / g.side;
                    acc += g.at(a, b) * std::complex<double>(std::cos(phase), std::sin(phase));
                }
            u.at(k, l) = acc / static_cast<double>(g.side * g.side);
        }
    return u;
}

// Scalar minimizer for the per-coefficient objective: brute-force grid scan
// to bracket the minimum, then the vertex of the parabola through the best
// sample and its neighbors. Pure function-comparison search stalls at
// ~sqrt(eps) on a quadratic bowl; the vertex step recovers full precision
// from three exact samples.
double scalar_min(double lo, double hi, const auto& f) {
    const int n = 101;
    const double step = (hi - lo) / (n - 1);
    int best = 0;
    double fbest = f(lo);
    for (int i = 1; i < n; ++i) {
        const double v = f(lo + i * step);
        if (v < fbest) {
            fbest = v;
            best = i;
        }
    }
    const int mid = std::clamp(best, 1, n - 2);
    const double x0 = lo + (mid - 1) * step, x1 = lo + mid * step, x2 = lo + (mid + 1) * step;
    const double f0 = f(x0), f1 = f(x1), f2 = f(x2);
    const double curv = f0 - 2.0 * f1 + f2;
    if (curv <= 0.0) return x1;
    return x1 - 0.5 * step * (f2 - f0) / curv;
}

}  // namespace

TEST_CASE("forward transform: constant grid is pure DC") {
    DensityGrid g = zeros_like(6);
    for (auto& v : g.values) v = 3.25;
    const SpectralField u = forward_transform(g);
    CHECK(u.at(0, 0).real() == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(u.at(0, 0).imag() == doctest::Approx(0.0));
    for (int k = u.freq_min(); k <= u.freq_max(); ++k)
        for (int l = u.freq_min(); l <= u.freq_max(); ++l)
            if (k != 0 || l != 0) CHECK(std::abs(u.at(k, l)) < 1e-12);
}

TEST_CASE("forward transform: a pure tone occupies one conjugate pair") {
    const int side = 8;
    DensityGrid g = zeros_like(side);
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b)
            g.at(a, b) = std::cos(2.0 * kPi * (2 * a + 1) / (2.0 * side));   // cos(theta_a)
    const SpectralField u = forward_transform(g);
    CHECK(u.at(1, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(u.at(-1, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
    for (int k = u.freq_min(); k <= u.freq_max(); ++k)
        for (int l = u.freq_min(); l <= u.freq_max(); ++l)
            if (!(l == 0 && (k == 1 || k == -1))) CHECK(std::abs(u.at(k, l)) < 1e-9);
}

TEST_CASE("forward transform matches the quadruple-loop oracle") {
    Rng rng(5);
    const DensityGrid g = random_grid(rng, 8);
    const SpectralField fast = forward_transform(g);
    const SpectralField slow = naive_forward(g);
    for (std::size_t i = 0; i < fast.coeffs.size(); ++i)
        CHECK(std::abs(fast.coeffs[i] - slow.coeffs[i]) < 1e-9);
}

TEST_CASE("transform pair is unitary: roundtrip, Parseval, DC mean") {
    Rng rng(6);
    for (int side : {2, 3, 5, 8, 16, 33}) {
        const DensityGrid g = random_grid(rng, side);
        const SpectralField u = forward_transform(g);
        CHECK(hermitian_residual(u) < 1e-9);
        const DensityGrid back = inverse_transform(u);
        double worst = 0.0, mean = 0.0, energy = 0.0, spectral = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            worst = std::max(worst, std::abs(back.values[i] - g.values[i]));
            mean += g.values[i];
            energy += g.values[i] * g.values[i];
        }
        for (const auto& c : u.coeffs) spectral += std::norm(c);
        CHECK(worst < 1e-9);
        CHECK(u.at(0, 0).real() == doctest::Approx(mean / g.values.size()).epsilon(1e-12));
        CHECK(energy / g.values.size() == doctest::Approx(spectral).epsilon(1e-9));
    }
}

TEST_CASE("inverse of a single coefficient pair is a sampled cosine") {
    SpectralField u;
    u.side = 8;
    u.coeffs.assign(64, 0.0);
    u.at(1, 0) = 1.0;
    u.at(-1, 0) = 1.0;
    const DensityGrid g = inverse_transform(u);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
            CHECK(g.at(a, b) == doctest::Approx(2.0 * std::cos(kPi * (2 * a + 1) / 8.0))
                                    .epsilon(1e-12));
}

TEST_CASE("inverse rejects broken symmetry") {
    SpectralField u;
    u.side = 4;
    u.coeffs.assign(16, 0.0);
    u.at(1, 0) = {1.0, 0.5};
    u.at(-1, 0) = {1.0, 0.5};   // should be the conjugate
    CHECK_THROWS_AS(inverse_transform(u), numeric_error);
}

TEST_CASE("tps filter: lambda 0 is the identity") {
    Rng rng(7);
    const SpectralField u = forward_transform(random_grid(rng, 8));
    const SpectralField f = tps_filter(u, 0.0);
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) CHECK(f.coeffs[i] == u.coeffs[i]);
}

TEST_CASE("tps filter: divisor spot checks") {
    SpectralField u;
    u.side = 8;
    u.coeffs.assign(64, 0.0);
    u.at(1, 0) = 1.0;
    u.at(1, 1) = {0.0, 2.0};
    const SpectralField a = tps_filter(u, 1.0);
    CHECK(a.at(1, 0).real() == doctest::Approx(0.5));          // 1 + 1*1^4 = 2
    const SpectralField b = tps_filter(u, 0.25);
    CHECK(b.at(1, 1).imag() == doctest::Approx(1.0));          // 1 + 0.25*(1+1)^2 = 2
    CHECK_THROWS_AS(tps_filter(u, -0.5), std::invalid_argument);
}

TEST_CASE("tps filter matches per-coefficient brute-force minimization") {
    Rng rng(8);
    const SpectralField u = forward_transform(random_grid(rng, 8));
    for (double lambda : {0.01, 1.0}) {
        const SpectralField f = tps_filter(u, lambda);
        for (int k = u.freq_min(); k <= u.freq_max(); ++k)
            for (int l = u.freq_min(); l <= u.freq_max(); ++l) {
                const double w = tps_penalty_weight(k, l);
                const std::complex<double> raw = u.at(k, l);
                const double re = scalar_min(-2.5, 2.5, [&](double x) {
                    return (x - raw.real()) * (x - raw.real()) + lambda * w * x * x;
                });
                const double im = scalar_min(-2.5, 2.5, [&](double x) {
                    return (x - raw.imag()) * (x - raw.imag()) + lambda * w * x * x;
                });
                CHECK(std::abs(f.at(k, l).real() - re) < 1e-10);
                CHECK(std::abs(f.at(k, l).imag() - im) < 1e-10);
            }
    }
}

TEST_CASE("tps filter: monotone shrinkage, DC preservation, energy decay") {
    Rng rng(9);
    const SpectralField u = forward_transform(random_grid(rng, 12));
    double prev_penalty = -1.0;
    SpectralField prev = u;
    bool first = true;
    for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0}) {
        const SpectralField f = tps_filter(u, lambda);
        CHECK(f.at(0, 0) == u.at(0, 0));
        double penalty = 0.0;
        for (int k = u.freq_min(); k <= u.freq_max(); ++k)
            for (int l = u.freq_min(); l <= u.freq_max(); ++l) {
                penalty += tps_penalty_weight(k, l) * std::norm(f.at(k, l));
                if (!first) CHECK(std::abs(f.at(k, l)) <= std::abs(prev.at(k, l)) + 1e-15);
            }
        if (!first) CHECK(penalty <= prev_penalty + 1e-12);
        prev_penalty = penalty;
        prev = f;
        first = false;
    }
}

TEST_CASE("smooth estimate: large lambda flattens to the mean") {
    Rng rng(10);
    DensityGrid g = zeros_like(16);
    for (auto& v : g.values) v = 1.0 + 0.3 * rng.normal();
    double mean = 0.0;
    for (double v : g.values) mean += v;
    mean /= g.values.size();
    const DensityGrid flat = smooth_estimate(g, make_tps_config(1e9, {1.0}));
    for (double v : flat.values) CHECK(v == doctest::Approx(mean).epsilon(1e-4));
}

TEST_CASE("smooth estimate: lambda 0 returns the input up to roundtrip error") {
    Rng rng(12);
    const DensityGrid g = random_grid(rng, 9);
    const DensityGrid out = smooth_estimate(g, make_tps_config(0.0, {1.0}));
    for (std::size_t i = 0; i < g.values.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(g.values[i]).epsilon(1e-9));
}

TEST_CASE("smoothing improves the error of a noisy smooth density") {
    // Smooth bivariate cosine truth, multinomial sampling noise; the selected
    // penalty must beat the raw empirical input on average.
    const int side = 16;
    DensityGrid truth = zeros_like(side);
    for (int a = 0; a < side; ++a)
        for (int b = 0; b < side; ++b)
            truth.at(a, b) =
                1.0 + 0.5 * std::cos(kPi * (2 * a + 1) / side) * std::cos(kPi * (2 * b + 1) / side);
    std::vector<double> weights(truth.values.begin(), truth.values.end());
    Rng rng(13);
    const TpsConfig cfg = make_tps_config(0.0, default_lambda_grid());
    int improved = 0;
    const int reps = 40;
    for (int rep = 0; rep < reps; ++rep) {
        const auto counts = ssr_test::draw_multinomial(rng, weights, 5 * side * side);
        DensityGrid emp = zeros_like(side);
        const double scale = static_cast<double>(side * side) / (5 * side * side);
        for (std::size_t i = 0; i < counts.size(); ++i) emp.values[i] = counts[i] * scale;
        TpsConfig chosen = cfg;
        chosen.lambda = select_lambda(emp, &truth, cfg);
        const DensityGrid smoothed = smooth_estimate(emp, chosen);
        double raw_err = 0.0, smooth_err = 0.0;
        for (std::size_t i = 0; i < truth.values.size(); ++i) {
            raw_err += (emp.values[i] - truth.values[i]) * (emp.values[i] - truth.values[i]);
            smooth_err +=
                (smoothed.values[i] - truth.values[i]) * (smoothed.values[i] - truth.values[i]);
        }
        if (smooth_err < raw_err) ++improved;
    }
    CHECK(improved >= reps * 9 / 10);
}

TEST_CASE("select_lambda: clean input picks the smallest penalty") {
    Rng rng(14);
    const DensityGrid g = random_grid(rng, 10);
    const TpsConfig cfg = make_tps_config(0.0, default_lambda_grid());
    CHECK(select_lambda(g, &g, cfg) == doctest::Approx(cfg.lambda_grid.front()));
}

TEST_CASE("select_lambda: pure noise against a constant truth picks the largest penalty") {
    Rng rng(15);
    const int side = 12;
    DensityGrid truth = zeros_like(side);
    for (auto& v : truth.values) v = 1.0;
    DensityGrid noisy = zeros_like(side);
    for (auto& v : noisy.values) v = 1.0 + 0.5 * rng.normal();
    const TpsConfig cfg = make_tps_config(0.0, default_lambda_grid());
    CHECK(select_lambda(noisy, &truth, cfg) == doctest::Approx(cfg.lambda_grid.back()));
}

TEST_CASE("select_lambda is deterministic") {
    Rng rng(16);
    const DensityGrid g = random_grid(rng, 10);
    const TpsConfig cfg = make_tps_config(0.0, default_lambda_grid());
    CHECK(select_lambda(g, nullptr, cfg) == select_lambda(g, nullptr, cfg));
}

TEST_CASE("spectral csv layout") {
    SpectralField u;
    u.side = 2;
    u.coeffs.assign(4, 0.0);
    u.at(-1, 0) = {1.5, -2.0};
    const std::string csv = spectral_to_csv(u);
    CHECK(csv.substr(0, 11) == "k,l,re,im\n-");
    CHECK(csv.find("-1,0,1.5,-2\n") != std::string::npos);
    // lexicographic order: (-1,-1) before (-1,0) before (0,-1)
    CHECK(csv.find("-1,-1") < csv.find("-1,0"));
    CHECK(csv.find("-1,0") < csv.find("0,-1"));
}

TEST_CASE("tps config validation") {
    CHECK_THROWS_AS(make_tps_config(-1.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_tps_config(0.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(make_tps_config(0.0, {1.0, 0.5}), std::invalid_argument);
}
