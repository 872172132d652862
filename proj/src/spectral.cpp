#include "ssr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "ssr/errors.hpp"

namespace ssr {

namespace {

constexpr double kPi = 3.14159265358979323846;

// exp(-i k theta_a) for all pixels a and signed frequencies k.
std::vector<std::complex<double>> axis_basis(int side) {
    std::vector<std::complex<double>> basis(static_cast<std::size_t>(side) * side);
    const int kmin = -(side / 2);
    for (int a = 0; a < side; ++a) {
        const double theta = kPi * (2 * a + 1) / side;
        for (int p = 0; p < side; ++p) {
            const double arg = -(kmin + p) * theta;
            basis[static_cast<std::size_t>(a) * side + p] = {std::cos(arg), std::sin(arg)};
        }
    }
    return basis;
}

}  // namespace

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(32);
    const double lo = std::log10(1e-8), hi = std::log10(1e2);
    for (int i = 0; i < 32; ++i) grid[i] = std::pow(10.0, lo + (hi - lo) * i / 31.0);
    return grid;
}

TpsConfig make_tps_config(double lambda, std::vector<double> grid) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    if (grid.empty()) throw std::invalid_argument("lambda grid must be nonempty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < 0.0) throw std::invalid_argument("lambda grid values must be >= 0");
        if (i > 0 && grid[i] <= grid[i - 1])
            throw std::invalid_argument("lambda grid must be strictly increasing");
    }
    return TpsConfig{lambda, std::move(grid)};
}

SpectralField forward_transform(const DensityGrid& g) {
    const int side = g.side;
    for (double v : g.values)
        if (!std::isfinite(v)) throw std::invalid_argument("grid values must be finite");
    const auto basis = axis_basis(side);
    // Separable: first contract rows (index a), then columns (index b).
    std::vector<std::complex<double>> half(static_cast<std::size_t>(side) * side);
    for (int p = 0; p < side; ++p) {
        for (int b = 0; b < side; ++b) {
            std::complex<double> acc = 0.0;
            for (int a = 0; a < side; ++a)
                acc += g.at(a, b) * basis[static_cast<std::size_t>(a) * side + p];
            half[static_cast<std::size_t>(p) * side + b] = acc;
        }
    }
    SpectralField u;
    u.side = side;
    u.coeffs.resize(static_cast<std::size_t>(side) * side);
    const double scale = 1.0 / (static_cast<double>(side) * side);
    for (int p = 0; p < side; ++p) {
        for (int q = 0; q < side; ++q) {
            std::complex<double> acc = 0.0;
            for (int b = 0; b < side; ++b)
                acc += half[static_cast<std::size_t>(p) * side + b] *
                       basis[static_cast<std::size_t>(b) * side + q];
            u.coeffs[static_cast<std::size_t>(p) * side + q] = acc * scale;
        }
    }
    return u;
}

double hermitian_residual(const SpectralField& u) {
    const int kmin = u.freq_min();
    const int kmax = u.freq_max();
    const auto in_range = [&](int f) { return f >= kmin && f <= kmax; };
    double worst = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        for (int l = kmin; l <= kmax; ++l) {
            const std::complex<double> v = u.at(k, l);
            const bool mk = in_range(-k), ml = in_range(-l);
            // The half-sample shift makes coefficients anti-periodic:
            // u_{k+M,l} = -u_{k,l}. Mirrors falling on the even-M Nyquist row
            // therefore flip sign instead of leaving the grid.
            if (mk && ml)
                worst = std::max(worst, std::abs(u.at(-k, -l) - std::conj(v)));
            else if (!mk && ml)
                worst = std::max(worst, std::abs(u.at(k, -l) + std::conj(v)));
            else if (mk && !ml)
                worst = std::max(worst, std::abs(u.at(-k, l) + std::conj(v)));
            else
                worst = std::max(worst, std::abs(u.at(k, l) - std::conj(v)));
        }
    }
    return worst;
}

DensityGrid inverse_transform(const SpectralField& u) {
    const int side = u.side;
    if (side <= 0 || u.coeffs.size() != static_cast<std::size_t>(side) * side)
        throw std::invalid_argument("malformed spectral field");
    const double residual = hermitian_residual(u);
    if (residual > 1e-6)
        throw numeric_error("spectral field breaks Hermitian symmetry by " +
                            std::to_string(residual));
    const auto basis = axis_basis(side);
    // Inverse uses the conjugate basis (exp(+i k theta_a)).
    std::vector<std::complex<double>> half(static_cast<std::size_t>(side) * side);
    for (int b = 0; b < side; ++b) {
        for (int p = 0; p < side; ++p) {
            std::complex<double> acc = 0.0;
            for (int q = 0; q < side; ++q)
                acc += u.coeffs[static_cast<std::size_t>(p) * side + q] *
                       std::conj(basis[static_cast<std::size_t>(b) * side + q]);
            half[static_cast<std::size_t>(b) * side + p] = acc;
        }
    }
    DensityGrid g = zeros_like(side);
    for (int a = 0; a < side; ++a) {
        for (int b = 0; b < side; ++b) {
            std::complex<double> acc = 0.0;
            for (int p = 0; p < side; ++p)
                acc += half[static_cast<std::size_t>(b) * side + p] *
                       std::conj(basis[static_cast<std::size_t>(a) * side + p]);
            g.at(a, b) = acc.real();
        }
    }
    return g;
}

double tps_penalty_weight(int k, int l) {
    if (k == 0 && l == 0) return 0.0;
    if (l == 0) return static_cast<double>(k) * k * k * k;
    if (k == 0) return static_cast<double>(l) * l * l * l;
    const double s = static_cast<double>(k) * k + static_cast<double>(l) * l;
    return s * s;
}

SpectralField tps_filter(const SpectralField& u, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
    SpectralField out = u;
    const int kmin = u.freq_min();
    const int kmax = u.freq_max();
    for (int k = kmin; k <= kmax; ++k)
        for (int l = kmin; l <= kmax; ++l)
            out.at(k, l) = u.at(k, l) / (1.0 + lambda * tps_penalty_weight(k, l));
    return out;
}

DensityGrid smooth_estimate(const DensityGrid& masked, const TpsConfig& cfg) {
    DensityGrid out = inverse_transform(tps_filter(forward_transform(masked), cfg.lambda));
    for (double& v : out.values) v = std::max(v, 0.0);
    return out;
}

namespace {

double truth_mse(const SpectralField& u, double lambda, const DensityGrid& truth) {
    DensityGrid est = inverse_transform(tps_filter(u, lambda));
    for (double& v : est.values) v = std::max(v, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < est.values.size(); ++i) {
        const double d = est.values[i] - truth.values[i];
        acc += d * d;
    }
    return acc;
}

double surrogate_risk(const SpectralField& u, double lambda, double sigma2) {
    const int kmin = u.freq_min();
    const int kmax = u.freq_max();
    double acc = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        for (int l = kmin; l <= kmax; ++l) {
            const double w = tps_penalty_weight(k, l);
            const double c = 1.0 / (1.0 + lambda * w);
            const double power = std::norm(u.at(k, l));
            acc += sigma2 * (c * c - 1.0) + power * (c - 1.0) * (c - 1.0);
        }
    }
    return acc;
}

double noise_floor(const SpectralField& u) {
    const int kmin = u.freq_min();
    const int kmax = u.freq_max();
    std::vector<std::pair<double, double>> by_radius;  // (radius, power)
    for (int k = kmin; k <= kmax; ++k)
        for (int l = kmin; l <= kmax; ++l) {
            if (k == 0 && l == 0) continue;
            by_radius.emplace_back(std::hypot(static_cast<double>(k), static_cast<double>(l)),
                                   std::norm(u.at(k, l)));
        }
    std::sort(by_radius.begin(), by_radius.end());
    const std::size_t start = static_cast<std::size_t>(0.9 * by_radius.size());
    std::vector<double> tail;
    for (std::size_t i = start; i < by_radius.size(); ++i) tail.push_back(by_radius[i].second);
    if (tail.empty()) return 0.0;
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    return tail[tail.size() / 2];
}

}  // namespace

std::string spectral_to_csv(const SpectralField& u) {
    std::string out = "k,l,re,im\n";
    char line[96];
    for (int k = u.freq_min(); k <= u.freq_max(); ++k)
        for (int l = u.freq_min(); l <= u.freq_max(); ++l) {
            const auto& c = u.at(k, l);
            std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g\n", k, l, c.real(), c.imag());
            out += line;
        }
    return out;
}

double select_lambda(const DensityGrid& masked, const DensityGrid* truth, const TpsConfig& cfg) {
    if (cfg.lambda_grid.empty()) throw std::invalid_argument("lambda grid must be nonempty");
    if (truth && truth->side != masked.side)
        throw std::invalid_argument("truth grid size mismatch");
    const SpectralField u = forward_transform(masked);
    const double sigma2 = truth ? 0.0 : noise_floor(u);
    double best_lambda = cfg.lambda_grid.front();
    double best_score = 0.0;
    bool first = true;
    for (double lam : cfg.lambda_grid) {
        const double score = truth ? truth_mse(u, lam, *truth) : surrogate_risk(u, lam, sigma2);
        if (first || score < best_score) {
            best_score = score;
            best_lambda = lam;
            first = false;
        }
    }
    return best_lambda;
}

}  // namespace ssr
