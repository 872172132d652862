#pragma once

#include <complex>
#include <vector>

#include "ssr/core_model.hpp"

namespace ssr {

// Complex Fourier coefficients u_{k,l} on the signed frequency grid
// k, l in {-floor(M/2), ..., ceil(M/2)-1}, row-major in k.
struct SpectralField {
    int side = 0;
    std::vector<std::complex<double>> coeffs;

    int freq_min() const { return -(side / 2); }
    int freq_max() const { return side - 1 - side / 2; }
    const std::complex<double>& at(int k, int l) const {
        return coeffs[static_cast<std::size_t>(k - freq_min()) * side + (l - freq_min())];
    }
    std::complex<double>& at(int k, int l) {
        return coeffs[static_cast<std::size_t>(k - freq_min()) * side + (l - freq_min())];
    }
};

struct TpsConfig {
    double lambda = 0.0;
    std::vector<double> lambda_grid;
};

// 32 logarithmically spaced points in [1e-8, 1e2].
std::vector<double> default_lambda_grid();

TpsConfig make_tps_config(double lambda, std::vector<double> grid);

// DFT at the arc-center roots of unity: u_{k,l} = (1/M^2) sum_ab f(a,b)
// exp(-i k theta_a - i l theta_b) with theta_a = pi(2a+1)/M. The pair
// forward/inverse is exactly unitary; u_{0,0} is the grid mean.
SpectralField forward_transform(const DensityGrid& g);

// Inverse expansion; checks Hermitian symmetry (throws past 1e-6) and returns
// the real part.
DensityGrid inverse_transform(const SpectralField& u);

// Largest deviation from the real-signal symmetry u_{-k,-l} = conj(u_{k,l})
// over representable pairs (the even-M Nyquist row obeys the anti-periodic
// variant conj(u_{-M/2,-l}) = -u_{-M/2,l}, which is checked accordingly).
double hermitian_residual(const SpectralField& u);

// Thin-plate-spline penalty weight: 0 at DC, k^4 / l^4 on the axes,
// (k^2+l^2)^2 for mixed frequencies.
double tps_penalty_weight(int k, int l);

// Closed-form ridge shrinkage: each coefficient divided by 1 + lambda * w.
// This is the exact minimizer of |u_hat - u|^2 + lambda * w * |u|^2 per
// coefficient, so the DC term is untouched and symmetry is preserved.
SpectralField tps_filter(const SpectralField& u, double lambda);

// inverse(tps_filter(forward(masked), cfg.lambda)), negatives clamped to 0.
DensityGrid smooth_estimate(const DensityGrid& masked, const TpsConfig& cfg);

// Grid search for lambda. With ground truth (simulation mode) minimizes the
// squared distance between the smooth estimate and the truth; without it,
// minimizes a Stein-type unbiased-risk surrogate with the noise floor taken
// as the median coefficient power above the 90th-percentile frequency radius.
double select_lambda(const DensityGrid& masked, const DensityGrid* truth, const TpsConfig& cfg);

// CSV layout "k,l,re,im", one row per coefficient, (k, l) lexicographic.
std::string spectral_to_csv(const SpectralField& u);

}  // namespace ssr
