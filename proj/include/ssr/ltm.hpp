#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ssr/core_model.hpp"
#include "ssr/partition.hpp"

namespace ssr {

// Parameters of the local template density
//   p(w) ~ rho(w) * exp(beta'T(w w0^-1) + eta*|beta'T(w w0^-1)|).
// The |.| term puts a ridge along the line beta'T = 0; eta != 0 is the edge.
struct LtmParams {
    std::array<double, 2> beta{0.0, 0.0};
    double eta = 0.0;
};

struct LtmFit {
    LtmParams params;
    double normalizer = 0.0;      // d(beta, eta)
    double loglik = 0.0;          // weighted log likelihood at params
    bool converged = false;
    int iterations = 0;
};

// A histogram restriction to an m x m window (m = 2t+1) around a center
// pixel, together with the support weights and the per-pixel template
// statistics. The statistics depend only on the pixel offset from the center,
// so translated windows fit identically.
struct Window {
    std::array<int, 2> center{0, 0};
    int half_width = 0;
    int image_side = 0;                         // ambient M; sets the angular pitch
    std::vector<double> counts;                 // m*m, row-major
    std::vector<double> rho;                    // m*m, row-major
    std::vector<std::array<double, 2>> tstats;  // T(w_i w0^-1) per window pixel
    double weighted_mass = 0.0;                 // S = sum Y * rho

    int size() const { return 2 * half_width + 1; }
};

// Window over raw arrays; counts and rho are m*m and row-major. Validates
// shapes and nonnegativity; a zero weighted mass is allowed here (scan flags
// such windows) but rejected by the fitting routines.
Window make_window(std::array<int, 2> center, int half_width, int image_side,
                   std::vector<double> counts, std::vector<double> rho);

// Restriction of a histogram around `center`; the window must fit inside.
Window window_from_histogram(const ImageHistogram& h, std::array<int, 2> center,
                             int half_width, const SupportFunction& support);

// log sum_i rho_i exp(beta'T_i + eta|beta'T_i|), the normalizer d(beta, eta).
// Throws if rho vanishes identically.
double ltm_normalizer(const Window& w, const LtmParams& p);

// Log density at w relative to center w0: beta'T + eta|beta'T| - d + log(rho).
// rho_at_w must be positive (the point must lie in the support).
double ltm_log_density(const TorusPoint& w, const TorusPoint& w0, const LtmParams& p,
                       double normalizer, double rho_at_w);

// sum_i (beta'T_i + eta|beta'T_i|) * Y_i rho_i / S - d(beta, eta); the
// additive constant of the multinomial likelihood is dropped. Requires S > 0.
double weighted_loglik(const Window& w, const LtmParams& p);

// Maximizes the weighted log likelihood by multistart simplex descent over
// (beta, eta), or over beta alone with eta pinned to zero. eta is clamped to
// [-10, 10] during the search; a fit stuck at the clamp reports
// converged = false. With ||beta|| < 1e-6 the template is support-uniform and
// eta unidentified, so eta is reported as zero.
LtmFit fit_mle(const Window& w, bool eta_free);

// Effective sample size of the weighted likelihood: (sum Y rho)^2 / sum Y rho^2
// (Kish). Equals the plain weighted mass S for constant rho. Rescaling the LRT
// by S alone is only valid for flat weights; the score variance carries rho^2
// where the curvature carries rho, and this quotient restores the match.
double effective_sample_size(const Window& w);

// Likelihood ratio test of eta = 0. The normalized log likelihood difference
// is rescaled by the effective sample size and referred to the chi-square(1)
// tail; see lrt_statistic. Returns 1 when the free fit is numerically no
// better than the pinned one.
double lrt_pvalue(const Window& w);

// 2*n_eff*(loglik_free - loglik_pinned), the scaled LRT statistic.
double lrt_statistic(const LtmFit& free_fit, const LtmFit& pinned_fit, double effective_n);

// Survival function of the chi-square distribution with one degree of freedom.
double chi1_survival(double x);

}  // namespace ssr
