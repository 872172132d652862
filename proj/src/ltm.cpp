#include "ssr/ltm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssr/detail/nelder_mead.hpp"

namespace ssr {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEtaClamp = 10.0;

// Flattened view of a window's support pixels. All likelihood quantities are
// computed through this one path so the optimizer, the public evaluators and
// the reported fit values agree term for term.
struct Evaluator {
    std::vector<double> t1, t2, logrho, weight;
    double total_rho = 0.0;

    explicit Evaluator(const Window& w) {
        const std::size_t n = w.rho.size();
        t1.reserve(n);
        t2.reserve(n);
        logrho.reserve(n);
        weight.reserve(n);
        const double s = w.weighted_mass;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = w.rho[i];
            if (r <= 0.0) continue;
            t1.push_back(w.tstats[i][0]);
            t2.push_back(w.tstats[i][1]);
            logrho.push_back(std::log(r));
            weight.push_back(s > 0.0 ? w.counts[i] * r / s : 0.0);
            total_rho += r;
        }
    }

    bool empty() const { return t1.empty(); }

    double normalizer(double b1, double b2, double eta) const {
        double peak = -std::numeric_limits<double>::infinity();
        const std::size_t n = t1.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double lin = b1 * t1[i] + b2 * t2[i];
            const double e = logrho[i] + lin + eta * std::abs(lin);
            if (e > peak) peak = e;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lin = b1 * t1[i] + b2 * t2[i];
            acc += std::exp(logrho[i] + lin + eta * std::abs(lin) - peak);
        }
        return peak + std::log(acc);
    }

    double loglik(double b1, double b2, double eta) const {
        double peak = -std::numeric_limits<double>::infinity();
        const std::size_t n = t1.size();
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lin = b1 * t1[i] + b2 * t2[i];
            const double s = lin + eta * std::abs(lin);
            wsum += weight[i] * s;
            const double e = logrho[i] + s;
            if (e > peak) peak = e;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lin = b1 * t1[i] + b2 * t2[i];
            acc += std::exp(logrho[i] + lin + eta * std::abs(lin) - peak);
        }
        return wsum - (peak + std::log(acc));
    }
};

}  // namespace

Window make_window(std::array<int, 2> center, int half_width, int image_side,
                   std::vector<double> counts, std::vector<double> rho) {
    if (half_width < 0) throw std::invalid_argument("window half width must be >= 0");
    const int m = 2 * half_width + 1;
    if (image_side < m) throw std::invalid_argument("window larger than image");
    const std::size_t need = static_cast<std::size_t>(m) * m;
    if (counts.size() != need || rho.size() != need)
        throw std::invalid_argument("window arrays must be m*m");
    Window w;
    w.center = center;
    w.half_width = half_width;
    w.image_side = image_side;
    w.counts = std::move(counts);
    w.rho = std::move(rho);
    w.tstats.resize(need);
    double s = 0.0;
    for (int di = -half_width; di <= half_width; ++di) {
        for (int dj = -half_width; dj <= half_width; ++dj) {
            const std::size_t idx =
                static_cast<std::size_t>(di + half_width) * m + (dj + half_width);
            if (w.rho[idx] < 0.0) throw std::invalid_argument("rho must be nonnegative");
            if (w.counts[idx] < 0.0) throw std::invalid_argument("counts must be nonnegative");
            // Equals template_statistic(pixel_to_torus(center + d), pixel_to_torus(center));
            // computed from the offset so translated windows match bit for bit.
            w.tstats[idx] = {wrap_angle(2.0 * kPi * di / image_side),
                             wrap_angle(2.0 * kPi * dj / image_side)};
            s += w.counts[idx] * w.rho[idx];
        }
    }
    w.weighted_mass = s;
    return w;
}

Window window_from_histogram(const ImageHistogram& h, std::array<int, 2> center,
                             int half_width, const SupportFunction& support) {
    const int t = half_width;
    if (support.half_width() != t)
        throw std::invalid_argument("support window does not match half width");
    if (center[0] - t < 0 || center[1] - t < 0 || center[0] + t >= h.side ||
        center[1] + t >= h.side)
        throw std::invalid_argument("window does not fit inside the image");
    const int m = 2 * t + 1;
    std::vector<double> counts(static_cast<std::size_t>(m) * m);
    for (int di = -t; di <= t; ++di)
        for (int dj = -t; dj <= t; ++dj)
            counts[static_cast<std::size_t>(di + t) * m + (dj + t)] =
                h.at(center[0] + di, center[1] + dj);
    return make_window(center, t, h.side, std::move(counts), support.values);
}

double ltm_normalizer(const Window& w, const LtmParams& p) {
    Evaluator ev(w);
    if (ev.empty()) throw std::invalid_argument("degenerate support: rho vanishes");
    return ev.normalizer(p.beta[0], p.beta[1], p.eta);
}

double ltm_log_density(const TorusPoint& w, const TorusPoint& w0, const LtmParams& p,
                       double normalizer, double rho_at_w) {
    if (rho_at_w <= 0.0)
        throw std::invalid_argument("point lies outside the template support");
    const auto t = template_statistic(w, w0);
    const double lin = p.beta[0] * t[0] + p.beta[1] * t[1];
    return lin + p.eta * std::abs(lin) - normalizer + std::log(rho_at_w);
}

double weighted_loglik(const Window& w, const LtmParams& p) {
    if (w.weighted_mass <= 0.0)
        throw std::invalid_argument("window has zero weighted mass");
    Evaluator ev(w);
    if (ev.empty()) throw std::invalid_argument("degenerate support: rho vanishes");
    return ev.loglik(p.beta[0], p.beta[1], p.eta);
}

LtmFit fit_mle(const Window& w, bool eta_free) {
    if (w.weighted_mass <= 0.0)
        throw std::invalid_argument("window has zero weighted mass");
    Evaluator ev(w);
    if (ev.empty()) throw std::invalid_argument("degenerate support: rho vanishes");

    static const std::array<std::array<double, 2>, 5> beta_starts{
        {{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}};
    static const std::array<double, 3> eta_starts{0.0, 0.5, -0.5};

    detail::NmResult best;
    best.fx = std::numeric_limits<double>::infinity();
    if (eta_free) {
        const auto objective = [&](const std::vector<double>& x) {
            const double eta = std::clamp(x[2], -kEtaClamp, kEtaClamp);
            return -ev.loglik(x[0], x[1], eta);
        };
        for (const auto& b : beta_starts)
            for (double e : eta_starts) {
                auto r = detail::nelder_mead(objective, {b[0], b[1], e}, 0.5, 500, 1e-6);
                if (r.fx < best.fx) best = std::move(r);
            }
    } else {
        const auto objective = [&](const std::vector<double>& x) {
            return -ev.loglik(x[0], x[1], 0.0);
        };
        for (const auto& b : beta_starts) {
            auto r = detail::nelder_mead(objective, {b[0], b[1]}, 0.5, 500, 1e-6);
            if (r.fx < best.fx) best = std::move(r);
        }
    }

    LtmFit fit;
    fit.params.beta = {best.x[0], best.x[1]};
    bool at_clamp = false;
    if (eta_free) {
        fit.params.eta = std::clamp(best.x[2], -kEtaClamp, kEtaClamp);
        at_clamp = std::abs(fit.params.eta) >= kEtaClamp - 1e-6;
    }
    // eta is unidentified when the tilt vanishes; report the null value.
    if (std::hypot(fit.params.beta[0], fit.params.beta[1]) < 1e-6) fit.params.eta = 0.0;
    fit.normalizer = ev.normalizer(fit.params.beta[0], fit.params.beta[1], fit.params.eta);
    fit.loglik = ev.loglik(fit.params.beta[0], fit.params.beta[1], fit.params.eta);
    fit.iterations = best.iterations;
    fit.converged = best.converged && !at_clamp;
    return fit;
}

double effective_sample_size(const Window& w) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < w.counts.size(); ++i) {
        s1 += w.counts[i] * w.rho[i];
        s2 += w.counts[i] * w.rho[i] * w.rho[i];
    }
    return s2 > 0.0 ? s1 * s1 / s2 : 0.0;
}

double lrt_statistic(const LtmFit& free_fit, const LtmFit& pinned_fit, double effective_n) {
    return 2.0 * effective_n * (free_fit.loglik - pinned_fit.loglik);
}

double chi1_survival(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(0.5 * x));
}

double lrt_pvalue(const Window& w) {
    const LtmFit free_fit = fit_mle(w, true);
    const LtmFit pinned_fit = fit_mle(w, false);
    const double stat = lrt_statistic(free_fit, pinned_fit, effective_sample_size(w));
    if (stat <= 0.0) return 1.0;
    return std::clamp(chi1_survival(stat), 0.0, 1.0);
}

}  // namespace ssr
