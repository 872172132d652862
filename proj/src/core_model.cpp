#include "ssr/core_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssr {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

ImageHistogram make_histogram(int side, std::vector<double> counts) {
    if (side <= 0) throw std::invalid_argument("histogram side must be positive");
    if (counts.size() != static_cast<std::size_t>(side) * side)
        throw std::invalid_argument("histogram needs side*side counts");
    double total = 0.0;
    for (auto& c : counts) {
        if (!std::isfinite(c)) throw std::invalid_argument("histogram counts must be finite");
        if (c < 0.0) c = 0.0;
        total += c;
    }
    if (total <= 0.0) throw std::invalid_argument("histogram has zero total mass");
    return ImageHistogram{side, std::move(counts), total};
}

DensityGrid make_density_grid(int side, std::vector<double> values) {
    if (side <= 0) throw std::invalid_argument("grid side must be positive");
    if (values.size() != static_cast<std::size_t>(side) * side)
        throw std::invalid_argument("grid needs side*side values");
    return DensityGrid{side, std::move(values)};
}

DensityGrid zeros_like(int side) {
    return DensityGrid{side, std::vector<double>(static_cast<std::size_t>(side) * side, 0.0)};
}

DensityGrid empirical_density(const ImageHistogram& h) {
    if (h.total <= 0.0) throw std::invalid_argument("empty histogram");
    const double scale = static_cast<double>(h.pixel_count()) / h.total;
    DensityGrid g{h.side, std::vector<double>(h.counts.size())};
    for (std::size_t i = 0; i < h.counts.size(); ++i) g.values[i] = scale * h.counts[i];
    return g;
}

TorusPoint pixel_to_torus(int i, int j, int side) {
    if (side <= 0) throw std::out_of_range("grid side must be positive");
    if (i < 0 || j < 0 || i >= side || j >= side)
        throw std::out_of_range("pixel index (" + std::to_string(i) + ", " + std::to_string(j) +
                                ") outside " + std::to_string(side) + "x" + std::to_string(side));
    return TorusPoint{kPi * (2 * i + 1) / side, kPi * (2 * j + 1) / side};
}

double wrap_angle(double delta) {
    double x = std::fmod(delta, kTwoPi);
    if (x > kPi) x -= kTwoPi;
    if (x <= -kPi) x += kTwoPi;
    // x is now in (-pi, pi]; fold the pi boundary onto the negative side.
    if (x == kPi) x = std::nextafter(-kPi, 0.0);
    return x;
}

std::array<double, 2> template_statistic(const TorusPoint& w, const TorusPoint& w0) {
    return {wrap_angle(w.z_angle - w0.z_angle), wrap_angle(w.w_angle - w0.w_angle)};
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
    // |z1*conj(z2) - 1| = 2*|sin(delta/2)| per coordinate.
    const double dz = 2.0 * std::sin(0.5 * (a.z_angle - b.z_angle));
    const double dw = 2.0 * std::sin(0.5 * (a.w_angle - b.w_angle));
    return std::sqrt(dz * dz + dw * dw);
}

}  // namespace ssr
