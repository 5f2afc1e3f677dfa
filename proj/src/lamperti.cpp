#include "cirsim/lamperti.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "cirsim/error.hpp"

namespace cirsim {

namespace {
constexpr double kLipschitzInflation = 1.05;
}

GeneralLamperti::GeneralLamperti(GeneralDiffusion diffusion, int resolution)
    : diffusion_(std::move(diffusion)) {
    if (!diffusion_.mu || !diffusion_.sigma || !diffusion_.sigmasq_deriv)
        throw ValidationError("general_lamperti: mu, sigma and (sigma^2)' are required");
    if (resolution < 2)
        throw ValidationError("general_lamperti: resolution must be >= 2");
    if (!(diffusion_.domain_cap > 0.0) || !std::isfinite(diffusion_.domain_cap))
        throw ValidationError("general_lamperti: domain_cap must be positive and finite");

    const double slope0 = diffusion_.sigmasq_deriv(0.0);
    const double mu0 = diffusion_.mu(0.0);
    if (!(slope0 > 0.0))
        throw RegimeError("general_lamperti: (sigma^2)'(0) must be positive");
    if (!(mu0 > 0.25 * slope0))
        throw RegimeError("general_lamperti: transform invalid, need mu(0) > (sigma^2)'(0)/4 (mu(0) = " +
                          std::to_string(mu0) + ", (sigma^2)'(0)/4 = " + std::to_string(0.25 * slope0) +
                          ")");

    const auto n = static_cast<std::size_t>(resolution);
    states_.resize(n + 1);
    transformed_.resize(n + 1);
    drift_table_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        // quadratic spacing so the region near the boundary is resolved
        const double s = static_cast<double>(i) / static_cast<double>(n);
        states_[i] = diffusion_.domain_cap * s * s;
    }
    transformed_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = states_[i + 1];
        if (!(diffusion_.sigma(x) > 0.0))
            throw ValidationError("general_lamperti: sigma must be positive away from zero (x = " +
                                  std::to_string(x) + ")");
        transformed_[i + 1] = transformed_[i] + segment_integral(states_[i], states_[i + 1]);
    }
    drift_table_[0] = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= n; ++i) drift_table_[i] = drift_at_state(states_[i]);

    double slope = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {
        const double dz = transformed_[i + 1] - transformed_[i];
        if (dz > 0.0) slope = std::max(slope, (drift_table_[i + 1] - drift_table_[i]) / dz);
    }
    lipschitz_L_ = std::max(slope, 0.0) * kLipschitzInflation;
}

double GeneralLamperti::segment_integral(double y_lo, double y_hi) const {
    const double root_slope = std::sqrt(diffusion_.sigmasq_deriv(0.0));
    // d/dw phi(w^2) = 2 w / sigma(w^2), which tends to 2 / sqrt((sigma^2)'(0)) at w = 0.
    auto integrand = [&](double w) {
        if (w <= 0.0) return 2.0 / root_slope;
        return 2.0 * w / diffusion_.sigma(w * w);
    };
    double err = 0.0;
    const double w_lo = std::sqrt(y_lo);
    const double w_hi = std::sqrt(y_hi);
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, w_lo, w_hi, 15, 1e-12, &err);
    if (!std::isfinite(value) || err > 1e-8 * (1.0 + std::abs(value)))
        throw NumericalError("general_lamperti: quadrature of 1/sigma did not converge on [" +
                             std::to_string(y_lo) + ", " + std::to_string(y_hi) + "]");
    return value;
}

double GeneralLamperti::phi(double y) const {
    if (!(y >= 0.0) || y > diffusion_.domain_cap)
        throw ValidationError("general_lamperti: phi evaluated outside [0, domain_cap]");
    auto it = std::upper_bound(states_.begin(), states_.end(), y);
    const auto i = static_cast<std::size_t>(std::distance(states_.begin(), it)) - 1;
    if (states_[i] == y) return transformed_[i];
    return transformed_[i] + segment_integral(states_[i], y);
}

double GeneralLamperti::phi_inverse(double z) const {
    if (!(z >= 0.0) || z > transformed_.back())
        throw ValidationError("general_lamperti: phi_inverse evaluated outside the tabulated range");
    if (z == 0.0) return 0.0;
    auto it = std::lower_bound(transformed_.begin(), transformed_.end(), z);
    const auto i = static_cast<std::size_t>(std::distance(transformed_.begin(), it));
    if (transformed_[i] == z) return states_[i];
    const double y_lo = states_[i - 1];
    const double base = transformed_[i - 1];
    // solve in w = sqrt(y), where phi(w^2) is smooth
    auto residual = [&](double w) { return base + segment_integral(y_lo, w * w) - z; };
    double a = std::sqrt(y_lo), b = std::sqrt(states_[i]);
    double fa = base - z, fb = transformed_[i] - z;
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        residual, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    const double w = 0.5 * (lo + hi);
    return w * w;
}

double GeneralLamperti::drift_at_state(double x) const {
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    return (diffusion_.mu(x) - 0.25 * diffusion_.sigmasq_deriv(x)) / diffusion_.sigma(x);
}

double GeneralLamperti::drift(double z) const {
    if (!(z > 0.0)) throw ValidationError("general_lamperti: drift needs z > 0");
    return drift_at_state(phi_inverse(z));
}

GeneralLamperti general_lamperti(const GeneralDiffusion& diffusion, int resolution) {
    return GeneralLamperti(diffusion, resolution);
}

}  // namespace cirsim
