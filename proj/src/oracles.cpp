#include "cirsim/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cirsim/error.hpp"

namespace cirsim {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

void require_time(double t) { require(t >= 0.0 && std::isfinite(t), "time must be finite and >= 0"); }

void check_inverse_moment_orders(double alpha, double p, double rho, double rho_tilde) {
    require(alpha > 0.0, "alpha must be positive");
    require(p > 0.0 && p < std::min(1.0 + 2.0 * alpha, 2.0), "p must lie in (0, min(1 + 2 alpha, 2))");
    require(rho_tilde > 0.0, "rho_tilde must be positive");
    if (!(rho_tilde < rho))
        throw ValidationError("parameter order violated: rho_tilde must be < rho");
}

// The exponent (t k rho^2 / 2) [k rho^2 / ((rho - rho~)(2 alpha + 1 - p))]^{(2p-2)/(2-p)}
// shared by both inverse-moment oracles (k = 1 and k = q).
double lyapunov_exponent(double alpha, double p, double rho, double rho_tilde, double t, double k) {
    const double ratio = k * rho * rho / ((rho - rho_tilde) * (2.0 * alpha + 1.0 - p));
    const double power = (2.0 * p - 2.0) / (2.0 - p);
    return 0.5 * t * k * rho * rho * std::pow(ratio, power);
}

}  // namespace

GrowthConstants cir_growth_constants(const CirParams& params) {
    params.validate();
    GrowthConstants g;
    g.c1 = params.delta;
    g.c2 = pos(-params.gamma);
    g.c3 = 0.5 * params.beta * params.beta;
    g.c5 = params.delta;
    g.c6 = pos(params.gamma);
    g.c7 = 1.0;
    g.c8 = params.beta;
    return g;
}

double positive_moment_bound_oracle(double q, double t, double c, double e0) {
    require(q > 0.0, "q must be positive");
    require_time(t);
    require(c >= 0.0, "c must be nonnegative");
    require(e0 >= 0.0, "e0 must be nonnegative");
    return std::exp(t * (1.0 + pos(q - 2.0) + 2.0 * c)) * e0;
}

double positive_moment_constant(const TransformedModel& model) {
    return std::max(model.alpha, 0.5 * pos(-model.gamma));
}

double cir_moment_bound_oracle(const CirParams& params, double p, double t) {
    require(p > 0.0, "p must be positive");
    require_time(t);
    const GrowthConstants g = cir_growth_constants(params);
    return std::exp(t * (g.c2 + g.c4 * pos(p - 1.0))) *
           (params.x0 + t * (g.c1 + g.c3 * pos(p - 1.0)));
}

double exp_inverse_moment_bound_oracle(double alpha, double p, double rho, double rho_tilde,
                                       double t, double e0) {
    check_inverse_moment_orders(alpha, p, rho, rho_tilde);
    require_time(t);
    return std::exp(lyapunov_exponent(alpha, p, rho, rho_tilde, t, 1.0)) * e0;
}

double integrated_inverse_moment_bound_oracle(double alpha, double p, double c, double c_tilde,
                                              double rho, double rho_tilde, double q, double t,
                                              const InverseMomentTermNorms& norms) {
    check_inverse_moment_orders(alpha, p, rho, rho_tilde);
    require(c >= p, "c must be >= p");
    require(c_tilde >= 0.0, "c_tilde must be nonnegative");
    require(q > 0.0, "q must be positive");
    require_time(t);
    const double lead =
        std::pow(2.0, std::max(1.0, 1.0 / q)) / (rho_tilde * (2.0 - p) * (2.0 * alpha + 1.0 - p));
    const double growth = std::expm1(lyapunov_exponent(alpha, p, rho, rho_tilde, t, q));
    return lead * (rho * norms.state_term + growth * norms.initial_term);
}

double exp_moment_bound_oracle(double c, double beta_aux, double t, double e0) {
    require(c >= 0.0 && beta_aux >= 0.0, "c and beta_aux must be nonnegative");
    require_time(t);
    return e0;
}

double exp_moment_weight(double c, double beta_aux, double s) {
    return std::exp(-(2.0 * (c + 1.0) + beta_aux) * s);
}

double sqrt_increment_bound_oracle(const CirParams& params, double p, double s, double t) {
    params.validate();
    require(p > 0.0, "p must be positive");
    require_time(s);
    require_time(t);
    const double d = params.delta;
    const double b2 = 0.5 * params.beta * params.beta;
    const double lag = std::abs(t - s);
    const double growth = 1.0 + params.x0 + std::min(s, t) * (d + b2 * pos(p - 1.0));
    const double drift = d + pos(params.gamma) * (1.0 + lag * (d + b2 * pos(0.5 * p - 1.0)));
    const double noise = params.beta * std::sqrt(std::max(p * (p - 1.0), 2.0)) *
                         std::sqrt(1.0 + 0.5 * (d + b2 * std::max(p - 1.0, 1.0)));
    return std::sqrt(lag) * growth * std::max(1.0, drift + noise);
}

double inverse_moment_exact_cir(const CirParams& params, double p, double t) {
    params.validate();
    require_time(t);
    require(p > 0.0, "p must be positive");
    require(params.x0 > 0.0, "inverse moments need x0 > 0");
    const double nu = params.feller_index();
    if (!(p < nu))
        throw RegimeError("inverse moment of order " + std::to_string(p) +
                          " diverges: need p < 2*delta/beta^2 = " + std::to_string(nu));

    const double gt = params.gamma * t;
    // kappa = beta^2 (1 - e^{-gamma t}) / (2 gamma), with the gamma -> 0 limit beta^2 t / 2.
    const double kappa = std::abs(gt) < 1e-8
                             ? 0.5 * params.beta * params.beta * t
                             : -0.5 * params.beta * params.beta * std::expm1(-gt) / params.gamma;
    const double shrink = params.x0 * std::exp(-gt);

    // u in (0, 1]
    auto head = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double denom = kappa * u + 1.0;
        return std::exp((p - 1.0) * std::log(u) - nu * std::log(denom) - shrink * u / denom);
    };
    // u = 1/w in [1, inf): u^{p-1} (kappa/w + 1)^{-nu} ... / w^2
    auto tail = [&](double w) {
        if (w <= 0.0) return 0.0;
        const double denom = kappa + w;
        return std::exp((nu - p - 1.0) * std::log(w) - nu * std::log(denom) - shrink / denom);
    };

    boost::math::quadrature::tanh_sinh<double> integrator;
    double err_head = 0.0, err_tail = 0.0;
    const double tol = 1e-12;
    const double a = integrator.integrate(head, 0.0, 1.0, tol, &err_head);
    const double b = integrator.integrate(tail, 0.0, 1.0, tol, &err_tail);
    const double total = a + b;
    const double err = err_head + err_tail;
    if (!std::isfinite(total) || err > std::max(1e-10, 1e-10 * std::abs(total)))
        throw NumericalError("inverse moment quadrature did not converge (error estimate " +
                             std::to_string(err) + ")");
    return total / std::tgamma(p);
}

double cir_exact_moment(const CirParams& params, double q, double t) {
    params.validate();
    require_time(t);
    if (q == 0.0) return 1.0;
    const double gt = params.gamma * t;
    // (1 - e^{-gamma t}) / gamma
    const double a = std::abs(gt) < 1e-8 ? t * (1.0 - 0.5 * gt) : -std::expm1(-gt) / params.gamma;
    const double decay = std::exp(-gt);
    const double mean = params.x0 * decay + params.delta * a;
    if (q == 1.0) return mean;
    if (q == 2.0) {
        const double b2 = params.beta * params.beta;
        const double var = params.x0 * b2 * decay * a + 0.5 * params.delta * b2 * a * a;
        return var + mean * mean;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace cirsim
