#pragma once

#include "cirsim/model.hpp"

namespace cirsim {

// Growth constants of a scalar diffusion dX = mu(X) dt + sigma(X) dW:
//   mu(z) <= c1 + c2 z,  sigma(z)^2 <= 2 (c3 z + c4 z^2),
//   |mu(z)| <= c5 + c6 z^c7,  sigma(z) >= c8 sqrt(z) / (1 + c10 z^c9).
struct GrowthConstants {
    double c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
    double c6 = 0, c7 = 0, c8 = 0, c9 = 0, c10 = 0;
};

// The CIR instantiation: c1 = delta, c2 = gamma^-, c3 = beta^2/2, c5 = delta,
// c6 = gamma^+, c7 = 1, c8 = beta, the rest zero.
GrowthConstants cir_growth_constants(const CirParams& params);

// exp(t [1 + (q-2)^+ + 2c]) * e0, a ceiling for E[(1 + Z_t^2)^{q/2}] when
// z mu(z) <= c (1 + z^2) and e0 = E[(1 + Z_0^2)^{q/2}].
double positive_moment_bound_oracle(double q, double t, double c, double e0);

// For the transformed CIR drift, the smallest c with z g(z) <= c (1 + z^2).
double positive_moment_constant(const TransformedModel& model);

// Ceiling for ||X_t||_{L^p}: e^{t gamma^-} [x0 + t (delta + beta^2/2 (p-1)^+)].
double cir_moment_bound_oracle(const CirParams& params, double p, double t);

// Ceiling for
//   E[exp(rho~ (2-p)(alpha + (1-p)/2) int Z^{-p} - c~ rho (2-p) int Z^{c-p} - rho Z_t^{2-p})]
// given e0 = E[exp(-rho Z_0^{2-p})]. Requires 0 < p < min(1 + 2 alpha, 2) and
// 0 < rho~ < rho.
double exp_inverse_moment_bound_oracle(double alpha, double p, double rho, double rho_tilde,
                                       double t, double e0);

// Monte Carlo estimates of the two L^q norms on the right-hand side of the
// integrated inverse-moment bound.
struct InverseMomentTermNorms {
    // || Z_t^{2-p} + int_0^t c~ (2-p) Z_s^{c-p} ds ||_{L^q}
    double state_term = 0.0;
    // || exp(-rho Z_0^{2-p}) ||_{L^q}
    double initial_term = 0.0;
};

// Ceiling for || int_0^t Z_s^{-p} ds ||_{L^q}.
double integrated_inverse_moment_bound_oracle(double alpha, double p, double c, double c_tilde,
                                              double rho, double rho_tilde, double q, double t,
                                              const InverseMomentTermNorms& norms);

// The exponential moment functional
//   exp((1 + Z_t^2) e^{-kt} + int_0^t beta' (1 + Z_s^2) e^{-ks} ds),  k = 2(c+1) + beta',
// is bounded in expectation by E[exp(1 + Z_0^2)]; this returns that right-hand side.
double exp_moment_bound_oracle(double c, double beta_aux, double t, double e0);

// Discount e^{-(2(c+1) + beta') s} used in the functional above.
double exp_moment_weight(double c, double beta_aux, double s);

// Ceiling for || sqrt(X_t) - sqrt(X_s) ||_{L^p} with X_0 = x0 deterministic.
double sqrt_increment_bound_oracle(const CirParams& params, double p, double s, double t);

// E[X_t^{-p}] for X_0 = x0 > 0, 0 < p < 2 delta / beta^2, from the Laplace
// transform of the transition law:
//   (1/Gamma(p)) int_0^inf u^{p-1} (kappa u + 1)^{-nu} exp(-x0 u e^{-gamma t} / (kappa u + 1)) du,
//   kappa = beta^2 (1 - e^{-gamma t}) / (2 gamma).
double inverse_moment_exact_cir(const CirParams& params, double p, double t);

// E[X_t^q] for q in {0, 1, 2} from the closed-form mean and variance; NaN for
// other q.
double cir_exact_moment(const CirParams& params, double q, double t);

}  // namespace cirsim
