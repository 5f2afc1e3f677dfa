#pragma once

#include <limits>

namespace cirsim {

// dX_t = (delta - gamma X_t) dt + beta sqrt(X_t) dW_t,  X_0 = x0.
struct CirParams {
    double delta = 0.0;
    double gamma = 0.0;
    double beta = 1.0;
    double x0 = 0.0;

    // Throws ValidationError naming the offending field.
    void validate() const;

    double feller_index() const { return 2.0 * delta / (beta * beta); }
    // Drift constant of the transformed process, feller_index - 1/2.
    double alpha() const { return feller_index() - 0.5; }
};

struct RegimeReport {
    double feller_index = 0.0;
    bool boundary_accessible = false;
    double alpha = 0.0;
    // 4 delta > beta^2, i.e. alpha > 0.
    bool scheme_applicable = false;
    // feller_index > 1/2.
    bool theorem_applicable = false;
    // 2 / gamma^-, infinite for gamma >= 0.
    double max_step_reversion = std::numeric_limits<double>::infinity();
};

RegimeReport classify_regime(const CirParams& params);

// Limit eps -> 0 of the strong L^p rate exponent ((nu ^ 1) - 1/2) / p.
// Throws RegimeError when nu <= 1/2 and ValidationError when p < 1.
double theoretical_rate(const CirParams& params, double p);

// phi(x) = (2/beta) sqrt(x) and its inverse beta^2 z^2 / 4.
double lamperti_phi(const CirParams& params, double x);
double lamperti_inv(const CirParams& params, double z);

// Additive-noise form of the CIR process after the Lamperti map:
//   dZ_t = g(Z_t) dt + dW_t,   g(z) = alpha / z - gamma z / 2.
struct TransformedModel {
    double alpha = 0.0;
    double gamma = 0.0;

    static TransformedModel from(const CirParams& params);

    // One-sided Lipschitz constant [sup g']^+ = (-gamma/2)^+.
    double lipschitz_L() const { return gamma < 0.0 ? -0.5 * gamma : 0.0; }
    double drift(double z) const { return alpha / z - 0.5 * gamma * z; }
};

// Throws ValidationError for z <= 0.
double transformed_drift(const TransformedModel& model, double z);

}  // namespace cirsim
