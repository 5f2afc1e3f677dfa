#pragma once

#include <functional>
#include <vector>

namespace cirsim {

// Scalar square-root type diffusion dX = mu(X) dt + sigma(X) dW on [0, inf)
// with sigma(0) = 0.
struct GeneralDiffusion {
    std::function<double(double)> mu;
    std::function<double(double)> sigma;
    // (sigma * sigma)'
    std::function<double(double)> sigmasq_deriv;
    // Largest state for which the transform is tabulated.
    double domain_cap = 10.0;
};

// Numerical Lamperti transform phi(y) = int_0^y 1/sigma, its inverse, and the
// drift g(z) = ((mu - (sigma^2)'/4) / sigma)(phi^{-1}(z)) of the resulting
// additive-noise equation dZ = g(Z) dt + dW.
//
// phi is integrated in the variable w = sqrt(x), which removes the
// square-root singularity of 1/sigma at zero.
class GeneralLamperti {
public:
    // Throws RegimeError when mu(0) <= (sigma^2)'(0) / 4 or (sigma^2)'(0) <= 0,
    // NumericalError when the quadrature does not converge.
    GeneralLamperti(GeneralDiffusion diffusion, int resolution);

    double phi(double y) const;
    double phi_inverse(double z) const;
    double drift(double z) const;
    // [max finite-difference slope of g over the table]^+, inflated by 5%.
    double lipschitz_L() const { return lipschitz_L_; }

    // Tabulated states y_i, phi(y_i) and g(phi(y_i)); the first node is 0.
    const std::vector<double>& states() const { return states_; }
    const std::vector<double>& transformed() const { return transformed_; }
    const std::vector<double>& drift_table() const { return drift_table_; }

private:
    double segment_integral(double y_lo, double y_hi) const;
    double drift_at_state(double x) const;

    GeneralDiffusion diffusion_;
    std::vector<double> states_;
    std::vector<double> transformed_;
    std::vector<double> drift_table_;
    double lipschitz_L_ = 0.0;
};

GeneralLamperti general_lamperti(const GeneralDiffusion& diffusion, int resolution);

}  // namespace cirsim
