#include "cirsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cirsim/error.hpp"

namespace cirsim {

void CirParams::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ValidationError("beta must be positive and finite, got " + std::to_string(beta));
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw ValidationError("delta must be nonnegative and finite, got " + std::to_string(delta));
    if (!std::isfinite(gamma))
        throw ValidationError("gamma must be finite");
    if (!(x0 >= 0.0) || !std::isfinite(x0))
        throw ValidationError("x0 must be nonnegative and finite, got " + std::to_string(x0));
}

RegimeReport classify_regime(const CirParams& params) {
    params.validate();
    RegimeReport r;
    r.feller_index = params.feller_index();
    r.boundary_accessible = r.feller_index < 1.0;
    r.alpha = r.feller_index - 0.5;
    r.scheme_applicable = 4.0 * params.delta > params.beta * params.beta;
    r.theorem_applicable = r.feller_index > 0.5;
    if (params.gamma < 0.0)
        r.max_step_reversion = 2.0 / (-params.gamma);
    return r;
}

double theoretical_rate(const CirParams& params, double p) {
    params.validate();
    if (!(p >= 1.0))
        throw ValidationError("moment order p must be >= 1");
    const double nu = params.feller_index();
    if (!(nu > 0.5))
        throw RegimeError("strong rate requires 2*delta/beta^2 > 1/2, got " + std::to_string(nu));
    return (std::min(nu, 1.0) - 0.5) / p;
}

double lamperti_phi(const CirParams& params, double x) {
    if (!(x >= 0.0))
        throw ValidationError("lamperti_phi: state must be >= 0");
    return 2.0 / params.beta * std::sqrt(x);
}

double lamperti_inv(const CirParams& params, double z) {
    const double half = 0.5 * params.beta * z;
    return half * half;
}

TransformedModel TransformedModel::from(const CirParams& params) {
    params.validate();
    return {params.alpha(), params.gamma};
}

double transformed_drift(const TransformedModel& model, double z) {
    if (!(z > 0.0))
        throw ValidationError("transformed_drift: z must be > 0");
    return model.drift(z);
}

}  // namespace cirsim
