#include "cirsim/schemes.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "cirsim/csv.hpp"

namespace cirsim {

SqrtEulerStepper::SqrtEulerStepper(const CirParams& params, double h) : h_(h) {
    params.validate();
    if (!(4.0 * params.delta > params.beta * params.beta))
        throw RegimeError("square-root Euler scheme needs 4*delta > beta^2");
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("step size must be positive");
    denom_ = 2.0 + params.gamma * h;
    if (!(denom_ > 0.0))
        throw RegimeError("step size too large for mean reversion: need 2 + gamma*h > 0");
    half_beta_ = 0.5 * params.beta;
    excess_ = denom_ * (params.delta - 0.25 * params.beta * params.beta) * h;
}

double implicit_sqrt_euler_step(const CirParams& params, double y, double dw, double h) {
    if (!(y >= 0.0)) throw ValidationError("implicit_sqrt_euler_step: y must be >= 0");
    return SqrtEulerStepper(params, h).step(y, dw);
}

Trajectory simulate_cir_implicit(const CirParams& params, const TimeGrid& grid,
                                 std::span<const double> increments) {
    if (increments.size() != grid.n_steps())
        throw ValidationError("increment count does not match the grid");
    const SqrtEulerStepper stepper(params, grid.step());
    Trajectory traj{grid, std::vector<double>(grid.n_steps() + 1), TrajectoryKind::Scheme};
    traj.values[0] = params.x0;
    for (std::size_t k = 0; k < increments.size(); ++k)
        traj.values[k + 1] = stepper.step(traj.values[k], increments[k]);
    return traj;
}

double interpolate_linear(const Trajectory& traj, double t) {
    const TimeGrid& grid = traj.grid;
    if (!(t >= 0.0) || t > grid.horizon())
        throw ValidationError("interpolate_linear: t outside [0, T]");
    const std::size_t k = grid.floor_index(t);
    if (k == grid.n_steps()) return traj.values[k];
    const double t_k = grid.node(k);
    if (t == t_k) return traj.values[k];
    const double w = (t - t_k) / grid.step();
    return (1.0 - w) * traj.values[k] + w * traj.values[k + 1];
}

namespace detail {

void throw_bracket_failure(double target, double h, double lo, double hi) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "implicit step: root bracketing failed (z + dw = %.17g, h = %.17g, bracket [%.3g, %.3g])",
                  target, h, lo, hi);
    throw NumericalError(buf);
}

}  // namespace detail

double transformed_bracket_floor(const TransformedModel& model, double h) {
    return std::min(1e-12, std::sqrt(model.alpha * h) / 10.0);
}

double implicit_additive_step(const TransformedModel& model, double z, double dw, double h) {
    if (!(model.alpha > 0.0)) throw RegimeError("transformed drift needs alpha > 0");
    return implicit_additive_step([&](double x) { return model.drift(x); }, model.lipschitz_L(), z,
                                  dw, h, transformed_bracket_floor(model, h));
}

Trajectory simulate_transformed(const TransformedModel& model, double z0, const TimeGrid& grid,
                                std::span<const double> increments) {
    if (increments.size() != grid.n_steps())
        throw ValidationError("increment count does not match the grid");
    if (!(z0 >= 0.0)) throw ValidationError("z0 must be >= 0");
    Trajectory traj{grid, std::vector<double>(grid.n_steps() + 1), TrajectoryKind::Transformed};
    traj.values[0] = z0;
    for (std::size_t k = 0; k < increments.size(); ++k)
        traj.values[k + 1] = implicit_additive_step(model, traj.values[k], increments[k], grid.step());
    return traj;
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj) {
    std::ofstream os(file, std::ios::trunc);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    os << "t,value\n";
    for (std::size_t k = 0; k < traj.values.size(); ++k)
        os << format_double(traj.grid.node(k)) << ',' << format_double(traj.values[k]) << '\n';
    if (!os) throw IoError("write to " + file.string() + " failed");
}

}  // namespace cirsim
