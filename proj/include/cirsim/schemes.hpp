#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cirsim/error.hpp"
#include "cirsim/model.hpp"
#include "cirsim/paths.hpp"

namespace cirsim {

enum class TrajectoryKind {
    Scheme,       // Y^h in state coordinates
    Transformed,  // Z in Lamperti coordinates
    Reference,    // fine-grid proxy for the exact process
};

struct Trajectory {
    TimeGrid grid{1.0, 1};
    std::vector<double> values;
    TrajectoryKind kind = TrajectoryKind::Scheme;
};

// Drift-implicit square-root Euler step for CIR, solved in closed form:
//   y' = [(b + sqrt(b^2 + (2 + gamma h)(delta - beta^2/4) h)) / (2 + gamma h)]^2,
//   b = sqrt(y) + beta dw / 2.
// Construct once per (params, h); step() does no validation.
class SqrtEulerStepper {
public:
    // Throws RegimeError when 4 delta <= beta^2 or 2 + gamma h <= 0.
    SqrtEulerStepper(const CirParams& params, double h);

    double step(double y, double dw) const {
        const double b = std::sqrt(y) + half_beta_ * dw;
        const double root = (b + std::sqrt(b * b + excess_)) / denom_;
        return root * root;
    }

    double h() const { return h_; }

private:
    double h_;
    double half_beta_;
    double denom_;   // 2 + gamma h
    double excess_;  // (2 + gamma h)(delta - beta^2/4) h
};

double implicit_sqrt_euler_step(const CirParams& params, double y, double dw, double h);

// Y_0 = x0 followed by repeated closed-form steps; grid.step() is the step size.
Trajectory simulate_cir_implicit(const CirParams& params, const TimeGrid& grid,
                                 std::span<const double> increments);

// Piecewise-linear interpolation between grid nodes. Throws for t outside [0, T].
double interpolate_linear(const Trajectory& traj, double t);

namespace detail {

[[noreturn]] void throw_bracket_failure(double target, double h, double lo, double hi);

// Root of the strictly increasing F(x) = x - h g(x) - target on (0, inf)
// with g(x) -> +inf as x -> 0.
template <class Drift>
double solve_implicit(const Drift& g, double target, double h, double floor) {
    auto F = [&](double x) { return x - h * g(x) - target; };
    const double tol = 1e-14 * (1.0 + std::abs(target));
    constexpr double kSmallest = 1e-300;
    constexpr double kLargest = 1e300;

    double start = std::max(target, floor);
    double f_start = F(start);
    if (std::abs(f_start) < tol) return start;
    double lo, hi, f_lo, f_hi;
    if (f_start < 0.0) {
        lo = start;
        f_lo = f_start;
        hi = 2.0 * start + 1.0;
        f_hi = F(hi);
        while (!(f_hi > 0.0)) {
            lo = hi;
            f_lo = f_hi;
            hi *= 2.0;
            if (hi > kLargest) throw_bracket_failure(target, h, lo, hi);
            f_hi = F(hi);
        }
    } else {
        hi = start;
        f_hi = f_start;
        lo = 0.5 * start;
        f_lo = F(lo);
        while (!(f_lo < 0.0)) {
            hi = lo;
            f_hi = f_lo;
            lo = lo > floor ? std::max(0.5 * lo, floor) : 0.5 * lo;
            if (lo < kSmallest) throw_bracket_failure(target, h, lo, hi);
            f_lo = F(lo);
        }
    }

    // Illinois-modified regula falsi; falls back to bisection whenever four
    // iterations fail to halve the bracket.
    int side = 0;
    double width = hi - lo;
    for (int iter = 0; iter < 400; ++iter) {
        bool bisect = false;
        if (iter > 0 && iter % 4 == 0) {
            bisect = hi - lo > 0.5 * width;
            width = hi - lo;
        }
        double x = bisect ? 0.5 * (lo + hi) : (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = F(x);
        if (std::abs(fx) < tol) return x;
        if (fx < 0.0) {
            lo = x;
            f_lo = fx;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if (side == 1) f_lo *= 0.5;
            side = 1;
        }
        if (!(hi > std::nextafter(lo, kLargest))) {
            // bracket collapsed to adjacent doubles
            const double a = std::abs(F(lo)), b = std::abs(F(hi));
            return a <= b ? lo : hi;
        }
    }
    throw_bracket_failure(target, h, lo, hi);
}

}  // namespace detail

// Drift-implicit Euler step for dZ = g(Z) dt + dW: the unique root z' > 0 of
//   F(z') = z' - h g(z') - (z + dw).
// Requires h < 1/L where L is a one-sided Lipschitz bound of g. z = 0 is
// accepted as an initial state.
template <class Drift>
double implicit_additive_step(const Drift& g, double L, double z, double dw, double h,
                              double floor = 1e-12) {
    if (!(h > 0.0)) throw ValidationError("step size must be positive");
    if (L > 0.0 && h >= 1.0 / L)
        throw RegimeError("implicit step needs h < 1/L (h = " + std::to_string(h) +
                          ", 1/L = " + std::to_string(1.0 / L) + ")");
    if (!(z >= 0.0)) throw ValidationError("implicit step needs z >= 0");
    if (!std::isfinite(z) || !std::isfinite(dw)) throw ValidationError("implicit step needs finite z and dw");
    return detail::solve_implicit(g, z + dw, h, floor);
}

// Bracket floor min(1e-12, sqrt(alpha h) / 10) for the transformed CIR drift.
double transformed_bracket_floor(const TransformedModel& model, double h);

// Same step specialized to the transformed CIR drift.
double implicit_additive_step(const TransformedModel& model, double z, double dw, double h);

Trajectory simulate_transformed(const TransformedModel& model, double z0, const TimeGrid& grid,
                                std::span<const double> increments);

// Columns t,value with 17 significant digits.
void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& traj);

}  // namespace cirsim
