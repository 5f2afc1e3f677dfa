#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cirsim/model.hpp"

namespace cirsim {

enum class BoundKind {
    PositiveMoment,           // E[(1 + Z_t^2)^{q/2}]
    CirMoment,                // ||X_t||_{L^p}
    ExpInverseMoment,         // exponential inverse-moment functional
    IntegratedInverseMoment,  // ||int_0^t Z^{-p} ds||_{L^q}
    ExpMoment,                // exponential moment functional
    SqrtIncrement,            // ||sqrt(X_t) - sqrt(X_s)||_{L^p}
};

std::string to_string(BoundKind kind);

// One Monte Carlo vs. oracle comparison. Z is the Lamperti transform
// (2/beta) sqrt(X) with unit additive noise.
struct BoundSpec {
    BoundKind kind = BoundKind::PositiveMoment;
    std::string label;
    double t = 1.0;
    double s = 0.0;         // SqrtIncrement only
    double q = 2.0;         // PositiveMoment, IntegratedInverseMoment
    double p = 2.0;         // CirMoment, SqrtIncrement, inverse moments
    double rho = 1.0;       // inverse moments
    double rho_tilde = 0.5; // inverse moments
    double c = 2.0;         // exponent c in alpha - c~ z^c <= z g(z)
    double beta_aux = 1.0;  // ExpMoment
};

struct BoundCheck {
    std::string label;
    double mc_lhs = 0.0;
    double oracle_rhs = 0.0;
    double slack_factor = 1.0;
    double std_error = 0.0;
    double se_multiplier = 0.0;
    // Integrand evaluations where Z was raised to the positive floor.
    std::size_t floored = 0;
    // mc_lhs - se_multiplier * std_error <= oracle_rhs * slack_factor
    bool pass = false;
};

inline constexpr double kBoundSlack = 1.05;
inline constexpr double kBoundSeMultiplier = 3.0;
inline constexpr double kRecursionSlack = 1.10;

// Simulates n_paths fine trajectories (step h_fine, horizon = largest time in
// the specs) and evaluates every spec on them. Time integrals are left-endpoint
// sums on the fine grid. Checks at t = 0 (and s = t = 0) use slack 1 and no
// standard-error allowance.
std::vector<BoundCheck> bound_check_suite(const CirParams& params, std::uint64_t seed,
                                          std::size_t n_paths, double h_fine,
                                          std::span<const BoundSpec> specs, unsigned threads = 1);

// Default spec list for one parameter set: every bound at t = 0 and t = 1,
// plus ten random (s, t) node pairs for the square-root increment bound.
std::vector<BoundSpec> default_bound_specs(const CirParams& params, std::uint64_t seed,
                                           double h_fine);

// The three parameter sets of the default matrix.
std::vector<CirParams> default_bound_parameter_sets();

// Per coarse node k, checks in Lamperti coordinates that
//   |Z^ref_{t_k} - Y_{t_k}| <= (1/(1 - hL))^k int_0^{t_k} |g(Z^ref_s) - g(Z^ref_{ceil(s)})| ds
// with a 10% slack, where Z^ref is the scheme on h_ref and Y the scheme on h
// driven by the same Brownian path. The integral is the right-endpoint sum on
// the h_ref grid, matching the implicit quadrature of the reference. Each
// returned check reports the path with the worst margin at that node.
std::vector<BoundCheck> recursion_bound_check(const CirParams& params, std::uint64_t seed,
                                              std::size_t n_paths, double h, double h_ref,
                                              double horizon = 1.0, unsigned threads = 1);

struct SchemeMomentSup {
    double h = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
};

// ||max_n Y^h_n||_{L^q} for each h, all driven by the Brownian paths of the
// finest h in the list.
std::vector<SchemeMomentSup> scheme_moment_sup(const CirParams& params, std::uint64_t seed,
                                               std::size_t n_paths, std::span<const double> h_list,
                                               double q, double horizon = 1.0,
                                               unsigned threads = 1);

}  // namespace cirsim
