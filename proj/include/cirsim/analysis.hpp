#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cirsim/model.hpp"
#include "cirsim/paths.hpp"
#include "cirsim/schemes.hpp"

namespace cirsim {

inline constexpr std::size_t kBootstrapResamples = 200;

struct BootstrapResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::vector<double> replicates;
};

// Nonparametric bootstrap of statistic(samples). Resample indices come from a
// counter-based stream keyed by `seed`, so the result is reproducible.
BootstrapResult bootstrap(std::span<const double> samples,
                          const std::function<double(std::span<const double>)>& statistic,
                          std::uint64_t seed, std::size_t resamples = kBootstrapResamples);

// (mean |x|^p)^{1/p}
double lp_norm(std::span<const double> samples, double p);
// Left-to-right sum / n.
double sample_mean(std::span<const double> samples);

// max over reference nodes of |reference(t) - interpolate_linear(coarse, t)|.
// The coarse grid must divide the reference grid.
double sup_error(const Trajectory& reference, const Trajectory& coarse);

struct ErrorReport {
    CirParams params;
    double p = 1.0;
    double h = 0.0;
    double h_ref = 0.0;
    std::size_t n_paths = 0;
    double sup_error_lp = 0.0;
    double std_error = 0.0;
    std::vector<double> bootstrap_replicates;
};

// Per-path sup errors for one coarse step, before reduction to an L^p norm.
struct SupErrorSamples {
    double h = 0.0;
    double h_ref = 0.0;
    std::vector<double> per_path;
};

// Simulates every path once on the h_ref grid and measures the sup error of
// the scheme driven by the coarsened increments, for every h in h_list.
// Each h / h_ref must be 2^j with j >= 1 and horizon / h_ref an integer.
std::vector<SupErrorSamples> sample_sup_errors(const CirParams& params, std::uint64_t seed,
                                               std::size_t n_paths, std::span<const double> h_list,
                                               double h_ref, double horizon = 1.0,
                                               unsigned threads = 1);

ErrorReport summarize_error(const CirParams& params, const SupErrorSamples& samples, double p,
                            std::uint64_t seed);

ErrorReport strong_error(const CirParams& params, std::uint64_t seed, std::size_t n_paths,
                         double h, double h_ref, double p, double horizon = 1.0,
                         unsigned threads = 1);

struct RateReport {
    std::vector<double> h;
    std::vector<double> errors;
    double fitted_slope = 0.0;
    double intercept = 0.0;
    // root mean square of the log-log residuals
    double residual = 0.0;
    // 1.96 bootstrap standard deviations of the slope; 0 without replicates
    double slope_confidence_halfwidth = 0.0;
};

// Least-squares fit of log(error) = intercept + slope log(h). `replicates`,
// when non-empty, holds one bootstrap replicate vector per h (equal lengths).
RateReport fit_rate(std::span<const double> h, std::span<const double> errors,
                    const std::vector<std::vector<double>>& replicates = {});

enum class PairPolicy { AllPairs, DyadicLags };

inline constexpr std::size_t kMaxAllPairsSteps = 1024;

std::string to_string(PairPolicy policy);
PairPolicy parse_pair_policy(const std::string& name);

struct HolderReport {
    double exponent_used = 0.0;
    double p = 0.0;
    PairPolicy pair_policy = PairPolicy::DyadicLags;
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_steps = 0;
};

// sup over the pair set of |v_i - v_j| / |t_i - t_j|^kappa for one path.
// DyadicLags uses the pairs whose index distance is a power of two.
double holder_seminorm(std::span<const double> values, double step, double kappa,
                       PairPolicy policy);

// L^p norm over paths of the pathwise Hoelder seminorm.
HolderReport holder_norm_estimate(std::span<const Trajectory> trajectories, double kappa, double p,
                                  PairPolicy policy);

// Admissible epsilon interval ((alpha - 1/2)^+ / (1 + 2 alpha), 2 alpha / (1 + 2 alpha)).
std::pair<double, double> drift_path_epsilon_range(double alpha);

// Hoelder norm of the drift path t -> Z_t - W_t at exponent
// 2 alpha / (1 + 2 alpha) - epsilon. brownian[i] holds node values of W for path i.
HolderReport drift_path_holder(std::span<const Trajectory> transformed,
                               std::span<const std::vector<double>> brownian, double alpha,
                               double epsilon, double p,
                               PairPolicy policy = PairPolicy::DyadicLags);

struct HolderLevel {
    std::size_t n_steps = 0;
    HolderReport process;     // Z
    HolderReport drift_path;  // Z - W
};

// Simulates the transformed process once per path on 2^max(levels) steps and
// evaluates both estimators on the subsampled grids 2^level.
std::vector<HolderLevel> holder_study(const TransformedModel& model, double z0, std::uint64_t seed,
                                      std::size_t n_paths, double horizon,
                                      std::span<const unsigned> levels, double kappa,
                                      double drift_epsilon, double p, PairPolicy policy,
                                      unsigned threads = 1);

struct MomentEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

// Sample mean of value^q with a bootstrap standard error. Negative q with a
// zero value throws NumericalError reporting the count.
MomentEstimate moment_estimate(std::span<const double> values, double q, std::uint64_t seed = 0);
MomentEstimate moment_estimate(std::span<const Trajectory> trajectories, double t, double q,
                               std::uint64_t seed = 0);

// Scheme values at the requested grid nodes, per node then per path, without
// storing whole trajectories.
std::vector<std::vector<double>> sample_nodes(const CirParams& params, std::uint64_t seed,
                                              std::size_t n_paths, const TimeGrid& grid,
                                              std::span<const std::size_t> nodes,
                                              unsigned threads = 1);

}  // namespace cirsim
