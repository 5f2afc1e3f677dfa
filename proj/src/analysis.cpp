#include "cirsim/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "cirsim/error.hpp"
#include "cirsim/parallel.hpp"
#include "cirsim/rng.hpp"
#include "cirsim/seed.hpp"

namespace cirsim {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Integer ratio a / b when it is one (to 1e-9 relative), 0 otherwise.
std::size_t integer_ratio(double a, double b) {
    const double r = a / b;
    const double n = std::round(r);
    if (n < 1.0 || std::abs(r - n) > 1e-9 * n) return 0;
    return static_cast<std::size_t>(n);
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = sample_mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

double sample_mean(std::span<const double> samples) {
    if (samples.empty()) throw ValidationError("mean of an empty sample");
    double sum = 0.0;
    for (double x : samples) sum += x;
    return sum / static_cast<double>(samples.size());
}

double lp_norm(std::span<const double> samples, double p) {
    if (!(p > 0.0)) throw ValidationError("L^p norm needs p > 0");
    if (samples.empty()) throw ValidationError("L^p norm of an empty sample");
    double sum = 0.0;
    for (double x : samples) sum += std::pow(std::abs(x), p);
    return std::pow(sum / static_cast<double>(samples.size()), 1.0 / p);
}

BootstrapResult bootstrap(std::span<const double> samples,
                          const std::function<double(std::span<const double>)>& statistic,
                          std::uint64_t seed, std::size_t resamples) {
    if (samples.empty()) throw ValidationError("bootstrap of an empty sample");
    BootstrapResult out;
    out.estimate = statistic(samples);
    out.replicates.resize(resamples);
    const Philox4x32 philox(seed);
    const std::size_t n = samples.size();
    std::vector<double> draw(n);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t bits = philox.words(j, b)[0];
            const auto idx = static_cast<std::size_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
            draw[j] = samples[idx];
        }
        out.replicates[b] = statistic(draw);
    }
    out.std_error = sample_std(out.replicates);
    return out;
}

double sup_error(const Trajectory& reference, const Trajectory& coarse) {
    const std::size_t n_ref = reference.grid.n_steps();
    const std::size_t n_coarse = coarse.grid.n_steps();
    if (reference.grid.horizon() != coarse.grid.horizon() || n_ref % n_coarse != 0)
        throw ValidationError("sup_error: coarse grid must divide the reference grid");
    const std::size_t factor = n_ref / n_coarse;
    const auto& r = reference.values;
    const auto& c = coarse.values;
    double worst = 0.0;
    for (std::size_t j = 0; j <= n_ref; ++j) {
        const std::size_t k = j / factor;
        const std::size_t rem = j % factor;
        double interp = c[k];
        if (rem != 0) {
            const double w = static_cast<double>(rem) / static_cast<double>(factor);
            interp = (1.0 - w) * c[k] + w * c[k + 1];
        }
        worst = std::max(worst, std::abs(r[j] - interp));
    }
    return worst;
}

std::vector<SupErrorSamples> sample_sup_errors(const CirParams& params, std::uint64_t seed,
                                               std::size_t n_paths, std::span<const double> h_list,
                                               double h_ref, double horizon, unsigned threads) {
    params.validate();
    if (n_paths < 2) throw ValidationError("strong error needs at least 2 paths");
    if (h_list.empty()) throw ValidationError("no step sizes given");
    const std::size_t n_ref = integer_ratio(horizon, h_ref);
    if (n_ref == 0) throw ValidationError("horizon must be an integer multiple of h_ref");
    const TimeGrid fine(horizon, n_ref);

    std::vector<std::size_t> factors;
    std::vector<TimeGrid> grids;
    for (double h : h_list) {
        const std::size_t f = integer_ratio(h, h_ref);
        if (f < 2 || !is_power_of_two(f))
            throw ValidationError("h / h_ref must be 2^j with j >= 1 (h = " + std::to_string(h) + ")");
        if (n_ref % f != 0) throw ValidationError("h does not divide the horizon");
        if (params.gamma < 0.0 && !(h < 1.0 / (-2.0 * params.gamma)))
            throw RegimeError("rate experiments need h < 1/(2 gamma^-)");
        factors.push_back(f);
        grids.push_back(fine.coarsened(f));
        SqrtEulerStepper(params, fine.step() * static_cast<double>(f));  // validates the regime
    }

    std::vector<SupErrorSamples> out(h_list.size());
    for (std::size_t l = 0; l < h_list.size(); ++l) {
        out[l].h = h_list[l];
        out[l].h_ref = h_ref;
        out[l].per_path.resize(n_paths);
    }
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, fine);
        Trajectory ref = simulate_cir_implicit(params, fine, inc);
        ref.kind = TrajectoryKind::Reference;
        for (std::size_t l = 0; l < factors.size(); ++l) {
            const auto coarse_inc = coarsen_increments(inc, factors[l]);
            const Trajectory coarse = simulate_cir_implicit(params, grids[l], coarse_inc);
            out[l].per_path[i] = sup_error(ref, coarse);
        }
    });
    return out;
}

ErrorReport summarize_error(const CirParams& params, const SupErrorSamples& samples, double p,
                            std::uint64_t seed) {
    if (!(p >= 1.0)) throw ValidationError("strong error order p must be >= 1");
    ErrorReport r;
    r.params = params;
    r.p = p;
    r.h = samples.h;
    r.h_ref = samples.h_ref;
    r.n_paths = samples.per_path.size();
    const auto boot = bootstrap(
        samples.per_path, [p](std::span<const double> xs) { return lp_norm(xs, p); },
        mix_seed(seed, std::bit_cast<std::uint64_t>(samples.h) ^ std::bit_cast<std::uint64_t>(p)));
    r.sup_error_lp = boot.estimate;
    r.std_error = boot.std_error;
    r.bootstrap_replicates = boot.replicates;
    return r;
}

ErrorReport strong_error(const CirParams& params, std::uint64_t seed, std::size_t n_paths,
                         double h, double h_ref, double p, double horizon, unsigned threads) {
    const double hs[] = {h};
    const auto samples = sample_sup_errors(params, seed, n_paths, hs, h_ref, horizon, threads);
    return summarize_error(params, samples.front(), p, seed);
}

RateReport fit_rate(std::span<const double> h, std::span<const double> errors,
                    const std::vector<std::vector<double>>& replicates) {
    if (h.size() != errors.size()) throw ValidationError("fit_rate: size mismatch");
    if (h.size() < 2) throw ValidationError("fit_rate needs at least two step sizes");
    for (std::size_t i = 0; i < h.size(); ++i)
        if (!(h[i] > 0.0) || !(errors[i] > 0.0))
            throw ValidationError("fit_rate needs positive step sizes and errors");

    auto fit = [&](std::span<const double> ys, double& slope, double& intercept) {
        const auto n = static_cast<double>(h.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            mx += std::log(h[i]);
            my += std::log(ys[i]);
        }
        mx /= n;
        my /= n;
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double dx = std::log(h[i]) - mx;
            sxx += dx * dx;
            sxy += dx * (std::log(ys[i]) - my);
        }
        if (!(sxx > 0.0)) throw ValidationError("fit_rate: step sizes are all equal");
        slope = sxy / sxx;
        intercept = my - slope * mx;
    };

    RateReport r;
    r.h.assign(h.begin(), h.end());
    r.errors.assign(errors.begin(), errors.end());
    fit(errors, r.fitted_slope, r.intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double res = std::log(errors[i]) - (r.intercept + r.fitted_slope * std::log(h[i]));
        ss += res * res;
    }
    r.residual = std::sqrt(ss / static_cast<double>(h.size()));

    if (!replicates.empty()) {
        if (replicates.size() != h.size()) throw ValidationError("fit_rate: one replicate set per h");
        const std::size_t b_count = replicates.front().size();
        std::vector<double> slopes;
        std::vector<double> ys(h.size());
        for (std::size_t b = 0; b < b_count; ++b) {
            bool usable = true;
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (replicates[i].size() != b_count) throw ValidationError("fit_rate: ragged replicates");
                ys[i] = replicates[i][b];
                usable = usable && ys[i] > 0.0;
            }
            if (!usable) continue;
            double s = 0.0, c = 0.0;
            fit(ys, s, c);
            slopes.push_back(s);
        }
        r.slope_confidence_halfwidth = 1.96 * sample_std(slopes);
    }
    return r;
}

std::string to_string(PairPolicy policy) {
    return policy == PairPolicy::AllPairs ? "all_pairs" : "dyadic_lags";
}

PairPolicy parse_pair_policy(const std::string& name) {
    if (name == "all_pairs") return PairPolicy::AllPairs;
    if (name == "dyadic_lags") return PairPolicy::DyadicLags;
    throw ValidationError("unknown pair policy '" + name + "'");
}

double holder_seminorm(std::span<const double> values, double step, double kappa,
                       PairPolicy policy) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ValidationError("Hoelder exponent must lie in (0, 1)");
    if (values.size() < 2) return 0.0;
    const std::size_t n = values.size() - 1;
    double best = 0.0;
    auto scan_lag = [&](std::size_t lag) {
        const double denom = std::pow(static_cast<double>(lag) * step, kappa);
        double m = 0.0;
        for (std::size_t i = 0; i + lag <= n; ++i) m = std::max(m, std::abs(values[i + lag] - values[i]));
        best = std::max(best, m / denom);
    };
    if (policy == PairPolicy::AllPairs) {
        if (n > kMaxAllPairsSteps)
            throw ValidationError("all_pairs supports at most " + std::to_string(kMaxAllPairsSteps) +
                                  " steps; use dyadic_lags");
        for (std::size_t lag = 1; lag <= n; ++lag) scan_lag(lag);
    } else {
        for (std::size_t lag = 1; lag <= n; lag *= 2) scan_lag(lag);
    }
    return best;
}

namespace {

HolderReport holder_report_from(std::vector<double> per_path, double kappa, double p,
                                PairPolicy policy, std::size_t n_steps, std::uint64_t seed) {
    HolderReport r;
    r.exponent_used = kappa;
    r.p = p;
    r.pair_policy = policy;
    r.n_steps = n_steps;
    const auto boot = bootstrap(
        per_path, [p](std::span<const double> xs) { return lp_norm(xs, p); }, seed);
    r.estimate = boot.estimate;
    r.std_error = boot.std_error;
    return r;
}

}  // namespace

HolderReport holder_norm_estimate(std::span<const Trajectory> trajectories, double kappa, double p,
                                  PairPolicy policy) {
    if (trajectories.empty()) throw ValidationError("no trajectories");
    if (!(p > 0.0)) throw ValidationError("p must be positive");
    const TimeGrid& grid = trajectories.front().grid;
    std::vector<double> per_path(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        if (!(trajectories[i].grid == grid)) throw ValidationError("trajectories must share a grid");
        per_path[i] = holder_seminorm(trajectories[i].values, grid.step(), kappa, policy);
    }
    return holder_report_from(std::move(per_path), kappa, p, policy, grid.n_steps(),
                              mix_seed(0x686f6c646572ULL, grid.n_steps()));
}

std::pair<double, double> drift_path_epsilon_range(double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    const double lower = std::max(alpha - 0.5, 0.0) / (1.0 + 2.0 * alpha);
    const double upper = 2.0 * alpha / (1.0 + 2.0 * alpha);
    return {lower, upper};
}

namespace {

double drift_path_exponent(double alpha, double epsilon) {
    const auto [lower, upper] = drift_path_epsilon_range(alpha);
    if (!(epsilon > lower && epsilon < upper))
        throw ValidationError("epsilon = " + std::to_string(epsilon) + " outside the admissible interval (" +
                              std::to_string(lower) + ", " + std::to_string(upper) + ")");
    return upper - epsilon;
}

}  // namespace

HolderReport drift_path_holder(std::span<const Trajectory> transformed,
                               std::span<const std::vector<double>> brownian, double alpha,
                               double epsilon, double p, PairPolicy policy) {
    const double kappa = drift_path_exponent(alpha, epsilon);
    if (transformed.size() != brownian.size()) throw ValidationError("one Brownian path per trajectory");
    std::vector<Trajectory> drift_paths(transformed.size());
    for (std::size_t i = 0; i < transformed.size(); ++i) {
        const auto& z = transformed[i];
        if (brownian[i].size() != z.values.size()) throw ValidationError("Z and W must share grids");
        drift_paths[i] = Trajectory{z.grid, z.values, TrajectoryKind::Transformed};
        for (std::size_t k = 0; k < z.values.size(); ++k) drift_paths[i].values[k] -= brownian[i][k];
    }
    return holder_norm_estimate(drift_paths, kappa, p, policy);
}

std::vector<HolderLevel> holder_study(const TransformedModel& model, double z0, std::uint64_t seed,
                                      std::size_t n_paths, double horizon,
                                      std::span<const unsigned> levels, double kappa,
                                      double drift_epsilon, double p, PairPolicy policy,
                                      unsigned threads) {
    if (levels.empty()) throw ValidationError("no grid levels given");
    if (n_paths < 1) throw ValidationError("need at least one path");
    const double drift_kappa = drift_path_exponent(model.alpha, drift_epsilon);
    const unsigned top = *std::max_element(levels.begin(), levels.end());
    if (top > 24) throw ValidationError("grid level too large");
    const TimeGrid fine(horizon, std::size_t{1} << top);
    if (model.lipschitz_L() > 0.0 && fine.step() >= 1.0 / model.lipschitz_L())
        throw RegimeError("step too large for the one-sided Lipschitz bound");

    std::vector<std::vector<double>> z_norms(levels.size(), std::vector<double>(n_paths));
    std::vector<std::vector<double>> d_norms(levels.size(), std::vector<double>(n_paths));
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, fine);
        const Trajectory z = simulate_transformed(model, z0, fine, inc);
        const auto w = cumulative_path(inc);
        for (std::size_t l = 0; l < levels.size(); ++l) {
            const std::size_t stride = std::size_t{1} << (top - levels[l]);
            const std::size_t n = fine.n_steps() / stride;
            std::vector<double> zs(n + 1), ds(n + 1);
            for (std::size_t k = 0; k <= n; ++k) {
                zs[k] = z.values[k * stride];
                ds[k] = zs[k] - w[k * stride];
            }
            const double step = horizon / static_cast<double>(n);
            z_norms[l][i] = holder_seminorm(zs, step, kappa, policy);
            d_norms[l][i] = holder_seminorm(ds, step, drift_kappa, policy);
        }
    });

    std::vector<HolderLevel> out(levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const std::size_t n = std::size_t{1} << levels[l];
        out[l].n_steps = n;
        out[l].process = holder_report_from(std::move(z_norms[l]), kappa, p, policy, n, mix_seed(seed, 2 * l));
        out[l].drift_path =
            holder_report_from(std::move(d_norms[l]), drift_kappa, p, policy, n, mix_seed(seed, 2 * l + 1));
    }
    return out;
}

MomentEstimate moment_estimate(std::span<const double> values, double q, std::uint64_t seed) {
    if (values.empty()) throw ValidationError("moment of an empty sample");
    std::vector<double> powered(values.size());
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (q < 0.0 && !(values[i] > 0.0)) ++zeros;
        powered[i] = std::pow(values[i], q);
    }
    if (zeros > 0)
        throw NumericalError("negative moment of order " + std::to_string(q) + " hit " +
                             std::to_string(zeros) + " nonpositive values");
    const auto boot = bootstrap(
        powered, [](std::span<const double> xs) { return sample_mean(xs); },
        mix_seed(seed, std::bit_cast<std::uint64_t>(q)));
    return {boot.estimate, boot.std_error};
}

MomentEstimate moment_estimate(std::span<const Trajectory> trajectories, double t, double q,
                               std::uint64_t seed) {
    if (trajectories.empty()) throw ValidationError("no trajectories");
    const TimeGrid& grid = trajectories.front().grid;
    const std::size_t k = grid.floor_index(t);
    if (grid.node(k) != t) throw ValidationError("moment_estimate: t must be a grid node");
    std::vector<double> values(trajectories.size());
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
        if (!(trajectories[i].grid == grid)) throw ValidationError("trajectories must share a grid");
        values[i] = trajectories[i].values[k];
    }
    return moment_estimate(values, q, seed);
}

std::vector<std::vector<double>> sample_nodes(const CirParams& params, std::uint64_t seed,
                                              std::size_t n_paths, const TimeGrid& grid,
                                              std::span<const std::size_t> nodes, unsigned threads) {
    for (std::size_t k : nodes)
        if (k > grid.n_steps()) throw ValidationError("requested node beyond the grid");
    const SqrtEulerStepper stepper(params, grid.step());
    std::vector<std::vector<double>> out(nodes.size(), std::vector<double>(n_paths));
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, grid);
        double y = params.x0;
        for (std::size_t k = 0; k <= grid.n_steps(); ++k) {
            if (k > 0) y = stepper.step(y, inc[k - 1]);
            for (std::size_t m = 0; m < nodes.size(); ++m)
                if (nodes[m] == k) out[m][i] = y;
        }
    });
    return out;
}

}  // namespace cirsim
