#include "cirsim/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "cirsim/analysis.hpp"
#include "cirsim/error.hpp"
#include "cirsim/oracles.hpp"
#include "cirsim/parallel.hpp"
#include "cirsim/paths.hpp"
#include "cirsim/rng.hpp"
#include "cirsim/schemes.hpp"
#include "cirsim/seed.hpp"

namespace cirsim {

namespace {

constexpr double kZFloor = std::numeric_limits<double>::min();

std::size_t node_index(double t, double step) {
    const double r = t / step;
    const double k = std::round(r);
    if (!(t >= 0.0) || std::abs(r - k) > 1e-9 * std::max(1.0, k))
        throw ValidationError("bound check time " + std::to_string(t) + " is not a fine-grid node");
    return static_cast<std::size_t>(k);
}

std::string format_label(const char* fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), fmt, a, b, c);
    return buf;
}

double pos(double x) { return x > 0.0 ? x : 0.0; }

// c~ in alpha - c~ z^c <= z g(z) = alpha - gamma z^2 / 2.
double lower_growth_constant(const TransformedModel& model, double c) {
    if (model.gamma > 0.0 && c != 2.0)
        throw ValidationError("inverse-moment hypothesis needs c = 2 when gamma > 0");
    return 0.5 * pos(model.gamma);
}

struct PathValues {
    std::vector<double> lhs;
    std::vector<double> aux1;
    std::vector<double> aux2;
    std::vector<std::size_t> floored;
};

}  // namespace

std::string to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::PositiveMoment: return "positive_moment";
        case BoundKind::CirMoment: return "cir_moment";
        case BoundKind::ExpInverseMoment: return "exp_inverse_moment";
        case BoundKind::IntegratedInverseMoment: return "integrated_inverse_moment";
        case BoundKind::ExpMoment: return "exp_moment";
        case BoundKind::SqrtIncrement: return "sqrt_increment";
    }
    return "unknown";
}

std::vector<BoundCheck> bound_check_suite(const CirParams& params, std::uint64_t seed,
                                          std::size_t n_paths, double h_fine,
                                          std::span<const BoundSpec> specs, unsigned threads) {
    params.validate();
    if (n_paths < 2) throw ValidationError("bound checks need at least 2 paths");
    if (!(h_fine > 0.0)) throw ValidationError("h_fine must be positive");
    const TransformedModel model = TransformedModel::from(params);

    std::size_t n_steps = 1;
    for (const auto& spec : specs) {
        n_steps = std::max({n_steps, node_index(spec.t, h_fine), node_index(spec.s, h_fine)});
        switch (spec.kind) {
            case BoundKind::PositiveMoment:
                if (!(spec.q > 0.0)) throw ValidationError(spec.label + ": q must be positive");
                break;
            case BoundKind::CirMoment:
            case BoundKind::SqrtIncrement:
                if (!(spec.p > 0.0)) throw ValidationError(spec.label + ": p must be positive");
                break;
            case BoundKind::ExpInverseMoment:
            case BoundKind::IntegratedInverseMoment:
                // validates p, rho, rho~ and c against the hypotheses
                lower_growth_constant(model, spec.c);
                integrated_inverse_moment_bound_oracle(model.alpha, spec.p, spec.c, 0.0, spec.rho,
                                                       spec.rho_tilde, spec.q, 0.0, {});
                break;
            case BoundKind::ExpMoment:
                if (!(spec.beta_aux >= 0.0)) throw ValidationError(spec.label + ": beta_aux must be >= 0");
                break;
        }
    }
    const TimeGrid grid(static_cast<double>(n_steps) * h_fine, n_steps);
    const double h = grid.step();
    const double c_pos = positive_moment_constant(model);

    std::vector<PathValues> values(specs.size());
    for (auto& v : values) {
        v.lhs.resize(n_paths);
        v.aux1.resize(n_paths);
        v.aux2.resize(n_paths);
        v.floored.resize(n_paths);
    }

    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, grid);
        const Trajectory x = simulate_cir_implicit(params, grid, inc);
        std::vector<double> z(x.values.size());
        for (std::size_t k = 0; k < z.size(); ++k) z[k] = lamperti_phi(params, x.values[k]);

        for (std::size_t m = 0; m < specs.size(); ++m) {
            const BoundSpec& spec = specs[m];
            PathValues& out = values[m];
            const std::size_t kt = node_index(spec.t, h);
            const double zt = z[kt];
            switch (spec.kind) {
                case BoundKind::PositiveMoment:
                    out.lhs[i] = std::pow(1.0 + zt * zt, 0.5 * spec.q);
                    out.aux1[i] = std::pow(1.0 + z[0] * z[0], 0.5 * spec.q);
                    break;
                case BoundKind::CirMoment:
                    out.lhs[i] = x.values[kt];
                    break;
                case BoundKind::ExpInverseMoment:
                case BoundKind::IntegratedInverseMoment: {
                    const double p = spec.p;
                    const double c_tilde = lower_growth_constant(model, spec.c);
                    double inv = 0.0, grow = 0.0;
                    std::size_t floored = 0;
                    for (std::size_t k = 0; k < kt; ++k) {
                        double zk = z[k];
                        if (zk < kZFloor) {
                            zk = kZFloor;
                            ++floored;
                        }
                        inv += std::pow(zk, -p) * h;
                        grow += std::pow(zk, spec.c - p) * h;
                    }
                    out.floored[i] = floored;
                    const double zt_pow = std::pow(zt, 2.0 - p);
                    const double z0_pow = std::pow(z[0], 2.0 - p);
                    if (spec.kind == BoundKind::ExpInverseMoment) {
                        const double a = spec.rho_tilde * (2.0 - p) * (model.alpha + 0.5 * (1.0 - p));
                        const double b = c_tilde * spec.rho * (2.0 - p);
                        out.lhs[i] = std::exp(a * inv - b * grow - spec.rho * zt_pow);
                        out.aux1[i] = std::exp(-spec.rho * z0_pow);
                    } else {
                        out.lhs[i] = inv;
                        out.aux1[i] = zt_pow + c_tilde * (2.0 - p) * grow;
                        out.aux2[i] = std::exp(-spec.rho * z0_pow);
                    }
                    break;
                }
                case BoundKind::ExpMoment: {
                    double integral = 0.0;
                    for (std::size_t k = 0; k < kt; ++k)
                        integral += spec.beta_aux * (1.0 + z[k] * z[k]) *
                                    exp_moment_weight(c_pos, spec.beta_aux, grid.node(k)) * h;
                    out.lhs[i] = std::exp((1.0 + zt * zt) * exp_moment_weight(c_pos, spec.beta_aux, spec.t) +
                                          integral);
                    out.aux1[i] = std::exp(1.0 + z[0] * z[0]);
                    break;
                }
                case BoundKind::SqrtIncrement: {
                    const std::size_t ks = node_index(spec.s, h);
                    out.lhs[i] = std::sqrt(x.values[kt]) - std::sqrt(x.values[ks]);
                    break;
                }
            }
        }
    });

    std::vector<BoundCheck> checks;
    checks.reserve(specs.size());
    for (std::size_t m = 0; m < specs.size(); ++m) {
        const BoundSpec& spec = specs[m];
        const PathValues& v = values[m];
        const std::uint64_t boot_seed = mix_seed(seed, 1000 + m);
        auto mean_stat = [](std::span<const double> xs) { return sample_mean(xs); };
        auto norm_stat = [](double p) {
            return [p](std::span<const double> xs) { return lp_norm(xs, p); };
        };

        BoundCheck check;
        check.label = spec.label.empty() ? to_string(spec.kind) : spec.label;
        BootstrapResult boot;
        switch (spec.kind) {
            case BoundKind::PositiveMoment:
                boot = bootstrap(v.lhs, mean_stat, boot_seed);
                check.oracle_rhs = positive_moment_bound_oracle(spec.q, spec.t, c_pos, sample_mean(v.aux1));
                break;
            case BoundKind::CirMoment:
                boot = bootstrap(v.lhs, norm_stat(spec.p), boot_seed);
                check.oracle_rhs = cir_moment_bound_oracle(params, spec.p, spec.t);
                break;
            case BoundKind::ExpInverseMoment:
                boot = bootstrap(v.lhs, mean_stat, boot_seed);
                check.oracle_rhs = exp_inverse_moment_bound_oracle(model.alpha, spec.p, spec.rho,
                                                                   spec.rho_tilde, spec.t, sample_mean(v.aux1));
                break;
            case BoundKind::IntegratedInverseMoment: {
                boot = bootstrap(v.lhs, norm_stat(spec.q), boot_seed);
                const InverseMomentTermNorms norms{lp_norm(v.aux1, spec.q), lp_norm(v.aux2, spec.q)};
                check.oracle_rhs = integrated_inverse_moment_bound_oracle(
                    model.alpha, spec.p, spec.c, lower_growth_constant(model, spec.c), spec.rho,
                    spec.rho_tilde, spec.q, spec.t, norms);
                break;
            }
            case BoundKind::ExpMoment:
                boot = bootstrap(v.lhs, mean_stat, boot_seed);
                check.oracle_rhs = exp_moment_bound_oracle(c_pos, spec.beta_aux, spec.t, sample_mean(v.aux1));
                break;
            case BoundKind::SqrtIncrement:
                boot = bootstrap(v.lhs, norm_stat(spec.p), boot_seed);
                check.oracle_rhs = sqrt_increment_bound_oracle(params, spec.p, spec.s, spec.t);
                break;
        }
        check.mc_lhs = boot.estimate;
        check.std_error = boot.std_error;
        const bool at_origin = spec.t == 0.0 && (spec.kind != BoundKind::SqrtIncrement || spec.s == 0.0);
        check.slack_factor = at_origin ? 1.0 : kBoundSlack;
        check.se_multiplier = at_origin ? 0.0 : kBoundSeMultiplier;
        for (std::size_t f : v.floored) check.floored += f;
        check.pass = check.mc_lhs - check.se_multiplier * check.std_error <=
                     check.oracle_rhs * check.slack_factor;
        checks.push_back(std::move(check));
    }
    return checks;
}

std::vector<BoundSpec> default_bound_specs(const CirParams& params, std::uint64_t seed,
                                           double h_fine) {
    const double alpha = TransformedModel::from(params).alpha;
    if (!(alpha > 0.0)) throw RegimeError("bound suite needs 4*delta > beta^2");
    const double p_inv = 0.5 * (1.0 + std::min(1.0 + 2.0 * alpha, 2.0));

    std::vector<BoundSpec> specs;
    for (double t : {0.0, 1.0}) {
        for (double q : {2.0, 4.0}) {
            BoundSpec s{.kind = BoundKind::PositiveMoment, .label = {}, .t = t, .q = q};
            s.label = format_label("positive_moment q=%g t=%g", q, t);
            specs.push_back(s);
        }
        for (double p : {1.0, 2.0}) {
            BoundSpec s{.kind = BoundKind::CirMoment, .label = {}, .t = t, .p = p};
            s.label = format_label("cir_moment p=%g t=%g", p, t);
            specs.push_back(s);
        }
        {
            BoundSpec s{.kind = BoundKind::ExpInverseMoment, .label = {}, .t = t, .p = p_inv, .rho = 1.0, .rho_tilde = 0.5};
            s.label = format_label("exp_inverse_moment p=%g t=%g", p_inv, t);
            specs.push_back(s);
        }
        {
            BoundSpec s{.kind = BoundKind::IntegratedInverseMoment, .label = {}, .t = t, .q = 2.0, .p = p_inv,
                        .rho = 1.0, .rho_tilde = 0.5};
            s.label = format_label("integrated_inverse_moment p=%g q=2 t=%g", p_inv, t);
            specs.push_back(s);
        }
        {
            BoundSpec s{.kind = BoundKind::ExpMoment, .label = {}, .t = t, .beta_aux = 1.0};
            s.label = format_label("exp_moment beta'=1 t=%g", t);
            specs.push_back(s);
        }
    }
    {
        BoundSpec s{.kind = BoundKind::SqrtIncrement, .label = {}, .t = 0.0, .s = 0.0, .p = 2.0};
        s.label = "sqrt_increment p=2 s=0 t=0";
        specs.push_back(s);
    }
    const auto n = static_cast<std::uint64_t>(std::llround(1.0 / h_fine));
    const Philox4x32 philox(mix_seed(seed, 0x7061697273ULL));
    std::set<std::pair<std::uint64_t, std::uint64_t>> used;
    for (std::uint64_t draw = 0; used.size() < 10; ++draw) {
        const auto w = philox.words(draw, 0);
        std::uint64_t a = static_cast<std::uint64_t>((static_cast<unsigned __int128>(w[0]) * (n + 1)) >> 64);
        std::uint64_t b = static_cast<std::uint64_t>((static_cast<unsigned __int128>(w[1]) * (n + 1)) >> 64);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (!used.insert({a, b}).second) continue;
        BoundSpec s{.kind = BoundKind::SqrtIncrement, .label = {}, .t = static_cast<double>(b) * h_fine,
                    .s = static_cast<double>(a) * h_fine, .p = 2.0};
        s.label = format_label("sqrt_increment p=2 s=%.6g t=%.6g", s.s, s.t);
        specs.push_back(s);
    }
    return specs;
}

std::vector<CirParams> default_bound_parameter_sets() {
    return {
        CirParams{.delta = 0.375, .gamma = 1.0, .beta = 1.0, .x0 = 1.0},
        CirParams{.delta = 0.375, .gamma = 0.0, .beta = 1.0, .x0 = 1.0},
        CirParams{.delta = 0.5, .gamma = -0.5, .beta = 1.0, .x0 = 0.5},
    };
}

std::vector<BoundCheck> recursion_bound_check(const CirParams& params, std::uint64_t seed,
                                              std::size_t n_paths, double h, double h_ref,
                                              double horizon, unsigned threads) {
    const RegimeReport regime = classify_regime(params);
    if (!regime.theorem_applicable) throw RegimeError("recursion check needs 2*delta/beta^2 > 1/2");
    const TransformedModel model = TransformedModel::from(params);
    const double L = model.lipschitz_L();
    if (L > 0.0 && !(h < 1.0 / L)) throw RegimeError("recursion check needs h < 1/L");
    if (n_paths < 1) throw ValidationError("need at least one path");

    const auto n_fine = static_cast<std::size_t>(std::llround(horizon / h_ref));
    const auto factor = static_cast<std::size_t>(std::llround(h / h_ref));
    if (n_fine == 0 || factor < 1 || n_fine % factor != 0 ||
        std::abs(static_cast<double>(factor) * h_ref - h) > 1e-12 * h ||
        std::abs(static_cast<double>(n_fine) * h_ref - horizon) > 1e-12 * horizon)
        throw ValidationError("h must be an integer multiple of h_ref dividing the horizon");
    const TimeGrid fine(horizon, n_fine);
    const TimeGrid coarse = fine.coarsened(factor);
    const std::size_t n_coarse = coarse.n_steps();
    const double prefactor_base = 1.0 / (1.0 - coarse.step() * L);

    std::vector<std::vector<double>> lhs(n_paths, std::vector<double>(n_coarse + 1));
    std::vector<std::vector<double>> rhs(n_paths, std::vector<double>(n_coarse + 1));
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, fine);
        const Trajectory xr = simulate_cir_implicit(params, fine, inc);
        const Trajectory xc = simulate_cir_implicit(params, coarse, coarsen_increments(inc, factor));
        std::vector<double> g_ref(n_fine + 1);
        for (std::size_t j = 1; j <= n_fine; ++j) g_ref[j] = model.drift(lamperti_phi(params, xr.values[j]));
        double integral = 0.0;
        double prefactor = 1.0;
        for (std::size_t k = 0; k <= n_coarse; ++k) {
            if (k > 0) {
                const double g_ceil = g_ref[k * factor];
                for (std::size_t j = (k - 1) * factor + 1; j <= k * factor; ++j)
                    integral += std::abs(g_ref[j] - g_ceil) * fine.step();
                prefactor *= prefactor_base;
            }
            const double z_ref = lamperti_phi(params, xr.values[k * factor]);
            const double y = lamperti_phi(params, xc.values[k]);
            lhs[i][k] = std::abs(z_ref - y);
            rhs[i][k] = prefactor * integral;
        }
    });

    std::vector<BoundCheck> out(n_coarse + 1);
    for (std::size_t k = 0; k <= n_coarse; ++k) {
        BoundCheck& c = out[k];
        c.label = "node " + std::to_string(k);
        c.slack_factor = kRecursionSlack;
        double worst = -std::numeric_limits<double>::infinity();
        bool all_pass = true;
        for (std::size_t i = 0; i < n_paths; ++i) {
            const double margin = lhs[i][k] - kRecursionSlack * rhs[i][k];
            all_pass = all_pass && margin <= 0.0;
            if (margin > worst) {
                worst = margin;
                c.mc_lhs = lhs[i][k];
                c.oracle_rhs = rhs[i][k];
            }
        }
        c.pass = all_pass;
    }
    return out;
}

std::vector<SchemeMomentSup> scheme_moment_sup(const CirParams& params, std::uint64_t seed,
                                               std::size_t n_paths, std::span<const double> h_list,
                                               double q, double horizon, unsigned threads) {
    if (!(q >= 2.0)) throw ValidationError("scheme_moment_sup needs q >= 2");
    if (h_list.empty()) throw ValidationError("no step sizes given");
    if (n_paths < 2) throw ValidationError("need at least 2 paths");
    const double h_min = *std::min_element(h_list.begin(), h_list.end());
    const auto n_fine = static_cast<std::size_t>(std::llround(horizon / h_min));
    if (n_fine == 0 || std::abs(static_cast<double>(n_fine) * h_min - horizon) > 1e-12 * horizon)
        throw ValidationError("smallest step must divide the horizon");
    const TimeGrid fine(horizon, n_fine);
    std::vector<std::size_t> factors;
    for (double h : h_list) {
        const auto f = static_cast<std::size_t>(std::llround(h / h_min));
        if (f < 1 || (f & (f - 1)) != 0 || std::abs(static_cast<double>(f) * h_min - h) > 1e-12 * h ||
            n_fine % f != 0)
            throw ValidationError("step sizes must be power-of-two multiples of the smallest");
        SqrtEulerStepper(params, h);
        factors.push_back(f);
    }

    std::vector<std::vector<double>> sups(h_list.size(), std::vector<double>(n_paths));
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, fine);
        for (std::size_t l = 0; l < factors.size(); ++l) {
            const auto coarse_inc = factors[l] == 1 ? inc : coarsen_increments(inc, factors[l]);
            const Trajectory y = simulate_cir_implicit(params, fine.coarsened(factors[l]), coarse_inc);
            sups[l][i] = *std::max_element(y.values.begin(), y.values.end());
        }
    });

    std::vector<SchemeMomentSup> out(h_list.size());
    for (std::size_t l = 0; l < h_list.size(); ++l) {
        const auto boot = bootstrap(
            sups[l], [q](std::span<const double> xs) { return lp_norm(xs, q); }, mix_seed(seed, 77 + l));
        out[l] = {h_list[l], boot.estimate, boot.std_error};
    }
    return out;
}

}  // namespace cirsim
