#include "cirsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "cirsim/bounds.hpp"
#include "cirsim/csv.hpp"
#include "cirsim/error.hpp"
#include "cirsim/oracles.hpp"
#include "cirsim/paths.hpp"
#include "cirsim/schemes.hpp"
#include "cirsim/seed.hpp"

namespace cirsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Number of steps of size h covering span exactly; throws unless span / h is a
// positive integer up to rounding.
std::size_t exact_steps(double span, double h, const std::string& what) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError(what + ": step must be positive");
    const double r = span / h;
    const double n = std::round(r);
    if (!(n >= 1.0) || std::abs(r - n) > 1e-9 * n)
        throw ValidationError(what + ": " + format_double(span) + " is not a multiple of step " +
                              format_double(h));
    return static_cast<std::size_t>(n);
}

std::size_t node_of(double t, double h) {
    if (!(t >= 0.0)) throw ValidationError("moment time must be >= 0");
    return t == 0.0 ? 0 : exact_steps(t, h, "moment time");
}

double min_step(const ExperimentConfig& c) {
    if (c.h_list.empty()) throw ValidationError("h_list must not be empty");
    return *std::min_element(c.h_list.begin(), c.h_list.end());
}

void check_h_list(const ExperimentConfig& c) {
    if (c.h_list.empty()) throw ValidationError("h_list must not be empty");
    for (std::size_t i = 0; i < c.h_list.size(); ++i) {
        if (!(c.h_list[i] > 0.0)) throw ValidationError("h_list entries must be positive");
        if (i > 0 && !(c.h_list[i] < c.h_list[i - 1]))
            throw ValidationError("h_list must be strictly descending");
        exact_steps(c.horizon, c.h_list[i], "h_list");
    }
}

void check_scheme_regime(const CirParams& params) {
    if (!classify_regime(params).scheme_applicable)
        throw RegimeError("square-root scheme requires 4*delta > beta^2");
}

template <class T>
T get_as(const json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("config key '" + key + "': " + e.what());
    }
}

json report_json(const RegimeReport& r) {
    json j;
    j["feller_index"] = r.feller_index;
    j["boundary_accessible"] = r.boundary_accessible;
    j["alpha"] = r.alpha;
    j["scheme_applicable"] = r.scheme_applicable;
    j["theorem_applicable"] = r.theorem_applicable;
    j["max_step_reversion"] = std::isfinite(r.max_step_reversion) ? json(r.max_step_reversion) : json(nullptr);
    return j;
}

// Files written by one run; removed again if the run fails.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& contents) {
        const fs::path file = dir_ / name;
        written_.push_back(name);
        std::ofstream os(file, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + file.string() + " for writing");
        os << contents;
        os.close();
        if (!os) throw IoError("failed writing " + file.string());
    }

    void track(const std::string& name) { written_.push_back(name); }

    void remove_all() noexcept {
        for (const auto& name : written_) {
            std::error_code ec;
            fs::remove(dir_ / name, ec);
        }
        written_.clear();
    }

    const std::vector<std::string>& names() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

std::string csv_bool(bool b) { return b ? "true" : "false"; }

void run_classify(const ExperimentConfig& c, OutputSet& files, std::ostream& out) {
    const json j = report_json(classify_regime(c.params));
    out << j.dump(2) << "\n";
    files.write("classify.json", j.dump(2) + "\n");
}

void run_simulate(const ExperimentConfig& c, OutputSet& files) {
    const double h = min_step(c);
    const TimeGrid grid(c.horizon, exact_steps(c.horizon, h, "simulate"));
    for (std::size_t i = 0; i < c.n_trajectories; ++i) {
        const auto inc = generate_increments(c.seed, i, grid);
        const std::string name = "trajectory_" + std::to_string(i) + ".csv";
        files.track(name);
        write_trajectory_csv(c.output_dir / name, simulate_cir_implicit(c.params, grid, inc));
    }
}

void run_rate(const ExperimentConfig& c, OutputSet& files) {
    const double h_ref = c.effective_h_ref();
    const auto samples = sample_sup_errors(c.params, c.seed, c.n_paths, c.h_list, h_ref, c.horizon, c.threads);

    json summary;
    summary["h_ref"] = h_ref;
    summary["n_paths"] = c.n_paths;
    summary["fits"] = json::array();
    for (std::size_t ip = 0; ip < c.p_list.size(); ++ip) {
        const double p = c.p_list[ip];
        std::vector<double> errors, ses;
        std::vector<std::vector<double>> replicates;
        for (const auto& s : samples) {
            const ErrorReport r = summarize_error(c.params, s, p, c.seed);
            errors.push_back(r.sup_error_lp);
            ses.push_back(r.std_error);
            replicates.push_back(r.bootstrap_replicates);
        }
        const RateReport fit = fit_rate(c.h_list, errors, replicates);
        if (ip == 0) {
            std::ostringstream os;
            os << "h,error,se\n";
            for (std::size_t l = 0; l < errors.size(); ++l)
                os << format_double(c.h_list[l]) << ',' << format_double(errors[l]) << ','
                   << format_double(ses[l]) << '\n';
            files.write("rate.csv", os.str());
            summary["p"] = p;
            summary["fitted_slope"] = fit.fitted_slope;
            summary["theoretical_rate"] = theoretical_rate(c.params, p);
        }
        summary["fits"].push_back({{"p", p},
                                   {"h", c.h_list},
                                   {"errors", errors},
                                   {"std_errors", ses},
                                   {"fitted_slope", fit.fitted_slope},
                                   {"intercept", fit.intercept},
                                   {"residual", fit.residual},
                                   {"slope_confidence_halfwidth", fit.slope_confidence_halfwidth},
                                   {"theoretical_rate", theoretical_rate(c.params, p)}});
    }
    files.write("rate_summary.json", summary.dump(2) + "\n");
}

void run_holder(const ExperimentConfig& c, OutputSet& files) {
    const TransformedModel model = TransformedModel::from(c.params);
    const double z0 = lamperti_phi(c.params, c.params.x0);
    const double p = c.p_list.front();
    const auto levels = holder_study(model, z0, c.seed, c.n_paths, c.horizon, c.levels, c.kappa,
                                     c.epsilon, p, c.pair_policy, c.threads);
    std::ostringstream proc, drift;
    proc << "level,estimate\n";
    drift << "level,estimate\n";
    json summary;
    summary["pair_policy"] = to_string(c.pair_policy);
    summary["p"] = p;
    summary["levels"] = json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& l = levels[i];
        proc << c.levels[i] << ',' << format_double(l.process.estimate) << '\n';
        drift << c.levels[i] << ',' << format_double(l.drift_path.estimate) << '\n';
        summary["levels"].push_back({{"level", c.levels[i]},
                                     {"n_steps", l.n_steps},
                                     {"process", {{"exponent", l.process.exponent_used},
                                                  {"estimate", l.process.estimate},
                                                  {"std_error", l.process.std_error}}},
                                     {"drift_path", {{"exponent", l.drift_path.exponent_used},
                                                     {"estimate", l.drift_path.estimate},
                                                     {"std_error", l.drift_path.std_error}}}});
    }
    files.write("holder.csv", proc.str());
    files.write("holder_drift.csv", drift.str());
    files.write("holder_summary.json", summary.dump(2) + "\n");
}

void run_moments(const ExperimentConfig& c, OutputSet& files) {
    const double h = min_step(c);
    const double horizon = std::max(c.horizon, *std::max_element(c.t_list.begin(), c.t_list.end()));
    const TimeGrid grid(horizon, exact_steps(horizon, h, "moments horizon"));
    std::vector<std::size_t> nodes;
    for (double t : c.t_list) nodes.push_back(node_of(t, h));
    const auto values = sample_nodes(c.params, c.seed, c.n_paths, grid, nodes, c.threads);

    const double nu = c.params.feller_index();
    std::ostringstream os;
    os << "t,q,estimate,se,oracle\n";
    for (std::size_t it = 0; it < c.t_list.size(); ++it) {
        const double t = c.t_list[it];
        for (std::size_t iq = 0; iq < c.q_list.size(); ++iq) {
            const double q = c.q_list[iq];
            const MomentEstimate m = moment_estimate(values[it], q, mix_seed(c.seed, 500 + it * 64 + iq));
            double oracle;
            if (q < 0.0)
                oracle = -q < nu ? inverse_moment_exact_cir(c.params, -q, t)
                                 : std::numeric_limits<double>::infinity();
            else
                oracle = cir_exact_moment(c.params, q, t);
            os << format_double(t) << ',' << format_double(q) << ',' << format_double(m.estimate) << ','
               << format_double(m.std_error) << ',' << format_double(oracle) << '\n';
        }
    }
    files.write("moments.csv", os.str());
}

void run_bounds(const ExperimentConfig& c, OutputSet& files) {
    std::vector<std::pair<std::string, CirParams>> sets;
    if (c.bound_matrix == "default") {
        const char* names[] = {"A", "B", "C"};
        const auto params = default_bound_parameter_sets();
        for (std::size_t i = 0; i < params.size(); ++i) sets.emplace_back(names[i], params[i]);
    } else {
        sets.emplace_back("config", c.params);
    }
    std::ostringstream os;
    os << "label,lhs,rhs,slack,pass\n";
    json summary;
    summary["checks"] = json::array();
    std::size_t passed = 0, total = 0;
    for (const auto& [name, params] : sets) {
        const auto specs = default_bound_specs(params, c.seed, c.h_fine);
        const auto checks = bound_check_suite(params, c.seed, c.n_paths, c.h_fine, specs, c.threads);
        for (const auto& chk : checks) {
            const std::string label = name + ": " + chk.label;
            os << label << ',' << format_double(chk.mc_lhs) << ',' << format_double(chk.oracle_rhs) << ','
               << format_double(chk.slack_factor) << ',' << csv_bool(chk.pass) << '\n';
            summary["checks"].push_back({{"label", label},
                                         {"lhs", chk.mc_lhs},
                                         {"rhs", chk.oracle_rhs},
                                         {"slack", chk.slack_factor},
                                         {"std_error", chk.std_error},
                                         {"se_multiplier", chk.se_multiplier},
                                         {"floored", chk.floored},
                                         {"pass", chk.pass}});
            passed += chk.pass ? 1 : 0;
            ++total;
        }
    }
    summary["passed"] = passed;
    summary["total"] = total;
    files.write("bounds.csv", os.str());
    files.write("bounds_summary.json", summary.dump(2) + "\n");
}

void run_recursion(const ExperimentConfig& c, OutputSet& files) {
    const double h = c.h_list.front();
    const auto checks = recursion_bound_check(c.params, c.seed, c.n_paths, h, c.effective_h_ref(),
                                              c.horizon, c.threads);
    std::ostringstream os;
    os << "node,t,lhs,rhs,slack,pass\n";
    std::size_t passed = 0;
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const auto& chk = checks[k];
        os << k << ',' << format_double(std::min(static_cast<double>(k) * h, c.horizon)) << ','
           << format_double(chk.mc_lhs) << ',' << format_double(chk.oracle_rhs) << ','
           << format_double(chk.slack_factor) << ',' << csv_bool(chk.pass) << '\n';
        passed += chk.pass ? 1 : 0;
    }
    files.write("recursion.csv", os.str());
    json summary{{"nodes", checks.size()}, {"passed", passed}, {"h", h}, {"h_ref", c.effective_h_ref()}};
    files.write("recursion_summary.json", summary.dump(2) + "\n");
}

int finish_run(const std::string& name, const ExperimentConfig& config, int code,
               const std::string& message, double wall, const std::vector<std::string>& outputs,
               std::ostream& err) {
    json manifest{{"subcommand", name},
                  {"status", code == 0 ? "ok" : "failed"},
                  {"exit_code", code},
                  {"message", message},
                  {"version", kVersion},
                  {"wall_time_seconds", wall},
                  {"outputs", outputs},
                  {"config", to_json(config)}};
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    std::ofstream os(config.output_dir / "manifest.json", std::ios::trunc);
    if (os) os << manifest.dump(2) << "\n";
    if (!os && code == 0) {
        err << "error: cannot write manifest.json\n";
        code = 4;
    }
    return code;
}

}  // namespace

double ExperimentConfig::effective_h_ref() const {
    if (h_ref > 0.0) return h_ref;
    if (h_list.empty()) throw ValidationError("h_list must not be empty");
    return *std::min_element(h_list.begin(), h_list.end()) / 16.0;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "params") {
            if (!value.is_object()) throw ValidationError("config key 'params' must be an object");
            for (const auto& [pk, pv] : value.items()) {
                if (pk == "delta") c.params.delta = get_as<double>(pv, "params.delta");
                else if (pk == "gamma") c.params.gamma = get_as<double>(pv, "params.gamma");
                else if (pk == "beta") c.params.beta = get_as<double>(pv, "params.beta");
                else if (pk == "x0") c.params.x0 = get_as<double>(pv, "params.x0");
                else throw ValidationError("unknown config key 'params." + pk + "'");
            }
        } else if (key == "seed") c.seed = get_as<std::uint64_t>(value, key);
        else if (key == "n_paths") c.n_paths = get_as<std::size_t>(value, key);
        else if (key == "T") c.horizon = get_as<double>(value, key);
        else if (key == "h_list") c.h_list = get_as<std::vector<double>>(value, key);
        else if (key == "h_ref") c.h_ref = get_as<double>(value, key);
        else if (key == "p_list") c.p_list = get_as<std::vector<double>>(value, key);
        else if (key == "epsilon") c.epsilon = get_as<double>(value, key);
        else if (key == "output_dir") c.output_dir = get_as<std::string>(value, key);
        else if (key == "threads") c.threads = get_as<unsigned>(value, key);
        else if (key == "kappa") c.kappa = get_as<double>(value, key);
        else if (key == "levels") c.levels = get_as<std::vector<unsigned>>(value, key);
        else if (key == "pair_policy") c.pair_policy = parse_pair_policy(get_as<std::string>(value, key));
        else if (key == "q_list") c.q_list = get_as<std::vector<double>>(value, key);
        else if (key == "t_list") c.t_list = get_as<std::vector<double>>(value, key);
        else if (key == "n_trajectories") c.n_trajectories = get_as<std::size_t>(value, key);
        else if (key == "bound_matrix") c.bound_matrix = get_as<std::string>(value, key);
        else if (key == "h_fine") c.h_fine = get_as<double>(value, key);
        else throw ValidationError("unknown config key '" + key + "'");
    }
    return c;
}

json to_json(const ExperimentConfig& c) {
    return json{{"params", {{"delta", c.params.delta}, {"gamma", c.params.gamma},
                            {"beta", c.params.beta}, {"x0", c.params.x0}}},
                {"seed", c.seed},
                {"n_paths", c.n_paths},
                {"T", c.horizon},
                {"h_list", c.h_list},
                {"h_ref", c.h_ref},
                {"p_list", c.p_list},
                {"epsilon", c.epsilon},
                {"output_dir", c.output_dir.string()},
                {"threads", c.threads},
                {"kappa", c.kappa},
                {"levels", c.levels},
                {"pair_policy", to_string(c.pair_policy)},
                {"q_list", c.q_list},
                {"t_list", c.t_list},
                {"n_trajectories", c.n_trajectories},
                {"bound_matrix", c.bound_matrix},
                {"h_fine", c.h_fine}};
}

ExperimentConfig load_config(const fs::path& file) {
    std::ifstream is(file);
    if (!is) throw IoError("cannot read config " + file.string());
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + file.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

void validate_config(const std::string& name, const ExperimentConfig& c) {
    if (std::find(subcommands().begin(), subcommands().end(), name) == subcommands().end())
        throw ValidationError("unknown subcommand '" + name + "'");
    c.params.validate();
    if (name == "classify") return;
    if (!(c.horizon > 0.0) || !std::isfinite(c.horizon)) throw ValidationError("T must be positive");
    if (c.n_paths < 2 && name != "simulate") throw ValidationError("n_paths must be at least 2");
    if (c.p_list.empty()) throw ValidationError("p_list must not be empty");

    if (name == "simulate") {
        check_h_list(c);
        check_scheme_regime(c.params);
    } else if (name == "rate") {
        check_h_list(c);
        for (double p : c.p_list) theoretical_rate(c.params, p);
        check_scheme_regime(c.params);
        const double h_ref = c.effective_h_ref();
        exact_steps(c.horizon, h_ref, "h_ref");
        for (double h : c.h_list) {
            const std::size_t f = exact_steps(h, h_ref, "h / h_ref");
            if (f < 2 || (f & (f - 1)) != 0)
                throw ValidationError("each h must be 2^j * h_ref with j >= 1");
            if (c.params.gamma < 0.0 && !(h < 1.0 / (-2.0 * c.params.gamma)))
                throw RegimeError("strong rate requires h < 1/(2 gamma^-)");
        }
    } else if (name == "holder") {
        check_scheme_regime(c.params);
        if (!(c.kappa > 0.0 && c.kappa < 1.0)) throw ValidationError("kappa must lie in (0, 1)");
        if (c.levels.empty()) throw ValidationError("levels must not be empty");
        const TransformedModel model = TransformedModel::from(c.params);
        const auto [lo, hi] = drift_path_epsilon_range(model.alpha);
        if (!(c.epsilon > lo && c.epsilon < hi))
            throw ValidationError("epsilon must lie in (" + format_double(lo) + ", " + format_double(hi) + ")");
        for (unsigned level : c.levels) {
            if (level < 1 || level > 24) throw ValidationError("levels must lie in [1, 24]");
            if (c.pair_policy == PairPolicy::AllPairs && (std::size_t{1} << level) > kMaxAllPairsSteps)
                throw ValidationError("all_pairs supports at most 1024 steps");
            const double h = c.horizon / static_cast<double>(std::size_t{1} << level);
            if (model.lipschitz_L() > 0.0 && !(h < 1.0 / model.lipschitz_L()))
                throw RegimeError("implicit step needs h < 1/L");
        }
        if (!(c.p_list.front() > 0.0)) throw ValidationError("p must be positive");
    } else if (name == "moments") {
        check_h_list(c);
        check_scheme_regime(c.params);
        if (c.t_list.empty() || c.q_list.empty()) throw ValidationError("t_list and q_list must not be empty");
        const double h = min_step(c);
        for (double t : c.t_list) node_of(t, h);
        for (double q : c.q_list)
            if (!std::isfinite(q)) throw ValidationError("q must be finite");
        if (std::any_of(c.q_list.begin(), c.q_list.end(), [](double q) { return q < 0.0; }) &&
            !(c.params.x0 > 0.0))
            throw ValidationError("negative moments need x0 > 0");
    } else if (name == "bounds") {
        if (c.bound_matrix != "default" && c.bound_matrix != "config")
            throw ValidationError("bound_matrix must be 'default' or 'config'");
        exact_steps(1.0, c.h_fine, "h_fine");
        if (c.bound_matrix == "config") default_bound_specs(c.params, c.seed, c.h_fine);
    } else if (name == "recursion") {
        check_h_list(c);
        if (!classify_regime(c.params).theorem_applicable)
            throw RegimeError("recursion check requires 2*delta/beta^2 > 1/2");
        const double h_ref = c.effective_h_ref();
        exact_steps(c.h_list.front(), h_ref, "h / h_ref");
        exact_steps(c.horizon, h_ref, "h_ref");
        const double L = TransformedModel::from(c.params).lipschitz_L();
        if (L > 0.0 && !(c.h_list.front() < 1.0 / L)) throw RegimeError("recursion check needs h < 1/L");
    }
}

int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& out,
                   std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    OutputSet files(config.output_dir);
    int code = 0;
    std::string message;
    try {
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec) throw IoError("cannot create output directory " + config.output_dir.string() + ": " + ec.message());
        validate_config(name, config);
        if (name == "classify") run_classify(config, files, out);
        else if (name == "simulate") run_simulate(config, files);
        else if (name == "rate") run_rate(config, files);
        else if (name == "holder") run_holder(config, files);
        else if (name == "moments") run_moments(config, files);
        else if (name == "bounds") run_bounds(config, files);
        else run_recursion(config, files);
    } catch (const ValidationError& e) {
        code = 2;
        message = e.what();
    } catch (const NumericalError& e) {
        code = 3;
        message = e.what();
    } catch (const IoError& e) {
        code = 4;
        message = e.what();
    } catch (const fs::filesystem_error& e) {
        code = 4;
        message = e.what();
    } catch (const std::exception& e) {
        code = 3;
        message = e.what();
    }
    if (code != 0) {
        err << "error: " << message << "\n";
        files.remove_all();
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return finish_run(name, config, code, message, wall, files.names(), err);
}

int report_failure(const std::string& name, const ExperimentConfig& config, int code,
                   const std::string& message, std::ostream& err) {
    err << "error: " << message << "\n";
    finish_run(name, config, code, message, 0.0, {}, err);
    return code;
}

}  // namespace cirsim
