#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cirsim/error.hpp"
#include "cirsim/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification of the drift-implicit square-root Euler scheme for CIR"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cirsim::kVersion));

    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<unsigned> threads;
    std::optional<std::string> output_dir;

    const std::map<std::string, std::string> descriptions{
        {"classify", "print the parameter regime and step-size restrictions"},
        {"simulate", "write sample trajectories as CSV"},
        {"rate", "estimate strong L^p errors and the empirical convergence rate"},
        {"holder", "estimate the Holder constant of the scheme and its drift integral"},
        {"moments", "compare Monte Carlo moments with closed-form values"},
        {"bounds", "check the a priori moment bounds of the transformed process"},
        {"recursion", "check the pathwise error recursion against a fine reference"},
    };
    for (const auto& name : cirsim::subcommands()) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        sub->add_option("-c,--config", config_file, "JSON experiment config");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--paths", paths, "number of Monte Carlo paths (overrides config)");
        sub->add_option("--threads", threads, "worker threads, 0 = auto (overrides config)");
        sub->add_option("-o,--output-dir", output_dir, "output directory (overrides config)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    cirsim::ExperimentConfig config;
    auto apply_flags = [&] {
        if (seed) config.seed = *seed;
        if (paths) config.n_paths = *paths;
        if (threads) config.threads = *threads;
        if (output_dir) config.output_dir = *output_dir;
    };
    try {
        if (!config_file.empty()) config = cirsim::load_config(config_file);
    } catch (const cirsim::Error& e) {
        apply_flags();
        const int code = dynamic_cast<const cirsim::IoError*>(&e) ? 4 : 2;
        return cirsim::report_failure(name, config, code, e.what(), std::cerr);
    }
    apply_flags();

    return cirsim::run_subcommand(name, config, std::cout, std::cerr);
}
