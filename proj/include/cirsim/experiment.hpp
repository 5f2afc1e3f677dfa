#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cirsim/analysis.hpp"
#include "cirsim/model.hpp"

namespace cirsim {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    CirParams params{.delta = 0.375, .gamma = 1.0, .beta = 1.0, .x0 = 1.0};
    std::uint64_t seed = 1;
    std::size_t n_paths = 1000;
    double horizon = 1.0;
    // Coarse steps, descending; each a power-of-two multiple of h_ref.
    std::vector<double> h_list{0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8, 0x1p-9, 0x1p-10};
    // 0 selects min(h_list) / 16.
    double h_ref = 0.0;
    std::vector<double> p_list{1.0};
    double epsilon = 0.05;
    std::filesystem::path output_dir = "out";
    unsigned threads = 0;

    // holder
    double kappa = 0.4;
    std::vector<unsigned> levels{9, 11};
    PairPolicy pair_policy = PairPolicy::DyadicLags;
    // moments
    std::vector<double> q_list{-0.5, 1.0, 2.0};
    std::vector<double> t_list{1.0};
    // simulate
    std::size_t n_trajectories = 4;
    // bounds: "default" runs the three built-in parameter sets, "config" uses params
    std::string bound_matrix = "default";
    double h_fine = 0x1p-8;

    double effective_h_ref() const;
};

// Unknown keys and ill-typed values raise ValidationError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& file);

// Checks everything the named subcommand needs before any simulation.
void validate_config(const std::string& subcommand, const ExperimentConfig& config);

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"classify", "simulate", "rate",     "holder",
                                                "moments",  "bounds",   "recursion"};
    return names;
}

// Runs one subcommand, writing its outputs and manifest.json into
// config.output_dir. Returns the exit status (0 ok, 2 validation, 3 numerical,
// 4 I/O); on failure prints a one-line reason to `err` and removes partial
// outputs. `classify` prints its report to `out`.
int run_subcommand(const std::string& name, const ExperimentConfig& config, std::ostream& out,
                   std::ostream& err);

// Prints the reason and writes a failed manifest for errors raised before a
// run starts, such as an unreadable config file. Returns `code`.
int report_failure(const std::string& name, const ExperimentConfig& config, int code,
                   const std::string& message, std::ostream& err);

}  // namespace cirsim
