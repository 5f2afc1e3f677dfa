#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace cirsim {

// Uniform partition 0 = t_0 < ... < t_n = T with step h = T / n.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const { return horizon_; }
    std::size_t n_steps() const { return n_steps_; }
    double step() const { return step_; }
    // t_k = k h, with t_n returned as exactly T.
    double node(std::size_t k) const;

    // Index of the largest node <= s and of the smallest node >= s.
    std::size_t floor_index(double s) const;
    std::size_t ceil_index(double s) const;

    // Grid with n_steps / factor steps over the same horizon.
    TimeGrid coarsened(std::size_t factor) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    std::size_t n_steps_;
    double step_;
};

// n_steps independent N(0, h) draws for one path. Draw k is a pure function
// of (seed, path_index, k).
std::vector<double> generate_increments(std::uint64_t seed, std::uint64_t path_index,
                                        const TimeGrid& grid);

// coarse[k] = sum of fine[k f .. (k+1) f - 1], summed left to right.
std::vector<double> coarsen_increments(std::span<const double> fine, std::size_t factor);

// W_{t_0} = 0, W_{t_{k+1}} = W_{t_k} + dW_k.
std::vector<double> cumulative_path(std::span<const double> increments);

struct BrownianEnsemble {
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    TimeGrid grid{1.0, 1};
    // Row-major n_paths x n_steps.
    std::vector<double> increments;

    std::span<const double> path(std::size_t i) const {
        return {increments.data() + i * grid.n_steps(), grid.n_steps()};
    }
};

// threads == 0 selects the hardware concurrency; the result does not depend on it.
BrownianEnsemble make_ensemble(std::uint64_t seed, std::size_t n_paths, const TimeGrid& grid,
                               unsigned threads = 1);

// Binary layout, little-endian:
//   char[8] "CIRSIMBM", u32 version, u64 seed, f64 T, u64 n_steps, u64 n_paths,
//   then n_paths * n_steps f64 increments, row-major.
void write_ensemble(const std::filesystem::path& file, const BrownianEnsemble& ensemble);
BrownianEnsemble read_ensemble(const std::filesystem::path& file);

}  // namespace cirsim
