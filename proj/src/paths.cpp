#include "cirsim/paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>

#include <boost/math/special_functions/erf.hpp>

#include "cirsim/error.hpp"
#include "cirsim/parallel.hpp"
#include "cirsim/rng.hpp"

namespace cirsim {

double normal_quantile(double u) {
    using fast_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
    return -M_SQRT2 * boost::math::erfc_inv(2.0 * u, fast_policy());
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps), step_(0.0) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("time grid horizon must be positive and finite");
    if (n_steps == 0) throw ValidationError("time grid needs at least one step");
    step_ = horizon / static_cast<double>(n_steps);
}

double TimeGrid::node(std::size_t k) const {
    if (k == n_steps_) return horizon_;
    if (k > n_steps_) throw ValidationError("grid node out of range");
    return static_cast<double>(k) * step_;
}

std::size_t TimeGrid::floor_index(double s) const {
    if (!(s >= 0.0) || s > horizon_) throw ValidationError("time outside [0, T]");
    auto k = static_cast<std::size_t>(std::floor(s / step_));
    if (k > n_steps_) k = n_steps_;
    while (k < n_steps_ && node(k + 1) <= s) ++k;
    while (k > 0 && node(k) > s) --k;
    return k;
}

std::size_t TimeGrid::ceil_index(double s) const {
    const std::size_t k = floor_index(s);
    return node(k) == s ? k : k + 1;
}

TimeGrid TimeGrid::coarsened(std::size_t factor) const {
    if (factor == 0 || n_steps_ % factor != 0)
        throw ValidationError("grid of " + std::to_string(n_steps_) + " steps is not divisible by " +
                              std::to_string(factor));
    return TimeGrid(horizon_, n_steps_ / factor);
}

std::vector<double> generate_increments(std::uint64_t seed, std::uint64_t path_index,
                                        const TimeGrid& grid) {
    const Philox4x32 philox(seed);
    const double scale = std::sqrt(grid.step());
    const std::size_t n = grid.n_steps();
    std::vector<double> out(n);
    // one Philox block feeds steps 2j and 2j+1
    for (std::size_t j = 0; 2 * j < n; ++j) {
        const auto words = philox.words(j, path_index);
        out[2 * j] = scale * normal_quantile(uniform_open(words[0]));
        if (2 * j + 1 < n) out[2 * j + 1] = scale * normal_quantile(uniform_open(words[1]));
    }
    return out;
}

std::vector<double> coarsen_increments(std::span<const double> fine, std::size_t factor) {
    if (factor == 0 || fine.size() % factor != 0)
        throw ValidationError("coarsen_increments: length " + std::to_string(fine.size()) +
                              " not divisible by factor " + std::to_string(factor));
    std::vector<double> coarse(fine.size() / factor);
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        double sum = 0.0;
        for (std::size_t j = k * factor; j < (k + 1) * factor; ++j) sum += fine[j];
        coarse[k] = sum;
    }
    return coarse;
}

std::vector<double> cumulative_path(std::span<const double> increments) {
    std::vector<double> w(increments.size() + 1);
    w[0] = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) w[k + 1] = w[k] + increments[k];
    return w;
}

BrownianEnsemble make_ensemble(std::uint64_t seed, std::size_t n_paths, const TimeGrid& grid,
                               unsigned threads) {
    BrownianEnsemble e{seed, n_paths, grid, std::vector<double>(n_paths * grid.n_steps())};
    parallel_for(n_paths, threads, [&](std::size_t i) {
        const auto inc = generate_increments(seed, i, grid);
        std::copy(inc.begin(), inc.end(), e.increments.begin() + static_cast<std::ptrdiff_t>(i * grid.n_steps()));
    });
    return e;
}

namespace {

constexpr char kMagic[8] = {'C', 'I', 'R', 'S', 'I', 'M', 'B', 'M'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    const U bits = std::bit_cast<U>(value);
    char bytes[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    os.write(bytes, sizeof(U));
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    unsigned char bytes[sizeof(U)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(U)))
        throw IoError("ensemble file truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
    return std::bit_cast<T>(bits);
}

}  // namespace

void write_ensemble(const std::filesystem::path& file, const BrownianEnsemble& ensemble) {
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + file.string() + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put_le<std::uint32_t>(os, kVersion);
    put_le<std::uint64_t>(os, ensemble.seed);
    put_le<double>(os, ensemble.grid.horizon());
    put_le<std::uint64_t>(os, ensemble.grid.n_steps());
    put_le<std::uint64_t>(os, ensemble.n_paths);
    for (double v : ensemble.increments) put_le<double>(os, v);
    if (!os) throw IoError("write to " + file.string() + " failed");
}

BrownianEnsemble read_ensemble(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw IoError("cannot open " + file.string());
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError(file.string() + " is not an ensemble file");
    if (get_le<std::uint32_t>(is) != kVersion) throw IoError("unsupported ensemble file version");
    BrownianEnsemble e;
    e.seed = get_le<std::uint64_t>(is);
    const double horizon = get_le<double>(is);
    const auto n_steps = get_le<std::uint64_t>(is);
    e.n_paths = get_le<std::uint64_t>(is);
    e.grid = TimeGrid(horizon, n_steps);
    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    constexpr std::uintmax_t kHeader = 8 + 4 + 8 + 8 + 8 + 8;
    if (ec || e.n_paths > (size - kHeader) / 8 / n_steps || (size - kHeader) / 8 != e.n_paths * n_steps)
        throw IoError(file.string() + ": payload size does not match the header");
    e.increments.resize(e.n_paths * n_steps);
    for (double& v : e.increments) v = get_le<double>(is);
    return e;
}

}  // namespace cirsim
