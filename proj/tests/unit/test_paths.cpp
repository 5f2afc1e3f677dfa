#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "cirsim/error.hpp"
#include "cirsim/paths.hpp"
#include "cirsim/rng.hpp"

using namespace cirsim;

TEST(Philox, KnownAnswerVectors) {
    using B = Philox4x32::Block;
    EXPECT_EQ(Philox4x32(0)(B{0, 0, 0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32(~0ULL)(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}),
              (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32(0x299f31d0a4093822ULL)(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}),
              (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformStaysInsideOpenInterval) {
    EXPECT_GT(uniform_open(0), 0.0);
    EXPECT_LT(uniform_open(~0ULL), 1.0);
    EXPECT_DOUBLE_EQ(uniform_open(1ULL << 63), 0.5 + 0x1p-53);
}

TEST(NormalQuantile, KnownValues) {
    EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_NEAR(normal_quantile(0.025), -1.959963984540054, 1e-14);
    EXPECT_NEAR(normal_quantile(1e-10), -6.361340902404056, 1e-12);
}

TEST(TimeGrid, NodesAndIndices) {
    const TimeGrid g(1.0, 10);
    EXPECT_DOUBLE_EQ(g.step(), 0.1);
    EXPECT_EQ(g.node(10), 1.0);
    EXPECT_THROW(g.node(11), ValidationError);
    EXPECT_EQ(g.floor_index(0.35), 3u);
    EXPECT_EQ(g.ceil_index(0.35), 4u);
    EXPECT_EQ(g.floor_index(g.node(3)), 3u);
    EXPECT_EQ(g.ceil_index(g.node(3)), 3u);
    EXPECT_EQ(g.ceil_index(1.0), 10u);
    EXPECT_THROW(g.floor_index(1.5), ValidationError);
    EXPECT_EQ(g.coarsened(5), TimeGrid(1.0, 2));
    EXPECT_THROW(g.coarsened(3), ValidationError);
    EXPECT_THROW(TimeGrid(0.0, 4), ValidationError);
    EXPECT_THROW(TimeGrid(1.0, 0), ValidationError);
}

TEST(Increments, PureFunctionOfSeedPathAndIndex) {
    const TimeGrid g(1.0, 33);
    const auto a = generate_increments(5, 2, g);
    EXPECT_EQ(a, generate_increments(5, 2, g));
    EXPECT_NE(a, generate_increments(5, 3, g));
    EXPECT_NE(a, generate_increments(6, 2, g));
    // same draws rescaled on a longer horizon with the same step count
    const auto b = generate_increments(5, 2, TimeGrid(4.0, 33));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(b[k], 2.0 * a[k], 1e-15);
    // prefix stability: step k does not depend on the total step count
    const auto c = generate_increments(5, 2, TimeGrid(2.0, 66));
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(c[k], a[k], 1e-15);
}

TEST(Increments, MomentsMatchGaussian) {
    const TimeGrid g(1.0, 1000);
    double sum = 0.0, sq = 0.0, quart = 0.0;
    std::size_t n = 0;
    for (std::uint64_t path = 0; path < 200; ++path)
        for (double v : generate_increments(42, path, g)) {
            const double z = v / std::sqrt(g.step());
            sum += z;
            sq += z * z;
            quart += z * z * z * z;
            ++n;
        }
    const double N = static_cast<double>(n);
    EXPECT_NEAR(sum / N, 0.0, 5.0 / std::sqrt(N));
    EXPECT_NEAR(sq / N, 1.0, 5.0 * std::sqrt(2.0 / N));
    EXPECT_NEAR(quart / N, 3.0, 5.0 * std::sqrt(96.0 / N));
}

TEST(Increments, CoarseningSumsBlocks) {
    const std::vector<double> fine{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(coarsen_increments(fine, 2), (std::vector<double>{3, 7, 11}));
    EXPECT_EQ(coarsen_increments(fine, 1), fine);
    EXPECT_THROW(coarsen_increments(fine, 4), ValidationError);
    EXPECT_THROW(coarsen_increments(fine, 0), ValidationError);
}

TEST(Increments, CoarsenedPathAgreesAtCoarseNodes) {
    const TimeGrid g(1.0, 64);
    const auto fine = generate_increments(9, 0, g);
    const auto w_fine = cumulative_path(fine);
    const auto w_coarse = cumulative_path(coarsen_increments(fine, 8));
    ASSERT_EQ(w_coarse.size(), 9u);
    EXPECT_EQ(w_fine.front(), 0.0);
    for (std::size_t k = 0; k <= 8; ++k) EXPECT_NEAR(w_coarse[k], w_fine[8 * k], 1e-14);
}

TEST(Ensemble, IndependentOfThreadCount) {
    const TimeGrid g(1.0, 17);
    const auto one = make_ensemble(3, 50, g, 1);
    const auto four = make_ensemble(3, 50, g, 4);
    const auto automatic = make_ensemble(3, 50, g, 0);
    EXPECT_EQ(one.increments, four.increments);
    EXPECT_EQ(one.increments, automatic.increments);
    const auto p7 = one.path(7);
    EXPECT_EQ(std::vector<double>(p7.begin(), p7.end()), generate_increments(3, 7, g));
}

TEST(Ensemble, BinaryRoundTrip) {
    const auto file = std::filesystem::temp_directory_path() / "cirsim_ensemble_test.bin";
    const auto e = make_ensemble(77, 5, TimeGrid(2.0, 8), 1);
    write_ensemble(file, e);
    EXPECT_EQ(std::filesystem::file_size(file), 44u + 5u * 8u * 8u);
    const auto r = read_ensemble(file);
    EXPECT_EQ(r.seed, 77u);
    EXPECT_EQ(r.n_paths, 5u);
    EXPECT_EQ(r.grid, e.grid);
    EXPECT_EQ(r.increments, e.increments);

    std::filesystem::resize_file(file, 100);
    EXPECT_THROW(read_ensemble(file), IoError);
    {
        std::ofstream os(file, std::ios::binary | std::ios::trunc);
        os << "NOTANENSEMBLEFILE";
    }
    EXPECT_THROW(read_ensemble(file), IoError);
    std::filesystem::remove(file);
    EXPECT_THROW(read_ensemble(file), IoError);
}
