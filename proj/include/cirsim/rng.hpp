#pragma once

#include <array>
#include <cstdint>

namespace cirsim {

// Philox4x32-10 (Salmon et al., SC'11). A stateless bijection of a 128-bit
// counter under a 64-bit key; every output block depends only on
// (key, counter), so draws can be produced in any order.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t key)
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

    Block operator()(Block counter) const {
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * counter[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * counter[2];
            counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                       static_cast<std::uint32_t>(p1),
                       static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                       static_cast<std::uint32_t>(p0)};
        }
        return counter;
    }

    // Two 64-bit words from the counter (lo, hi) = (a, b).
    std::array<std::uint64_t, 2> words(std::uint64_t a, std::uint64_t b) const {
        const Block out = (*this)({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                                   static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)});
        return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
                (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57;
    static constexpr std::uint32_t kW0 = 0x9E3779B9;
    static constexpr std::uint32_t kW1 = 0xBB67AE85;

    std::array<std::uint32_t, 2> key_;
};

// Maps 64 random bits to the open interval (0, 1) using the top 52 bits.
inline double uniform_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Standard normal quantile of u in (0, 1).
double normal_quantile(double u);

}  // namespace cirsim
