#pragma once

// Philox4x32-10 counter-based generator. Every random quantity in the
// simulator is a pure function of (key, counter), so results do not depend on
// evaluation order or thread count.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace mmwia {

class Philox {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Purpose tags that separate independent random streams.
enum class Stream : std::uint32_t {
    BsCount = 1,
    BsPosition,
    UserCount,
    UserPosition,
    Los,
    FadingCs,
    FadingRa,
    FadingDl,
    Preamble,
    Schedule,
    Bootstrap,
    Test,
};

/// Stateless stream addressed by (seed, stream tag, a, b, c): draw i of that
/// stream is a fixed function of all six values.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, Stream tag, std::uint32_t a = 0, std::uint32_t b = 0, std::uint32_t c = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{static_cast<std::uint32_t>(tag) << 24, a, b, c} {}

    /// 64 random bits for draw i (i < 2^24 per stream).
    std::uint64_t bits(std::uint32_t i) const noexcept {
        auto ctr = base_;
        ctr[0] ^= (i & 0x00FFFFFFu);
        const auto out = Philox::block(ctr, key_);
        return (std::uint64_t{out[0]} << 32) | out[1];
    }

    /// Uniform on (0, 1): never returns 0 or 1.
    double uniform(std::uint32_t i) const noexcept {
        return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unit-mean exponential.
    double exponential(std::uint32_t i) const noexcept { return -std::log(uniform(i)); }

    /// Uniform integer in [0, n).
    std::uint32_t below(std::uint32_t i, std::uint32_t n) const noexcept {
        return static_cast<std::uint32_t>((bits(i) >> 32) * n >> 32);
    }

    /// Poisson variate with the given mean; uses draw 0 as the engine seed.
    std::uint64_t poisson(double mean) const {
        if (!(mean > 0.0)) return 0;
        std::mt19937_64 eng(bits(0));
        return std::poisson_distribution<std::uint64_t>(mean)(eng);
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> base_;
};

}  // namespace mmwia
