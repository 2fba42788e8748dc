#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace curvarb {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  A block of
// four 32-bit words is produced from (counter, key) alone, so any (path,
// step) pair can be evaluated independently of execution order.  That is
// what makes ensembles byte-identical under different thread counts.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    static Block block(std::uint64_t key, std::uint64_t ctr_hi, std::uint64_t ctr_lo) {
        std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
        std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
        std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
            const std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }
};

// Two standard normals from one Philox block via Box-Muller.
struct NormalPair {
    double z0;
    double z1;
};

inline NormalPair normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
    const auto b = Philox4x32::block(seed, stream, step);
    const std::uint64_t w0 = (std::uint64_t(b[0]) << 32) | b[1];
    const std::uint64_t w1 = (std::uint64_t(b[2]) << 32) | b[3];
    constexpr double inv = 1.0 / 18446744073709551616.0;  // 2^-64
    const double u0 = (static_cast<double>(w0) + 1.0) * inv;  // (0, 1]
    const double u1 = (static_cast<double>(w1) + 0.5) * inv;  // (0, 1)
    const double r = std::sqrt(-2.0 * std::log(u0));
    const double a = 6.283185307179586476925286766559 * u1;
    return {r * std::cos(a), r * std::sin(a)};
}

// Uniform double in [0, 1) from a counter; used for bootstrap resampling
// and quasi-independent helper draws.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
    const auto b = Philox4x32::block(seed, stream, step);
    const std::uint64_t w = (std::uint64_t(b[0]) << 32) | b[1];
    return static_cast<double>(w) * (1.0 / 18446744073709551616.0);
}

}  // namespace curvarb
