#pragma once

#include <cstdint>
#include <random>

namespace vinecredit {

// splitmix64 finaliser; used to derive independent child seeds from one run seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_seed(mix_seed(seed) ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Seeded random stream. Same seed, same sequence, on a given toolchain.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    /// Uniform on the open interval (0,1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(engine_); }

    double gamma(double shape, double scale = 1.0) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform index in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace vinecredit
