#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace reinforce_dyn {

// Counter-style splitmix64: output k is a fixed finalizer applied to
// seed + (k+1)*golden, so a stream is reproducible bit-for-bit from (seed,
// counter) on any platform.  Standard-library distributions are not pinned
// across implementations, which is why sampling here never goes through
// <random>.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1), 53 significant bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Flat Dirichlet sample per walk block: exponentials normalized within each
// block.  Strictly interior with probability 1.
inline std::vector<double> dirichlet_point(SplitMix64& rng, int m, int d) {
    std::vector<double> x(static_cast<std::size_t>(m) * d);
    for (int i = 0; i < m; ++i) {
        double sum = 0.0;
        do {
            sum = 0.0;
            for (int v = 0; v < d; ++v) {
                // -log1p(-u) is exp(1)-distributed and finite for u in [0,1)
                const double e = -std::log1p(-rng.next_uniform());
                x[static_cast<std::size_t>(i) * d + v] = e;
                sum += e;
            }
        } while (sum == 0.0);
        for (int v = 0; v < d; ++v) x[static_cast<std::size_t>(i) * d + v] /= sum;
    }
    return x;
}

}  // namespace reinforce_dyn
