#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kdsel {

// Seedable random stream. The engine is the standard mt19937_64; every
// distribution on top of it is implemented here with an explicitly documented
// algorithm, so a stream can be reproduced from (seed, algorithm) alone:
//   - uniform():        (next_u64() >> 11) * 2^-53, in [0,1)
//   - uniform_below(b): rejection-from-modulo, unbiased
//   - normal():         Marsaglia polar method, second variate cached
//   - gamma(a):         Marsaglia-Tsang squeeze (boosted for a < 1)
//   - beta(a,b):        gamma(a) / (gamma(a) + gamma(b))
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Decorrelated stream for parallel work units: the effective seed is
    // splitmix64 applied to (seed ^ golden-ratio-scrambled stream id).
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed ^ (stream * 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    std::uint64_t next_u64() { return engine_(); }

    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound). bound >= 1.
    std::uint64_t uniform_below(std::uint64_t bound);

    int uniform_index(int bound) { return static_cast<int>(uniform_below(static_cast<std::uint64_t>(bound))); }

    double normal();

    double gamma(double shape);

    double beta(double a, double b);

    // Uniform m-subset of {0,...,n-1} via Floyd's algorithm; returned sorted.
    std::vector<int> sample_without_replacement(int n, int m);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kdsel
