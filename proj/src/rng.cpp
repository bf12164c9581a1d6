#include "kdsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "kdsel/errors.hpp"

namespace kdsel {

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
    if (bound == 0) throw ContractError("uniform_below: bound must be positive");
    // Accept draws >= 2^64 mod bound, so that x % bound is exactly uniform.
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= threshold) return x % bound;
    }
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
}

double Rng::gamma(double shape) {
    if (!(shape > 0.0)) throw ContractError("gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost: Gamma(a) = Gamma(a+1) * U^(1/a)
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Rng::beta(double a, double b) {
    const double ga = gamma(a);
    const double gb = gamma(b);
    return ga / (ga + gb);
}

std::vector<int> Rng::sample_without_replacement(int n, int m) {
    if (m < 0 || m > n) throw ContractError("sample_without_replacement: need 0 <= m <= n");
    std::unordered_set<int> chosen;
    chosen.reserve(static_cast<std::size_t>(m) * 2);
    for (int j = n - m; j < n; ++j) {
        const int t = uniform_index(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<int> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace kdsel
