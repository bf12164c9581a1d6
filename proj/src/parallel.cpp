#include "kdsel/parallel.hpp"

namespace kdsel {

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 32) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

}  // namespace kdsel
