#pragma once

#include <cstddef>
#include <vector>

namespace kdsel {

// Deterministic summation helpers. Every parallel sum in the library is
// computed as: per-slot partial values (each a pure function of the slot
// index, so thread scheduling cannot change them) followed by a serial
// pairwise tree reduction. Results are bitwise independent of thread count.

/// Pairwise (tree) sum of v[0..n); serial base case of 32 elements.
double pairwise_sum(const double* v, std::size_t n);

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

/// Sum of row_fn(i) over i in [0,n). Rows are evaluated in parallel and
/// reduced with pairwise_sum.
template <class RowFn>
double sum_over_rows(int n, RowFn&& row_fn) {
    std::vector<double> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = row_fn(i);
    return pairwise_sum(rows);
}

/// Evaluate fn(i) for i in [0,n) in parallel (fn must be pure per index).
template <class Fn>
void parallel_for_index(int n, Fn&& fn) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) fn(i);
}

/// Like sum_over_rows but for huge ranges: fixed blocks of 4096 indices are
/// summed serially in index order, block partials reduced pairwise.
template <class TermFn>
double sum_blocked(long n, TermFn&& term_fn) {
    constexpr long kBlock = 4096;
    const long nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partials(static_cast<std::size_t>(nblocks));
#pragma omp parallel for schedule(static)
    for (long b = 0; b < nblocks; ++b) {
        const long lo = b * kBlock;
        const long hi = lo + kBlock < n ? lo + kBlock : n;
        double acc = 0.0;
        for (long i = lo; i < hi; ++i) acc += term_fn(i);
        partials[static_cast<std::size_t>(b)] = acc;
    }
    return pairwise_sum(partials);
}

}  // namespace kdsel
