#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdsel/kernels.hpp"
#include "kdsel/pointset.hpp"

namespace kdsel {

/// A discrepancy measurement. `clamped` reports that a squared value came out
/// as a tiny negative number (floating-point cancellation on near-perfect
/// sets) and was clamped to 0.
struct DiscrepancyValue {
    std::string kind;  // "l2star-sq" | "wstar-sq" | "ksd-sq" | "linf" | "linf-lb"
    double value = 0.0;
    bool clamped = false;
};

/// Squared kernel discrepancy in general form:
///   c - (2/n) sum_i kF(x_i) + (1/n^2) sum_{i,j} k(x_i, x_j).
/// Pairwise (tree) summation; result independent of thread count.
DiscrepancyValue kernel_disc_sq(const PointSet& P, const Kernel& K);

/// Squared L2 star discrepancy via the closed-form product formula
/// (independent code path from kernel_disc_sq over a StarKernel).
DiscrepancyValue warnock_l2_sq(const PointSet& P);

/// Squared kernel Stein discrepancy: (1/n^2) sum_{i,j} k0(x_i, x_j).
/// Scores are precomputed once per point; symmetry halves the pair work.
DiscrepancyValue ksd_sq(const PointSet& P, const SteinKernel& K);

/// Exact L-infinity star discrepancy by enumeration of the critical grid
/// G_j = {x_j^(i)} ∪ {1} per dimension: at every corner q the supremum is
/// captured from below by the open count (strict <) and from above by the
/// closed count (componentwise <=, where points touching the upper boundary
/// x_j = 1 are never counted because no anchored box [0,q), q <= 1, contains
/// them). Feasibility guard: prod_j |G_j| <= 1e9, else ResourceError advising
/// linf_star_lower_bound.
DiscrepancyValue linf_star_exact(const PointSet& P);

/// Sampled lower bound for the same quantity: evaluates the local discrepancy
/// at `trials` corners drawn from the critical grid (exhaustively, when
/// `trials` covers the whole grid). Always <= linf_star_exact(P).
DiscrepancyValue linf_star_lower_bound(const PointSet& P, long trials, std::uint64_t seed);

/// Monte Carlo estimate with standard error.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Plain Monte Carlo estimate of the defining integral of the squared L2
/// star discrepancy, int |A([0,q))/n - vol(q)|^2 dq. Testing oracle.
McEstimate mc_l2_oracle(const PointSet& P, long samples, std::uint64_t seed);

namespace detail {

// Local-discrepancy expressions shared verbatim by the fast evaluator, the
// sampled lower bound, and the serial reference, so that their maxima agree
// bitwise when taken over the same corners.
inline double linf_pos(double vol, long open_count, int n) {
    return vol - static_cast<double>(open_count) / static_cast<double>(n);
}
inline double linf_neg(double vol, long closed_count, int n) {
    return static_cast<double>(closed_count) / static_cast<double>(n) - vol;
}

/// Sorted unique coordinate values of dimension j, with 1 appended when
/// absent: the corner grid of the exact L-infinity evaluator.
std::vector<double> linf_grid(const PointSet& P, int j);

}  // namespace detail

}  // namespace kdsel
