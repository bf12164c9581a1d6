#pragma once

#include "kdsel/kernels.hpp"
#include "kdsel/pointset.hpp"

namespace kdsel::ref {

// Deliberately naive serial implementations: straightforward accumulation,
// full double loops, no caching, no threading. They serve as independent
// oracles in the test suite and as baselines in the benchmarks, so they must
// stay structurally different from the optimized evaluators.

/// c - (2/n) sum kF + (1/n^2) sum over all ordered pairs of k.
double kernel_disc_sq_serial(const PointSet& P, const Kernel& K);

/// Closed-form squared L2 star discrepancy, textbook double loop.
double warnock_l2_sq_serial(const PointSet& P);

/// (1/n^2) sum over all ordered pairs of the Stein kernel, evaluating the
/// score model afresh for every pair.
double ksd_sq_serial(const PointSet& P, const SteinKernel& K);

/// Exact L-infinity star discrepancy by walking every corner of the critical
/// grid with per-corner point scans.
double linf_star_grid_serial(const PointSet& P);

}  // namespace kdsel::ref
