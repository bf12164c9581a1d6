#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "kdsel/kernels.hpp"
#include "kdsel/pointset.hpp"

namespace kdsel {

class Rng;

struct SteinPointsConfig {
    int target_count = 0;                  // points to grow
    std::shared_ptr<const ScoreModel> score;
    double bandwidth = 0.0;                // > 0: fixed; 0: median heuristic on the current set
    double step_size = 0.01;               // Adam learning rate
    int max_steps = 500;                   // Adam iteration cap per restart
    int restarts = 10;                     // optimizer restarts per added point
    bool project_unit_cube = false;        // clamp iterates into [delta, 1-delta]^d (bounded targets)
    std::vector<double> init_lo, init_hi;  // optional uniform init box; empty = draw inits from the target
    std::uint64_t seed = 0;
};

/// The x-dependent part of the squared KSD of {existing points} + {x},
/// scaled by (count+1)^2: sum_i 2 k0(x_i, x) + k0(x, x). `existing` is
/// count * dim(K) row-major and may be empty; `existing_scores` may be null,
/// in which case the scores are evaluated on the fly.
double stein_objective(const double* existing, const double* existing_scores, int count,
                       const double* x, const SteinKernel& K);

/// Minimizes stein_objective by Adam (beta1 = 0.9, beta2 = 0.999,
/// eps = 1e-8) with central-difference gradients, over cfg.restarts
/// restarts run in parallel; returns the best point found (dim doubles).
/// Restart initializations come from cfg's init box or, by default, the
/// target sampler. `addition_seed` decorrelates the restart streams.
std::vector<double> next_stein_point(const double* existing, int count,
                                     const SteinKernel& K, const SteinPointsConfig& cfg,
                                     std::uint64_t addition_seed);

struct SteinPointsResult {
    PointSet points;
    /// Squared KSD after each addition, each evaluated under the median
    /// bandwidth of the set at that size (the cross-method convention).
    std::vector<double> ksd_sq_trace;
};

/// Greedy baseline: grows a set one KSD-minimizing point at a time.
SteinPointsResult stein_points(const SteinPointsConfig& cfg);

/// Bandwidth used when growing or evaluating a concrete set: cfg-fixed value
/// if positive, else the median heuristic with fallback 1.0 while the set is
/// too small (< 2 points) or degenerate.
double stein_points_bandwidth(const SteinPointsConfig& cfg, const double* pts, int count, int dim);

}  // namespace kdsel
