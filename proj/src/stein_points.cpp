#include "kdsel/stein_points.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kdsel/discrepancy.hpp"
#include "kdsel/errors.hpp"
#include "kdsel/parallel.hpp"
#include "kdsel/rng.hpp"

namespace kdsel {

namespace {

constexpr double kBoundaryDelta = 1e-6;  // bounded-target projection margin

void project(double* x, int d, bool bounded) {
    if (!bounded) return;
    for (int j = 0; j < d; ++j)
        x[j] = std::clamp(x[j], kBoundaryDelta, 1.0 - kBoundaryDelta);
}

}  // namespace

double stein_objective(const double* existing, const double* existing_scores, int count,
                       const double* x, const SteinKernel& K) {
    const int d = K.dim();
    const ScoreModel& model = K.score_model();
    std::vector<double> sx(static_cast<std::size_t>(d));
    model.score(x, sx.data());

    double acc = 0.0;
    std::vector<double> si(static_cast<std::size_t>(d));
    for (int i = 0; i < count; ++i) {
        const double* xi = existing + static_cast<std::size_t>(i) * d;
        const double* s;
        if (existing_scores) {
            s = existing_scores + static_cast<std::size_t>(i) * d;
        } else {
            model.score(xi, si.data());
            s = si.data();
        }
        acc += 2.0 * stein_k0(xi, x, d, K.bandwidth(), s, sx.data());
    }
    acc += stein_k0(x, x, d, K.bandwidth(), sx.data(), sx.data());
    return acc;
}

namespace {

struct RestartOutcome {
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> point;
};

RestartOutcome run_restart(const double* existing, const double* existing_scores, int count,
                           const SteinKernel& K, const SteinPointsConfig& cfg, Rng rng) {
    const int d = K.dim();
    const bool bounded = cfg.project_unit_cube || K.score_model().bounded_support();

    // Objective of the projected iterate; every evaluation point (including
    // the finite-difference probes below) passes through the projection, so
    // a bounded score model is never queried outside its open support.
    const auto objective = [&](const double* x) {
        std::vector<double> p(x, x + d);
        project(p.data(), d, bounded);
        return stein_objective(existing, existing_scores, count, p.data(), K);
    };

    std::vector<double> x(static_cast<std::size_t>(d));
    if (!cfg.init_lo.empty()) {
        for (int j = 0; j < d; ++j)
            x[static_cast<std::size_t>(j)] =
                cfg.init_lo[static_cast<std::size_t>(j)] +
                rng.uniform() * (cfg.init_hi[static_cast<std::size_t>(j)] -
                                 cfg.init_lo[static_cast<std::size_t>(j)]);
    } else {
        K.score_model().sample(rng, x.data());
    }
    project(x.data(), d, bounded);

    RestartOutcome best;
    best.point = x;
    best.objective = objective(x.data());

    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-8;
    std::vector<double> m(static_cast<std::size_t>(d), 0.0);
    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    std::vector<double> grad(static_cast<std::size_t>(d));
    std::vector<double> probe(static_cast<std::size_t>(d));

    for (int step = 1; step <= cfg.max_steps; ++step) {
        double norm = 0.0;
        for (double c : x) norm += c * c;
        const double fd = 1e-5 * (1.0 + std::sqrt(norm));
        for (int j = 0; j < d; ++j) {
            probe = x;
            probe[static_cast<std::size_t>(j)] += fd;
            const double up = objective(probe.data());
            probe[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] - fd;
            const double down = objective(probe.data());
            grad[static_cast<std::size_t>(j)] = (up - down) / (2.0 * fd);
        }

        const double c1 = 1.0 - std::pow(beta1, step);
        const double c2 = 1.0 - std::pow(beta2, step);
        for (int j = 0; j < d; ++j) {
            const std::size_t u = static_cast<std::size_t>(j);
            m[u] = beta1 * m[u] + (1.0 - beta1) * grad[u];
            v[u] = beta2 * v[u] + (1.0 - beta2) * grad[u] * grad[u];
            x[u] -= cfg.step_size * (m[u] / c1) / (std::sqrt(v[u] / c2) + adam_eps);
        }
        project(x.data(), d, bounded);

        const double obj = objective(x.data());
        if (obj < best.objective) {
            best.objective = obj;
            best.point = x;
        }
    }
    return best;
}

}  // namespace

std::vector<double> next_stein_point(const double* existing, int count,
                                     const SteinKernel& K, const SteinPointsConfig& cfg,
                                     std::uint64_t addition_seed) {
    const int d = K.dim();
    if (!cfg.init_lo.empty() &&
        (cfg.init_lo.size() != static_cast<std::size_t>(d) || cfg.init_hi.size() != cfg.init_lo.size()))
        throw ConfigError("stein points: init box must have one bound pair per dimension");

    // Scores of the fixed points, evaluated once for the whole optimization.
    std::vector<double> scores(static_cast<std::size_t>(count) * d);
    for (int i = 0; i < count; ++i)
        K.score_model().score(existing + static_cast<std::size_t>(i) * d,
                              scores.data() + static_cast<std::size_t>(i) * d);

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
    parallel_for_index(cfg.restarts, [&](int r) {
        outcomes[static_cast<std::size_t>(r)] =
            run_restart(existing, scores.data(), count, K, cfg,
                        Rng::for_stream(addition_seed, static_cast<std::uint64_t>(r)));
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r)
        if (outcomes[r].objective < outcomes[best].objective) best = r;
    return outcomes[best].point;
}

double stein_points_bandwidth(const SteinPointsConfig& cfg, const double* pts, int count, int dim) {
    if (cfg.bandwidth > 0.0) return cfg.bandwidth;
    if (count < 2) return 1.0;
    try {
        return median_bandwidth(PointSet(dim, std::vector<double>(pts, pts + static_cast<std::size_t>(count) * dim)));
    } catch (const DomainError&) {
        return 1.0;  // degenerate (coincident) set
    }
}

SteinPointsResult stein_points(const SteinPointsConfig& cfg) {
    if (!cfg.score) throw ConfigError("stein points: score model required");
    if (cfg.target_count < 1) throw ConfigError("stein points: target_count must be >= 1");
    if (!(cfg.step_size > 0.0)) throw ConfigError("stein points: step size must be positive");
    if (cfg.max_steps < 1 || cfg.restarts < 1)
        throw ConfigError("stein points: max_steps and restarts must be >= 1");

    const int d = cfg.score->dim();
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(cfg.target_count) * d);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.target_count));

    Rng master(cfg.seed);
    for (int t = 0; t < cfg.target_count; ++t) {
        const double h = stein_points_bandwidth(cfg, flat.data(), t, d);
        const SteinKernel K(cfg.score, h);
        const std::uint64_t addition_seed = master.next_u64();
        const std::vector<double> next = next_stein_point(flat.data(), t, K, cfg, addition_seed);
        flat.insert(flat.end(), next.begin(), next.end());

        const PointSet current(d, flat);
        const double h_eval = stein_points_bandwidth(cfg, flat.data(), t + 1, d);
        trace.push_back(ksd_sq(current, SteinKernel(cfg.score, h_eval)).value);
    }

    return SteinPointsResult{PointSet(d, std::move(flat)), std::move(trace)};
}

}  // namespace kdsel
