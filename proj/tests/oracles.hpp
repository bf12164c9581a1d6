#pragma once

// Independent numerical oracles used by the unit tests and the acceptance
// checks: composite-Simpson quadrature, a finite-difference construction of
// the Stein kernel from its four-term definition, and closed-form log
// densities for the bundled target families.

#include <cmath>
#include <functional>
#include <vector>

#include "kdsel/kernels.hpp"

namespace oracles {

/// Composite Simpson on [a,b] with n (even) panels. Exact for cubics, so the
/// piecewise-polynomial kernel integrands below are integrated exactly up to
/// rounding when split at their kinks.
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// RBF base kernel exp(-|x-y|^2 / (2 h^2)).
inline double rbf(const double* x, const double* y, int d, double h) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) r2 += (x[j] - y[j]) * (x[j] - y[j]);
    return std::exp(-r2 / (2.0 * h * h));
}

/// Stein kernel assembled from its definition
///   k0(x,y) = div_x div_y k + grad_x k . s(y) + grad_y k . s(x) + k s(x).s(y)
/// with every base-kernel derivative taken by central finite differences and
/// the scores evaluated analytically. Deliberately shares no algebra with the
/// closed form under test.
inline double stein_k0_fd(const kdsel::ScoreModel& score, const double* x, const double* y,
                          double h) {
    const int d = score.dim();
    std::vector<double> sx(d), sy(d), xp(x, x + d), yp(y, y + d);
    score.score(x, sx.data());
    score.score(y, sy.data());

    const double step = 1e-4;
    double div_div = 0.0, gx_dot_sy = 0.0, gy_dot_sx = 0.0;
    for (int j = 0; j < d; ++j) {
        // mixed second partial d^2 k / dx_j dy_j
        xp[j] = x[j] + step; yp[j] = y[j] + step; const double pp = rbf(xp.data(), yp.data(), d, h);
        xp[j] = x[j] + step; yp[j] = y[j] - step; const double pm = rbf(xp.data(), yp.data(), d, h);
        xp[j] = x[j] - step; yp[j] = y[j] + step; const double mp = rbf(xp.data(), yp.data(), d, h);
        xp[j] = x[j] - step; yp[j] = y[j] - step; const double mm = rbf(xp.data(), yp.data(), d, h);
        div_div += (pp - pm - mp + mm) / (4.0 * step * step);
        yp[j] = y[j];

        xp[j] = x[j] + step; const double xr = rbf(xp.data(), yp.data(), d, h);
        xp[j] = x[j] - step; const double xl = rbf(xp.data(), yp.data(), d, h);
        gx_dot_sy += (xr - xl) / (2.0 * step) * sy[j];
        xp[j] = x[j];

        yp[j] = y[j] + step; const double yr = rbf(xp.data(), yp.data(), d, h);
        yp[j] = y[j] - step; const double yl = rbf(xp.data(), yp.data(), d, h);
        gy_dot_sx += (yr - yl) / (2.0 * step) * sx[j];
        yp[j] = y[j];
    }
    double s_dot_s = 0.0;
    for (int j = 0; j < d; ++j) s_dot_s += sx[j] * sy[j];
    return div_div + gx_dot_sy + gy_dot_sx + rbf(x, y, d, h) * s_dot_s;
}

/// log q(x) for a Gaussian mixture given per-component means, covariance
/// inverses, and log-normalizers; used to check scores against grad log q.
struct MixtureDensity {
    int dim;
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<std::vector<double>> cov_inv;  // row-major d*d
    std::vector<double> log_norm;              // -(d/2)log(2pi) - (1/2)log det

    double log_q(const double* x) const {
        double best = -1e300;
        std::vector<double> terms;
        for (std::size_t c = 0; c < weights.size(); ++c) {
            double quad = 0.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    quad += (x[i] - means[c][i]) * cov_inv[c][static_cast<std::size_t>(i) * dim + j] *
                            (x[j] - means[c][j]);
            const double t = std::log(weights[c]) + log_norm[c] - 0.5 * quad;
            terms.push_back(t);
            best = std::max(best, t);
        }
        double acc = 0.0;
        for (double t : terms) acc += std::exp(t - best);
        return best + std::log(acc);
    }
};

/// Central finite-difference gradient of a scalar field.
template <class F>
std::vector<double> fd_gradient(F&& f, const double* x, int d, double step) {
    std::vector<double> g(d), p(x, x + d);
    for (int j = 0; j < d; ++j) {
        p[j] = x[j] + step;
        const double hi = f(p.data());
        p[j] = x[j] - step;
        const double lo = f(p.data());
        p[j] = x[j];
        g[j] = (hi - lo) / (2.0 * step);
    }
    return g;
}

}  // namespace oracles
