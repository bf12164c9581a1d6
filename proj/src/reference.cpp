#include "kdsel/reference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "kdsel/discrepancy.hpp"
#include "kdsel/errors.hpp"

namespace kdsel::ref {

double kernel_disc_sq_serial(const PointSet& P, const Kernel& K) {
    K.validate(P);
    const int n = P.count();
    double kf = 0.0;
    for (int i = 0; i < n; ++i) kf += K.kF(P.point(i));
    double pair = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pair += K.k(P.point(i), P.point(j));
    const double nn = static_cast<double>(n);
    return K.c() - 2.0 / nn * kf + pair / (nn * nn);
}

double warnock_l2_sq_serial(const PointSet& P) {
    if (!P.in_unit_cube()) throw DomainError("warnock_l2_sq_serial: points must lie in [0,1]^d");
    const int n = P.count();
    const int d = P.dim();
    double one_point = 0.0;
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int t = 0; t < d; ++t) p *= 1.0 - P.coord(i, t) * P.coord(i, t);
        one_point += p / std::pow(2.0, d);
    }
    double pair = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double p = 1.0;
            for (int t = 0; t < d; ++t) p *= 1.0 - std::max(P.coord(i, t), P.coord(j, t));
            pair += p;
        }
    const double nn = static_cast<double>(n);
    return 1.0 / std::pow(3.0, d) - 2.0 / nn * one_point + pair / (nn * nn);
}

double ksd_sq_serial(const PointSet& P, const SteinKernel& K) {
    K.validate(P);
    const int n = P.count();
    double pair = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            pair += stein_k0(K.score_model(), P.point(i), P.point(j), K.bandwidth());
    const double nn = static_cast<double>(n);
    return pair / (nn * nn);
}

double linf_star_grid_serial(const PointSet& P) {
    if (!P.in_unit_cube())
        throw DomainError("linf_star_grid_serial: points must lie in [0,1]^d");
    const int n = P.count();
    const int d = P.dim();

    std::vector<std::vector<double>> grids;
    for (int j = 0; j < d; ++j) grids.push_back(detail::linf_grid(P, j));

    // A point with any coordinate exactly 1 lies in no anchored box [0,q)
    // with q <= 1, so it can never enter a closed (limit-from-above) count.
    std::vector<bool> interior(static_cast<std::size_t>(n), true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            if (P.coord(i, j) == 1.0) interior[static_cast<std::size_t>(i)] = false;

    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    double best = 0.0;
    for (;;) {
        double vol = 1.0;
        for (int j = 0; j < d; ++j) vol *= grids[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
        long open = 0;
        long closed = 0;
        for (int i = 0; i < n; ++i) {
            bool in_open = true;
            bool in_closed = interior[static_cast<std::size_t>(i)];
            for (int j = 0; j < d; ++j) {
                const double q = grids[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
                const double x = P.coord(i, j);
                if (!(x < q)) in_open = false;
                if (!(x <= q)) in_closed = false;
            }
            if (in_open) ++open;
            if (in_closed) ++closed;
        }
        best = std::max(best, detail::linf_pos(vol, open, n));
        best = std::max(best, detail::linf_neg(vol, closed, n));

        int j = d - 1;
        while (j >= 0) {
            if (++idx[static_cast<std::size_t>(j)] < grids[static_cast<std::size_t>(j)].size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
            --j;
        }
        if (j < 0) break;
    }
    return best;
}

}  // namespace kdsel::ref
