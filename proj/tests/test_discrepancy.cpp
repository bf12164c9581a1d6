#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kdsel/discrepancy.hpp"
#include "kdsel/errors.hpp"
#include "kdsel/generators.hpp"
#include "kdsel/kernels.hpp"
#include "kdsel/reference.hpp"
#include "kdsel/rng.hpp"
#include "test_util.hpp"

using namespace kdsel;

TEST_SUITE("discrepancy") {

TEST_CASE("singleton closed forms") {
    const PointSet mid(1, {0.5});
    // 1/12: piecewise integral of the local squared discrepancy
    CHECK(warnock_l2_sq(mid).value == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(kernel_disc_sq(mid, StarKernel(1)).value ==
          doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(linf_star_exact(mid).value == 0.5);

    // origin point in any dimension: 3^-d - 2 * 2^-d + 1
    for (int d = 1; d <= 4; ++d) {
        const PointSet origin(d, std::vector<double>(static_cast<std::size_t>(d), 0.0));
        const double expected = std::pow(3.0, -d) - 2.0 * std::pow(2.0, -d) + 1.0;
        CHECK(warnock_l2_sq(origin).value == doctest::Approx(expected).epsilon(1e-14));
        CHECK(linf_star_exact(origin).value == 1.0);
    }
    // a point pinned to the far corner is inside no anchored box
    const PointSet corner(2, {1.0, 1.0});
    CHECK(linf_star_exact(corner).value == 1.0);

    // stein kernel, mixture center, h = 1: value = k0(x,x) = 2
    const SteinKernel K(make_default_mixture_score(), 1.0);
    const PointSet center(2, {0.0, 0.0});
    CHECK(ksd_sq(center, K).value == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("warnock and the general kernel form agree to 1e-12 relative") {
    Rng rng(20);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + rng.uniform_index(256);
        const int d = 1 + rng.uniform_index(8);
        const PointSet P = testutil::random_unit_points(rng, n, d);
        const double a = warnock_l2_sq(P).value;
        const double b = kernel_disc_sq(P, StarKernel(d)).value;
        CHECK(testutil::rel_diff(a, b) < 1e-12);
    }
}

TEST_CASE("optimized evaluators match the naive serial references") {
    Rng rng(21);
    const PointSet P = testutil::random_unit_points(rng, 100, 3);

    // The serial references accumulate naively, so agreement with the
    // pairwise-summing evaluators is relative to the O(1) term scale rather
    // than the heavily cancelled result.
    CHECK(testutil::rel_diff(warnock_l2_sq(P).value, ref::warnock_l2_sq_serial(P)) < 1e-11);

    const StarKernel star(3);
    CHECK(testutil::rel_diff(kernel_disc_sq(P, star).value,
                             ref::kernel_disc_sq_serial(P, star)) < 1e-11);

    // The weighted-star sums cancel several orders of magnitude, so the two
    // accumulation orders agree only relative to the term scale, not the
    // tiny result.
    const WeightedStarKernel wstar({0.5, 1.0, 2.0});
    CHECK(testutil::rel_diff(kernel_disc_sq(P, wstar).value,
                             ref::kernel_disc_sq_serial(P, wstar)) < 1e-10);

    std::vector<double> mc(80);
    for (double& c : mc) c = 4.0 * rng.uniform() - 2.0;
    const PointSet M(2, std::move(mc));
    const SteinKernel stein(make_default_mixture_score(), 0.9);
    CHECK(testutil::rel_diff(ksd_sq(M, stein).value, ref::ksd_sq_serial(M, stein)) < 1e-12);
    CHECK(testutil::rel_diff(kernel_disc_sq(M, stein).value, ref::ksd_sq_serial(M, stein)) <
          1e-12);
}

TEST_CASE("ksd_sq equals kernel_disc_sq over the stein kernel bitwise") {
    // kF == 0 and c == 0 contribute exactly 0.0 in the general form, so the
    // two entry points must agree to the last bit.
    Rng rng(22);
    std::vector<double> mc(64);
    for (double& c : mc) c = 4.0 * rng.uniform() - 2.0;
    const PointSet M(2, std::move(mc));
    const SteinKernel K(make_default_mixture_score(), 1.1);
    CHECK(ksd_sq(M, K).value == kernel_disc_sq(M, K).value);
}

TEST_CASE("duplicating a point leaves the ksd of a singleton pair consistent") {
    const SteinKernel K(make_default_mixture_score(), 1.0);
    const PointSet one(2, {0.3, -0.4});
    const PointSet two(2, {0.3, -0.4, 0.3, -0.4});
    // n=2 copies of x: (1/4) * 4 k0(x,x) = k0(x,x) = the n=1 value
    CHECK(ksd_sq(two, K).value == doctest::Approx(ksd_sq(one, K).value).epsilon(1e-15));
}

TEST_CASE("kernel_disc_sq is permutation invariant") {
    Rng rng(23);
    const PointSet P = testutil::random_unit_points(rng, 60, 2);
    std::vector<int> perm(60);
    for (int i = 0; i < 60; ++i) perm[i] = i;
    for (int i = 59; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    std::vector<double> shuffled;
    for (int idx : perm) {
        shuffled.push_back(P.coord(idx, 0));
        shuffled.push_back(P.coord(idx, 1));
    }
    const PointSet Q(2, std::move(shuffled));

    CHECK(testutil::rel_diff(kernel_disc_sq(P, StarKernel(2)).value,
                             kernel_disc_sq(Q, StarKernel(2)).value) < 1e-13);
    // the exact linf evaluator works on sorted grids, so it is bitwise stable
    CHECK(linf_star_exact(P).value == linf_star_exact(Q).value);
}

TEST_CASE("monte carlo oracle brackets the closed-form L2 value") {
    Rng rng(24);
    const PointSet P = testutil::random_unit_points(rng, 32, 2);
    const McEstimate est = mc_l2_oracle(P, 200000, 7);
    const double exact = warnock_l2_sq(P).value;
    CHECK(std::abs(est.value - exact) < 4.0 * est.std_error);

    const PointSet mid(1, {0.5});
    const McEstimate m1 = mc_l2_oracle(mid, 1000000, 3);
    CHECK(std::abs(m1.value - 1.0 / 12.0) < 3.0 * m1.std_error);

    CHECK(mc_l2_oracle(P, 5000, 9).value == mc_l2_oracle(P, 5000, 9).value);
    CHECK_THROWS_AS(mc_l2_oracle(P, 0, 1), ContractError);
}

TEST_CASE("exact linf equals the brute-force grid walk bitwise") {
    Rng rng(25);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 1 + rng.uniform_index(25);
        const int d = 1 + rng.uniform_index(3);
        const PointSet P = testutil::random_unit_points(rng, n, d);
        CHECK(linf_star_exact(P).value == ref::linf_star_grid_serial(P));
    }
}

TEST_CASE("exact linf handles boundary and duplicated coordinates") {
    // exact 0/1 coordinates, duplicated values, and a point at the far corner
    const PointSet A(2, {0.1, 1.0, 0.1, 0.2});
    CHECK(linf_star_exact(A).value == ref::linf_star_grid_serial(A));
    CHECK(linf_star_exact(A).value == doctest::Approx(0.5).epsilon(1e-15));

    const PointSet B(2, {0.0, 0.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5});
    CHECK(linf_star_exact(B).value == ref::linf_star_grid_serial(B));

    const PointSet C(3, {0.25, 0.25, 1.0, 0.25, 0.25, 1.0, 0.75, 0.1, 0.9});
    CHECK(linf_star_exact(C).value == ref::linf_star_grid_serial(C));

    CHECK_THROWS_AS(linf_star_exact(PointSet(1, {1.5})), DomainError);
}

TEST_CASE("midpoint lattices have linf exactly 1/(2n)") {
    for (int n : {1, 2, 4, 8, 16, 32, 64}) {
        std::vector<double> coords(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            coords[static_cast<std::size_t>(i)] = (2.0 * i + 1.0) / (2.0 * n);
        const PointSet P(1, std::move(coords));
        CHECK(linf_star_exact(P).value == 0.5 / n);
    }
}

TEST_CASE("sampled lower bound never exceeds the exact value and can reach it") {
    Rng rng(26);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + rng.uniform_index(20);
        const int d = 1 + rng.uniform_index(2);
        const PointSet P = testutil::random_unit_points(rng, n, d);
        const double exact = linf_star_exact(P).value;
        CHECK(linf_star_lower_bound(P, 50, trial).value <= exact);
        // enough trials to cover the whole corner grid -> exhaustive -> equal
        CHECK(linf_star_lower_bound(P, 1000000, trial).value == exact);
    }
    const PointSet mid(1, {0.5});
    CHECK(linf_star_lower_bound(mid, 10, 0).value == 0.5);
    CHECK(linf_star_lower_bound(mid, 1, 12345).value ==
          linf_star_lower_bound(mid, 1, 12345).value);
}

TEST_CASE("linf guard trips on infeasible grids and advises the lower bound") {
    Rng rng(27);
    const PointSet P = testutil::random_unit_points(rng, 1500, 3);  // 1501^3 cells > 1e9
    CHECK_THROWS_AS(linf_star_exact(P), ResourceError);
    CHECK(linf_star_lower_bound(P, 2000, 5).value > 0.0);
}

TEST_CASE("sobol prefix linf values against published references") {
    // d=2, 50 points skipping the all-zeros origin point: 0.068086 in the
    // literature for this construction.
    const PointSet P51 = sobol(51, 2);
    std::vector<double> tail(P51.data().begin() + 2, P51.data().end());
    const PointSet P50(2, std::move(tail));
    CHECK(linf_star_exact(P50).value == doctest::Approx(0.068086).epsilon(1e-4));

    // frozen regression value for the origin-included d=3 prefix
    CHECK(linf_star_exact(sobol(50, 3)).value == 0.11183349609374998);
}

TEST_CASE("discrepancy kind labels") {
    const PointSet P(1, {0.5});
    CHECK(warnock_l2_sq(P).kind == "l2star-sq");
    CHECK(kernel_disc_sq(P, StarKernel(1)).kind == "l2star-sq");
    CHECK(kernel_disc_sq(P, WeightedStarKernel({1.0})).kind == "wstar-sq");
    CHECK(linf_star_exact(P).kind == "linf");
    CHECK(linf_star_lower_bound(P, 5, 0).kind == "linf-lb");
    const PointSet C(2, {0.0, 0.0});
    CHECK(ksd_sq(C, SteinKernel(make_default_mixture_score(), 1.0)).kind == "ksd-sq");
}

}  // TEST_SUITE
