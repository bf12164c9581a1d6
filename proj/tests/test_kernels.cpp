#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "kdsel/errors.hpp"
#include "kdsel/kernels.hpp"
#include "kdsel/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace kdsel;

namespace {

// Minimum eigenvalue of the Gram matrix G_ij = k(x_i, x_j): positive
// semidefiniteness is what makes every squared discrepancy nonnegative.
double min_gram_eigenvalue(const PointSet& P, const Kernel& K, double* max_eig) {
    const int n = P.count();
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = K.k(P.point(i), P.point(j));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(G);
    *max_eig = solver.eigenvalues().maxCoeff();
    return solver.eigenvalues().minCoeff();
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("star kernel closed forms") {
    const double x1[] = {0.3}, y1[] = {0.7};
    CHECK(star_k({x1, 1}, {y1, 1}) == doctest::Approx(0.3).epsilon(1e-15));

    const double z2[] = {0.0, 0.0};
    CHECK(star_k({z2, 2}, {z2, 2}) == 1.0);
    const double a2[] = {1.0, 0.5}, b2[] = {0.2, 0.2};
    CHECK(star_k({a2, 2}, {b2, 2}) == 0.0);

    CHECK(star_kF({z2, 2}) == 0.25);  // 2^-d at the origin
    const double half[] = {0.5};
    CHECK(star_kF({half, 1}) == 0.375);
    const double edge[] = {1.0, 0.3};
    CHECK(star_kF({edge, 2}) == 0.0);

    CHECK(star_c(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(star_c(2) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(star_c(10) == doctest::Approx(std::pow(3.0, -10.0)).epsilon(1e-14));
    CHECK_THROWS_AS(star_c(0), ContractError);

    const double too_long[] = {0.1, 0.2};
    CHECK_THROWS_AS(star_k({x1, 1}, {too_long, 2}), ContractError);
    CHECK_THROWS_AS(wstar_k({x1, 1}, {x1, 1}, {too_long, 2}), ContractError);
}

TEST_CASE("star kF and c match quadrature of the pairwise kernel") {
    // kF(x) = int_0^1 k(x,t) dt; the integrand is piecewise linear with a
    // kink at t = x, so Simpson split at x integrates it exactly.
    for (double x : {0.1, 0.5, 0.9}) {
        const auto f = [&](double t) {
            const double xv[] = {x}, tv[] = {t};
            return star_k({xv, 1}, {tv, 1});
        };
        const double quad = oracles::simpson(f, 0.0, x, 64) + oracles::simpson(f, x, 1.0, 64);
        const double xv[] = {x};
        CHECK(std::abs(star_kF({xv, 1}) - quad) < 1e-14);
    }
    // c = int_0^1 kF(t) dt (quadratic integrand, Simpson-exact)
    const auto kf = [](double t) {
        const double tv[] = {t};
        return star_kF({tv, 1});
    };
    CHECK(std::abs(star_c(1) - oracles::simpson(kf, 0.0, 1.0, 64)) < 1e-14);
}

TEST_CASE("weighted star kernel closed forms") {
    const std::vector<double> g1{1.0};
    const double x[] = {0.3}, y[] = {0.7};
    CHECK(wstar_k({x, 1}, {y, 1}, g1) == doctest::Approx(1.3).epsilon(1e-15));

    const std::vector<double> g2{1.0, 1.0};
    const double z2[] = {0.0, 0.0};
    CHECK(wstar_k({z2, 2}, {z2, 2}, g2) == 4.0);
    const std::vector<double> g21{2.0, 1.0};
    const double ones[] = {1.0, 1.0};
    CHECK(wstar_k({ones, 2}, {ones, 2}, g21) == 1.0);

    const double half[] = {0.5};
    CHECK(wstar_kF({half, 1}, g1) == 1.375);
    const double one[] = {1.0};
    CHECK(wstar_kF({one, 1}, g1) == 1.0);
    const std::vector<double> g3{3.0};
    const double zero[] = {0.0};
    CHECK(wstar_kF({zero, 1}, g3) == 2.5);

    CHECK(wstar_c(g1) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(wstar_c(g2) == doctest::Approx(16.0 / 9.0).epsilon(1e-15));
    // gamma -> 0: every factor tends to 1
    const std::vector<double> tiny{1e-12};
    CHECK(wstar_c(tiny) == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("weighted star kF and c match quadrature") {
    for (double gamma : {1.0, 3.0}) {
        const std::vector<double> g{gamma};
        for (double x : {0.0, 0.5, 0.8}) {
            const auto f = [&](double t) {
                const double xv[] = {x}, tv[] = {t};
                return wstar_k({xv, 1}, {tv, 1}, g);
            };
            const double quad = oracles::simpson(f, 0.0, x, 64) + oracles::simpson(f, x, 1.0, 64);
            const double xv[] = {x};
            CHECK(std::abs(wstar_kF({xv, 1}, g) - quad) < 1e-13);
        }
        const auto kf = [&](double t) {
            const double tv[] = {t};
            return wstar_kF({tv, 1}, g);
        };
        CHECK(std::abs(wstar_c(g) - oracles::simpson(kf, 0.0, 1.0, 64)) < 1e-13);
    }
}

TEST_CASE("weighted star dominates into plain star as gamma grows") {
    // wstar_k / gamma^d -> star_k pointwise for large equal weights; the
    // truncation error scales like 1/(gamma * (1 - max coordinate)).
    const double gamma = 1e10;
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + rng.uniform_index(4);
        std::vector<double> x(d), y(d);
        const std::vector<double> g(d, gamma);
        for (int j = 0; j < d; ++j) {
            x[j] = rng.uniform();
            y[j] = rng.uniform();
        }
        const double scaled = wstar_k(x, y, g) / std::pow(gamma, d);
        const double plain = star_k(x, y);
        CHECK(testutil::rel_diff(scaled, plain) < 1e-6);
    }
}

TEST_CASE("gaussian mixture score: construction validation") {
    using V = std::vector<double>;
    using VV = std::vector<std::vector<double>>;
    CHECK_THROWS_AS(GaussianMixtureScore(1, V{0.6, 0.6}, VV{{0.0}, {1.0}}, VV{{1.0}, {1.0}}),
                    ConfigError);  // weights do not sum to 1
    CHECK_THROWS_AS(GaussianMixtureScore(1, V{1.0, 0.0}, VV{{0.0}, {1.0}}, VV{{1.0}, {1.0}}),
                    ConfigError);  // non-positive weight
    CHECK_THROWS_AS(GaussianMixtureScore(1, V{1.0}, VV{{0.0, 0.0}}, VV{{1.0}}),
                    ConfigError);  // mean dimension mismatch
    CHECK_THROWS_AS(GaussianMixtureScore(2, V{1.0}, VV{{0.0, 0.0}}, VV{{1.0, 0.5, 0.4, 1.0}}),
                    ConfigError);  // asymmetric covariance
    CHECK_THROWS_AS(GaussianMixtureScore(2, V{1.0}, VV{{0.0, 0.0}}, VV{{1.0, 2.0, 2.0, 1.0}}),
                    ConfigError);  // not positive definite
    CHECK_THROWS_AS(GaussianMixtureScore(1, V{}, VV{}, VV{}), ConfigError);
}

TEST_CASE("gaussian mixture score equals grad log q (finite differences)") {
    // Two components in 2-D, one with a genuinely non-diagonal covariance.
    const std::vector<double> w{0.3, 0.7};
    const std::vector<std::vector<double>> mu{{-1.0, 0.5}, {1.5, -0.5}};
    const std::vector<std::vector<double>> cov{{2.0, 0.5, 0.5, 1.0}, {1.0, 0.0, 0.0, 0.5}};
    const GaussianMixtureScore score(2, w, mu, cov);

    oracles::MixtureDensity q;
    q.dim = 2;
    q.weights = w;
    q.means = mu;
    // hand inverses and normalizers
    const double det0 = 2.0 * 1.0 - 0.25, det1 = 0.5;
    q.cov_inv = {{1.0 / det0, -0.5 / det0, -0.5 / det0, 2.0 / det0},
                 {1.0, 0.0, 0.0, 2.0}};
    const double log2pi = std::log(2.0 * std::numbers::pi);
    q.log_norm = {-log2pi - 0.5 * std::log(det0), -log2pi - 0.5 * std::log(det1)};

    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        double x[2] = {4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        double s[2];
        score.score(x, s);
        const auto g =
            oracles::fd_gradient([&](const double* p) { return q.log_q(p); }, x, 2, 1e-6);
        CHECK(std::abs(s[0] - g[0]) < 1e-7);
        CHECK(std::abs(s[1] - g[1]) < 1e-7);
    }
}

TEST_CASE("single gaussian score is mu - x; default mixture vanishes at center") {
    const GaussianMixtureScore single(2, {1.0}, {{0.7, -0.2}}, {{1.0, 0.0, 0.0, 1.0}});
    double x[2] = {0.1, 0.4}, s[2];
    single.score(x, s);
    CHECK(s[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(-0.6).epsilon(1e-14));

    const auto mix = make_default_mixture_score();
    CHECK(mix->dim() == 2);
    CHECK_FALSE(mix->bounded_support());
    double c[2] = {0.0, 0.0}, sc[2];
    mix->score(c, sc);
    CHECK(std::abs(sc[0]) < 1e-15);
    CHECK(std::abs(sc[1]) < 1e-15);
}

TEST_CASE("gaussian mixture sampling matches component moments") {
    const auto mix = make_default_mixture_score();
    Rng rng(12);
    const int n = 100000;
    double sum0 = 0.0, sumsq0 = 0.0, sum1 = 0.0;
    std::vector<double> x(2);
    for (int i = 0; i < n; ++i) {
        mix->sample(rng, x.data());
        sum0 += x[0];
        sumsq0 += x[0] * x[0];
        sum1 += x[1];
    }
    // E[x0] = 0, E[x0^2] = 1 + 1.5^2, E[x1] = 0
    CHECK(std::abs(sum0 / n) < 4.0 * std::sqrt(3.25 / n));
    CHECK(std::abs(sumsq0 / n - 3.25) < 0.1);
    CHECK(std::abs(sum1 / n) < 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("beta product score: closed form, domain, sampling") {
    const BetaProductScore score({2.0, 2.0}, {4.0, 4.0});
    CHECK(score.dim() == 2);
    CHECK(score.bounded_support());

    double x[2] = {0.25, 0.25}, s[2];
    score.score(x, s);  // (alpha-1)/x - (beta-1)/(1-x) = 4 - 4 = 0
    CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-14));

    double y[2] = {0.5, 0.2};
    score.score(y, s);
    CHECK(s[0] == doctest::Approx(1.0 / 0.5 - 3.0 / 0.5).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(1.0 / 0.2 - 3.0 / 0.8).epsilon(1e-14));

    // finite differences of log q = (a-1) log x + (b-1) log(1-x) + const
    const auto logq = [](const double* p) {
        return 1.0 * std::log(p[0]) + 3.0 * std::log(1.0 - p[0]) + 1.0 * std::log(p[1]) +
               3.0 * std::log(1.0 - p[1]);
    };
    const auto g = oracles::fd_gradient(logq, y, 2, 1e-7);
    CHECK(std::abs(s[0] - g[0]) < 1e-6);
    CHECK(std::abs(s[1] - g[1]) < 1e-6);

    double b0[2] = {0.0, 0.5}, b1[2] = {0.5, 1.0};
    CHECK_THROWS_AS(score.score(b0, s), DomainError);
    CHECK_THROWS_AS(score.score(b1, s), DomainError);
    CHECK_THROWS_AS(score.check_domain(b0), DomainError);
    CHECK_NOTHROW(score.check_domain(y));

    CHECK_THROWS_AS(BetaProductScore({2.0}, {4.0, 4.0}), ConfigError);
    CHECK_THROWS_AS(BetaProductScore({0.0}, {4.0}), ConfigError);
    CHECK_THROWS_AS(BetaProductScore({}, {}), ConfigError);

    Rng rng(13);
    const int n = 50000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        double p[2];
        score.sample(rng, p);
        CHECK(p[0] > 0.0);
        CHECK(p[0] < 1.0);
        sum += p[0];
    }
    CHECK(std::abs(sum / n - 1.0 / 3.0) < 0.01);  // Beta(2,4) mean
}

TEST_CASE("stein kernel closed form agrees with the finite-difference definition") {
    const auto mix = make_default_mixture_score();
    const auto beta = make_default_beta_score();
    Rng rng(14);
    for (int trial = 0; trial < 25; ++trial) {
        const double h = 0.5 + rng.uniform();
        double xm[2], ym[2], xb[2], yb[2];
        for (int j = 0; j < 2; ++j) {
            xm[j] = 4.0 * rng.uniform() - 2.0;
            ym[j] = 4.0 * rng.uniform() - 2.0;
            xb[j] = 0.05 + 0.9 * rng.uniform();
            yb[j] = 0.05 + 0.9 * rng.uniform();
        }
        CHECK(std::abs(stein_k0(*mix, xm, ym, h) - oracles::stein_k0_fd(*mix, xm, ym, h)) < 1e-6);
        CHECK(std::abs(stein_k0(*beta, xb, yb, h) - oracles::stein_k0_fd(*beta, xb, yb, h)) < 1e-6);
    }
}

TEST_CASE("stein kernel symmetry is exact and the diagonal is closed-form") {
    const auto mix = make_default_mixture_score();
    const auto beta = make_default_beta_score();
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        const double h = 0.5 + rng.uniform();
        double x[2], y[2];
        for (int j = 0; j < 2; ++j) {
            x[j] = 4.0 * rng.uniform() - 2.0;
            y[j] = 4.0 * rng.uniform() - 2.0;
        }
        CHECK(stein_k0(*mix, x, y, h) == stein_k0(*mix, y, x, h));  // bitwise
        double xb[2] = {0.1 + 0.8 * x[0] / 4.0 + 0.4, 0.1 + 0.8 * y[0] / 4.0 + 0.4};
        double yb[2] = {0.2 + 0.3 * rng.uniform(), 0.2 + 0.3 * rng.uniform()};
        CHECK(stein_k0(*beta, xb, yb, h) == stein_k0(*beta, yb, xb, h));
    }

    // x = y: k0 = d/h^2 + |s(x)|^2
    for (int trial = 0; trial < 20; ++trial) {
        const double h = 0.5 + rng.uniform();
        double x[2] = {3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5}, s[2];
        mix->score(x, s);
        const double expected = 2.0 / (h * h) + s[0] * s[0] + s[1] * s[1];
        CHECK(testutil::rel_diff(stein_k0(*mix, x, x, h), expected) < 1e-13);
    }
    // mixture symmetry center with h = 1: s = 0, so k0 = d = 2
    double c[2] = {0.0, 0.0};
    CHECK(std::abs(stein_k0(*mix, c, c, 1.0) - 2.0) < 1e-15);
}

TEST_CASE("median bandwidth closed-form cases") {
    // two points at distance 1: h = sqrt(1 / (2 ln 3))
    const PointSet two(2, {0.0, 0.0, 1.0, 0.0});
    CHECK(median_bandwidth(two) ==
          doctest::Approx(std::sqrt(1.0 / (2.0 * std::log(3.0)))).epsilon(1e-14));
    CHECK(median_bandwidth(two) == doctest::Approx(0.6747).epsilon(1e-4));

    // distances {1,1,2}, odd count -> med = 1
    const PointSet three(1, {0.0, 1.0, 2.0});
    CHECK(median_bandwidth(three) ==
          doctest::Approx(std::sqrt(1.0 / (2.0 * std::log(4.0)))).epsilon(1e-14));

    // distances {1,1,1,2,2,3}, even count -> med = (1+2)/2
    const PointSet four(1, {0.0, 1.0, 2.0, 3.0});
    CHECK(median_bandwidth(four) ==
          doctest::Approx(std::sqrt(2.25 / (2.0 * std::log(5.0)))).epsilon(1e-14));
}

TEST_CASE("median bandwidth is homogeneous and rejects degenerate inputs") {
    Rng rng(16);
    const PointSet P = testutil::random_unit_points(rng, 30, 3);
    const double h = median_bandwidth(P);
    std::vector<double> sc(P.data());
    for (double& v : sc) v *= 5.0;
    const PointSet Q(3, std::move(sc));
    CHECK(testutil::rel_diff(median_bandwidth(Q), 5.0 * h) < 1e-12);

    CHECK_THROWS_AS(median_bandwidth(PointSet(1, {0.5})), ContractError);
    CHECK_THROWS_AS(median_bandwidth(PointSet(2, {0.3, 0.3, 0.3, 0.3, 0.3, 0.3})), DomainError);
}

TEST_CASE("kernel interface objects validate their inputs") {
    CHECK_THROWS_AS(StarKernel(0), ConfigError);
    CHECK_THROWS_AS(WeightedStarKernel(std::vector<double>{}), ConfigError);
    CHECK_THROWS_AS(WeightedStarKernel({1.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(SteinKernel(nullptr, 1.0), ConfigError);
    CHECK_THROWS_AS(SteinKernel(make_default_mixture_score(), 0.0), ConfigError);

    const StarKernel star(2);
    CHECK(star.c() == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(star.validate(PointSet(1, {0.5})), ContractError);
    CHECK_THROWS_AS(star.validate(PointSet(2, {0.5, 1.5})), DomainError);
    CHECK_NOTHROW(star.validate(PointSet(2, {0.0, 1.0})));

    const WeightedStarKernel wstar({1.0, 2.0});
    CHECK(wstar.dim() == 2);
    CHECK(wstar.c() == doctest::Approx((4.0 / 3.0) * (5.0 / 3.0)).epsilon(1e-15));

    const SteinKernel stein(make_default_beta_score(), 1.0);
    CHECK(stein.kF(nullptr) == 0.0);
    CHECK(stein.c() == 0.0);
    CHECK_THROWS_AS(stein.validate(PointSet(2, {0.0, 0.5})), DomainError);
}

TEST_CASE("stein kernel prepare caches scores; k_prepared matches k bitwise") {
    const auto mix = make_default_mixture_score();
    const SteinKernel K(mix, 0.8);
    Rng rng(17);
    std::vector<double> coords(20);
    for (double& c : coords) c = 3.0 * rng.uniform() - 1.5;
    const PointSet P(2, std::move(coords));

    const std::vector<double> aux = K.prepare(P);
    REQUIRE(static_cast<int>(aux.size()) == P.count() * K.aux_dim());
    for (int i = 0; i < P.count(); ++i) {
        double s[2];
        mix->score(P.point(i), s);
        CHECK(aux[2 * i] == s[0]);
        CHECK(aux[2 * i + 1] == s[1]);
    }
    for (int i = 0; i < P.count(); ++i)
        for (int j = 0; j < P.count(); ++j) {
            const double direct = K.k(P.point(i), P.point(j));
            const double prepared = K.k_prepared(P.point(i), P.point(j), &aux[2 * i], &aux[2 * j]);
            CHECK(direct == prepared);
            CHECK(direct == stein_k0(*mix, P.point(i), P.point(j), 0.8));
        }
}

TEST_CASE("gram matrices are positive semidefinite") {
    Rng rng(18);
    const PointSet U = testutil::random_unit_points(rng, 40, 3);
    double max_eig = 0.0;

    CHECK(min_gram_eigenvalue(U, StarKernel(3), &max_eig) > -1e-8 * max_eig);
    CHECK(min_gram_eigenvalue(U, WeightedStarKernel({1.0, 1.0, 1.0}), &max_eig) >
          -1e-8 * max_eig);

    std::vector<double> mc(60);
    for (double& c : mc) c = 4.0 * rng.uniform() - 2.0;
    const PointSet M(2, std::move(mc));
    CHECK(min_gram_eigenvalue(M, SteinKernel(make_default_mixture_score(), 1.0), &max_eig) >
          -1e-8 * max_eig);
}

}  // TEST_SUITE
