#include "kdsel/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "kdsel/errors.hpp"
#include "kdsel/parallel.hpp"
#include "kdsel/rng.hpp"

namespace kdsel {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw ContractError(std::string(what) + ": dimension mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// Product kernels
// ---------------------------------------------------------------------------

double star_k(std::span<const double> x, std::span<const double> y) {
    require_same_dim(x.size(), y.size(), "star_k");
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) p *= 1.0 - std::max(x[j], y[j]);
    return p;
}

double star_kF(std::span<const double> x) {
    double p = 1.0;
    for (double c : x) p *= (1.0 - c * c) / 2.0;
    return p;
}

double star_c(int d) {
    if (d < 1) throw ContractError("star_c: dimension must be >= 1");
    double p = 1.0;
    for (int j = 0; j < d; ++j) p /= 3.0;
    return p;
}

double wstar_k(std::span<const double> x, std::span<const double> y,
               std::span<const double> gamma) {
    require_same_dim(x.size(), y.size(), "wstar_k");
    require_same_dim(x.size(), gamma.size(), "wstar_k");
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        p *= 1.0 + gamma[j] * (1.0 - std::max(x[j], y[j]));
    return p;
}

double wstar_kF(std::span<const double> x, std::span<const double> gamma) {
    require_same_dim(x.size(), gamma.size(), "wstar_kF");
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        p *= 1.0 + gamma[j] * (1.0 - x[j] * x[j]) / 2.0;
    return p;
}

double wstar_c(std::span<const double> gamma) {
    double p = 1.0;
    for (double g : gamma) p *= 1.0 + g / 3.0;
    return p;
}

// ---------------------------------------------------------------------------
// Score models
// ---------------------------------------------------------------------------

void ScoreModel::check_domain(const double*) const {}

GaussianMixtureScore::GaussianMixtureScore(int dim, std::vector<double> weights,
                                           std::vector<std::vector<double>> means,
                                           std::vector<std::vector<double>> covs)
    : dim_(dim), ncomp_(static_cast<int>(weights.size())) {
    if (dim_ < 1) throw ConfigError("gaussian-mixture: dimension must be >= 1");
    if (ncomp_ < 1) throw ConfigError("gaussian-mixture: need at least one component");
    if (means.size() != weights.size() || covs.size() != weights.size())
        throw ConfigError("gaussian-mixture: weights/means/covariances count mismatch");

    double wsum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0)) throw ConfigError("gaussian-mixture: weights must be positive");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ConfigError("gaussian-mixture: weights must sum to 1");

    const std::size_t d = static_cast<std::size_t>(dim_);
    means_.reserve(weights.size() * d);
    chol_.assign(weights.size() * d * d, 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        log_weights_.push_back(std::log(weights[i]));
        cum_weights_.push_back((cum_weights_.empty() ? 0.0 : cum_weights_.back()) + weights[i]);
        if (means[i].size() != d) throw ConfigError("gaussian-mixture: mean dimension mismatch");
        means_.insert(means_.end(), means[i].begin(), means[i].end());

        const std::vector<double>& S = covs[i];
        if (S.size() != d * d) throw ConfigError("gaussian-mixture: covariance must be d x d");
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t q = r + 1; q < d; ++q)
                if (std::abs(S[r * d + q] - S[q * d + r]) > 1e-12)
                    throw ConfigError("gaussian-mixture: covariance not symmetric");

        // Lower Cholesky factor; failure means the matrix is not positive
        // definite.
        double* L = chol_.data() + i * d * d;
        double log_det = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t q = 0; q <= r; ++q) {
                double acc = S[r * d + q];
                for (std::size_t t = 0; t < q; ++t) acc -= L[r * d + t] * L[q * d + t];
                if (q == r) {
                    if (!(acc > 0.0))
                        throw ConfigError("gaussian-mixture: covariance not positive definite");
                    L[r * d + r] = std::sqrt(acc);
                    log_det += std::log(acc);
                } else {
                    L[r * d + q] = acc / L[q * d + q];
                }
            }
        }
        log_det_half_.push_back(0.5 * log_det);
    }
    cum_weights_.back() = 1.0;
}

void GaussianMixtureScore::score(const double* x, double* out) const {
    const std::size_t d = static_cast<std::size_t>(dim_);
    // Per-component log density up to the shared -d/2 log(2 pi) constant,
    // and the vector Sigma_i^{-1} (mu_i - x) via two triangular solves.
    std::vector<double> work(d);
    std::vector<double> pulls(static_cast<std::size_t>(ncomp_) * d);
    std::vector<double> logp(static_cast<std::size_t>(ncomp_));
    for (int i = 0; i < ncomp_; ++i) {
        const double* mu = means_.data() + static_cast<std::size_t>(i) * d;
        const double* L = chol_.data() + static_cast<std::size_t>(i) * d * d;
        double* pull = pulls.data() + static_cast<std::size_t>(i) * d;
        // Forward solve L w = (mu - x).
        for (std::size_t r = 0; r < d; ++r) {
            double acc = mu[r] - x[r];
            for (std::size_t t = 0; t < r; ++t) acc -= L[r * d + t] * work[t];
            work[r] = acc / L[r * d + r];
        }
        double quad = 0.0;
        for (std::size_t r = 0; r < d; ++r) quad += work[r] * work[r];
        logp[static_cast<std::size_t>(i)] = log_weights_[static_cast<std::size_t>(i)] -
                                            log_det_half_[static_cast<std::size_t>(i)] - 0.5 * quad;
        // Back solve L^T pull = w, giving Sigma^{-1} (mu - x).
        for (std::size_t r = d; r-- > 0;) {
            double acc = work[r];
            for (std::size_t t = r + 1; t < d; ++t) acc -= L[t * d + r] * pull[t];
            pull[r] = acc / L[r * d + r];
        }
    }
    const double lmax = *std::max_element(logp.begin(), logp.end());
    double z = 0.0;
    for (double lp : logp) z += std::exp(lp - lmax);
    for (std::size_t r = 0; r < d; ++r) out[r] = 0.0;
    for (int i = 0; i < ncomp_; ++i) {
        const double resp = std::exp(logp[static_cast<std::size_t>(i)] - lmax) / z;
        const double* pull = pulls.data() + static_cast<std::size_t>(i) * d;
        for (std::size_t r = 0; r < d; ++r) out[r] += resp * pull[r];
    }
}

void GaussianMixtureScore::sample(Rng& rng, double* out) const {
    const std::size_t d = static_cast<std::size_t>(dim_);
    const double u = rng.uniform();
    int comp = 0;
    while (comp + 1 < ncomp_ && u >= cum_weights_[static_cast<std::size_t>(comp)]) ++comp;
    std::vector<double> z(d);
    for (std::size_t r = 0; r < d; ++r) z[r] = rng.normal();
    const double* mu = means_.data() + static_cast<std::size_t>(comp) * d;
    const double* L = chol_.data() + static_cast<std::size_t>(comp) * d * d;
    for (std::size_t r = 0; r < d; ++r) {
        double acc = mu[r];
        for (std::size_t t = 0; t <= r; ++t) acc += L[r * d + t] * z[t];
        out[r] = acc;
    }
}

BetaProductScore::BetaProductScore(std::vector<double> alpha, std::vector<double> beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.empty() || alpha_.size() != beta_.size())
        throw ConfigError("beta-product: need matching nonempty alpha/beta lists");
    for (std::size_t j = 0; j < alpha_.size(); ++j)
        if (!(alpha_[j] > 0.0) || !(beta_[j] > 0.0))
            throw ConfigError("beta-product: shapes must be positive");
}

void BetaProductScore::check_domain(const double* x) const {
    for (std::size_t j = 0; j < alpha_.size(); ++j)
        if (!(x[j] > 0.0) || !(x[j] < 1.0))
            throw DomainError("beta-product score undefined at coordinate " +
                              std::to_string(j) + " = " + std::to_string(x[j]) +
                              " (open cube required)");
}

void BetaProductScore::score(const double* x, double* out) const {
    check_domain(x);
    for (std::size_t j = 0; j < alpha_.size(); ++j)
        out[j] = (alpha_[j] - 1.0) / x[j] - (beta_[j] - 1.0) / (1.0 - x[j]);
}

void BetaProductScore::sample(Rng& rng, double* out) const {
    for (std::size_t j = 0; j < alpha_.size(); ++j) out[j] = rng.beta(alpha_[j], beta_[j]);
}

std::shared_ptr<const ScoreModel> make_default_mixture_score() {
    return std::make_shared<GaussianMixtureScore>(
        2, std::vector<double>{0.5, 0.5},
        std::vector<std::vector<double>>{{-1.5, 0.0}, {1.5, 0.0}},
        std::vector<std::vector<double>>{{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}});
}

std::shared_ptr<const ScoreModel> make_default_beta_score() {
    return std::make_shared<BetaProductScore>(std::vector<double>{2.0, 2.0},
                                              std::vector<double>{4.0, 4.0});
}

// ---------------------------------------------------------------------------
// Stein kernel and bandwidth
// ---------------------------------------------------------------------------

double stein_k0(const double* x, const double* y, int d, double h,
                const double* sx, const double* sy) {
    const double h2 = h * h;
    double r2 = 0.0;
    double u_sx = 0.0;
    double u_sy = 0.0;
    double sxsy = 0.0;
    for (int j = 0; j < d; ++j) {
        const double u = x[j] - y[j];
        r2 += u * u;
        u_sx += u * sx[j];
        u_sy += u * sy[j];
        sxsy += sx[j] * sy[j];
    }
    const double base = std::exp(-r2 / (2.0 * h2));
    return base * (d / h2 - r2 / (h2 * h2) + (u_sx - u_sy) / h2 + sxsy);
}

double stein_k0(const ScoreModel& s, const double* x, const double* y, double h) {
    const int d = s.dim();
    std::vector<double> sx(static_cast<std::size_t>(d));
    std::vector<double> sy(static_cast<std::size_t>(d));
    s.score(x, sx.data());
    s.score(y, sy.data());
    return stein_k0(x, y, d, h, sx.data(), sy.data());
}

double median_bandwidth(const PointSet& P) {
    const int n = P.count();
    const int d = P.dim();
    if (n < 2) throw ContractError("median_bandwidth: need at least 2 points");

    const std::size_t pairs = static_cast<std::size_t>(n) * (n - 1) / 2;
    std::vector<double> dist(pairs);
    // Row i holds pairs (i, j) for j > i, starting at i*(n-1) - i*(i-1)/2.
    parallel_for_index(n - 1, [&](int i) {
        const std::size_t off = static_cast<std::size_t>(i) * (n - 1) -
                                static_cast<std::size_t>(i) * (i - 1) / 2;
        const double* xi = P.point(i);
        for (int j = i + 1; j < n; ++j) {
            const double* xj = P.point(j);
            double r2 = 0.0;
            for (int t = 0; t < d; ++t) {
                const double u = xi[t] - xj[t];
                r2 += u * u;
            }
            dist[off + static_cast<std::size_t>(j - i - 1)] = std::sqrt(r2);
        }
    });

    double med;
    if (pairs % 2 == 1) {
        const std::size_t mid = pairs / 2;
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
        med = dist[mid];
    } else {
        const std::size_t hi = pairs / 2;
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(hi), dist.end());
        const double upper = dist[hi];
        const double lower =
            *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(hi));
        med = 0.5 * (lower + upper);
    }
    if (med == 0.0) throw DomainError("median_bandwidth: all points identical (median distance 0)");
    return std::sqrt(med * med / (2.0 * std::log(static_cast<double>(n) + 1.0)));
}

// ---------------------------------------------------------------------------
// Kernel implementations
// ---------------------------------------------------------------------------

std::vector<double> Kernel::prepare(const PointSet& P) const {
    validate(P);
    return {};
}

double Kernel::k_prepared(const double* x, const double* y, const double*,
                          const double*) const {
    return k(x, y);
}

StarKernel::StarKernel(int dim) : dim_(dim) {
    if (dim_ < 1) throw ConfigError("l2star kernel: dimension must be >= 1");
}

double StarKernel::k(const double* x, const double* y) const {
    double p = 1.0;
    for (int j = 0; j < dim_; ++j) p *= 1.0 - std::max(x[j], y[j]);
    return p;
}

double StarKernel::kF(const double* x) const {
    double p = 1.0;
    for (int j = 0; j < dim_; ++j) p *= (1.0 - x[j] * x[j]) / 2.0;
    return p;
}

double StarKernel::c() const { return star_c(dim_); }

void StarKernel::validate(const PointSet& P) const {
    if (P.dim() != dim_) throw ContractError("l2star kernel: point set dimension mismatch");
    if (!P.in_unit_cube())
        throw DomainError("l2star kernel: point set has coordinates outside [0,1]");
}

WeightedStarKernel::WeightedStarKernel(std::vector<double> gamma) : gamma_(std::move(gamma)) {
    if (gamma_.empty()) throw ConfigError("wstar kernel: need at least one weight");
    for (double g : gamma_)
        if (!(g > 0.0)) throw ConfigError("wstar kernel: weights must be positive");
}

double WeightedStarKernel::k(const double* x, const double* y) const {
    double p = 1.0;
    for (std::size_t j = 0; j < gamma_.size(); ++j)
        p *= 1.0 + gamma_[j] * (1.0 - std::max(x[j], y[j]));
    return p;
}

double WeightedStarKernel::kF(const double* x) const {
    double p = 1.0;
    for (std::size_t j = 0; j < gamma_.size(); ++j)
        p *= 1.0 + gamma_[j] * (1.0 - x[j] * x[j]) / 2.0;
    return p;
}

double WeightedStarKernel::c() const { return wstar_c(gamma_); }

void WeightedStarKernel::validate(const PointSet& P) const {
    if (P.dim() != dim()) throw ContractError("wstar kernel: point set dimension mismatch");
    if (!P.in_unit_cube())
        throw DomainError("wstar kernel: point set has coordinates outside [0,1]");
}

SteinKernel::SteinKernel(std::shared_ptr<const ScoreModel> score, double bandwidth)
    : score_(std::move(score)), h_(bandwidth) {
    if (!score_) throw ConfigError("ksd kernel: score model required");
    if (!(h_ > 0.0)) throw ConfigError("ksd kernel: bandwidth must be positive");
}

double SteinKernel::k(const double* x, const double* y) const {
    return stein_k0(*score_, x, y, h_);
}

void SteinKernel::validate(const PointSet& P) const {
    if (P.dim() != dim()) throw ContractError("ksd kernel: point set dimension mismatch");
    for (int i = 0; i < P.count(); ++i) {
        try {
            score_->check_domain(P.point(i));
        } catch (const DomainError& e) {
            throw DomainError("point " + std::to_string(i) + ": " + e.what());
        }
    }
}

std::vector<double> SteinKernel::prepare(const PointSet& P) const {
    validate(P);
    const int d = dim();
    std::vector<double> scores(static_cast<std::size_t>(P.count()) * d);
    // Domain already validated, so score() cannot throw inside the loop.
    parallel_for_index(P.count(), [&](int i) {
        score_->score(P.point(i), scores.data() + static_cast<std::size_t>(i) * d);
    });
    return scores;
}

double SteinKernel::k_prepared(const double* x, const double* y, const double* ax,
                               const double* ay) const {
    return stein_k0(x, y, dim(), h_, ax, ay);
}

}  // namespace kdsel
