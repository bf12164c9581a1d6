#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kdsel/pointset.hpp"

namespace kdsel {

class Rng;

// ---------------------------------------------------------------------------
// Uniform-target product kernels, free-function form.
// ---------------------------------------------------------------------------

/// k(x,y) = prod_j (1 - max(x_j, y_j)); x, y in [0,1]^d.
double star_k(std::span<const double> x, std::span<const double> y);

/// One-point integral of star_k against the uniform measure:
/// kF(x) = prod_j (1 - x_j^2)/2.
double star_kF(std::span<const double> x);

/// Double integral of star_k: 3^{-d}.
double star_c(int d);

/// k(x,y) = prod_j (1 + g_j (1 - max(x_j, y_j))); weights g_j > 0.
double wstar_k(std::span<const double> x, std::span<const double> y,
               std::span<const double> gamma);

/// kF(x) = prod_j (1 + g_j (1 - x_j^2)/2).
double wstar_kF(std::span<const double> x, std::span<const double> gamma);

/// Double integral: prod_j (1 + g_j/3).
double wstar_c(std::span<const double> gamma);

// ---------------------------------------------------------------------------
// Score models: s(x) = grad log q(x) of a target density q, plus an IID
// sampler for the same target. Immutable after construction; evaluation is
// pure and safe for concurrent use (sample() requires a caller-owned Rng).
// ---------------------------------------------------------------------------

class ScoreModel {
public:
    virtual ~ScoreModel() = default;

    virtual int dim() const = 0;

    /// Writes s(x) into out[0..dim). Caller must ensure x is in the open
    /// support (see check_domain); violations throw DomainError.
    virtual void score(const double* x, double* out) const = 0;

    /// Draws one IID sample from the target into out[0..dim).
    virtual void sample(Rng& rng, double* out) const = 0;

    /// Throws DomainError unless x lies in the open support of the target.
    /// No-op for models supported on all of R^d.
    virtual void check_domain(const double* x) const;

    /// True when the support is the open unit cube rather than all of R^d;
    /// optimizers must then keep iterates strictly inside.
    virtual bool bounded_support() const { return false; }

    virtual std::string name() const = 0;
};

/// Gaussian mixture: q(x) = sum_i w_i N(x; mu_i, Sigma_i).
/// s(x) = sum_i t_i(x) Sigma_i^{-1} (mu_i - x) with posterior component
/// responsibilities t_i(x), computed via log-sum-exp.
class GaussianMixtureScore final : public ScoreModel {
public:
    /// weights: positive, summing to 1 (within 1e-12); means: one length-d
    /// vector per component; covs: one row-major d*d SPD matrix per
    /// component. Cholesky factorizations precomputed at construction.
    GaussianMixtureScore(int dim, std::vector<double> weights,
                         std::vector<std::vector<double>> means,
                         std::vector<std::vector<double>> covs);

    int dim() const override { return dim_; }
    void score(const double* x, double* out) const override;
    void sample(Rng& rng, double* out) const override;
    std::string name() const override { return "gaussian-mixture"; }

    int components() const { return ncomp_; }

private:
    int dim_;
    int ncomp_;
    std::vector<double> log_weights_;   // log w_i
    std::vector<double> cum_weights_;   // cumulative w_i for sampling
    std::vector<double> means_;         // ncomp * d
    std::vector<double> chol_;          // ncomp * d * d, lower factors L: Sigma = L L^T
    std::vector<double> log_det_half_;  // (1/2) log det Sigma_i
};

/// Independent product of Beta(alpha_j, beta_j) marginals on (0,1)^d.
/// s_j(x) = (alpha_j - 1)/x_j - (beta_j - 1)/(1 - x_j); defined only on the
/// open cube — boundary points are a hard DomainError, never clamped.
class BetaProductScore final : public ScoreModel {
public:
    BetaProductScore(std::vector<double> alpha, std::vector<double> beta);

    int dim() const override { return static_cast<int>(alpha_.size()); }
    void score(const double* x, double* out) const override;
    void sample(Rng& rng, double* out) const override;
    void check_domain(const double* x) const override;
    bool bounded_support() const override { return true; }
    std::string name() const override { return "beta-product"; }

private:
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

/// The 2-D two-well mixture used by the bundled experiments:
/// equal-weight components at (-1.5, 0) and (1.5, 0) with identity covariance.
std::shared_ptr<const ScoreModel> make_default_mixture_score();

/// The 2-D bounded target used by the bundled experiments:
/// independent Beta(2,4) marginals on each coordinate.
std::shared_ptr<const ScoreModel> make_default_beta_score();

// ---------------------------------------------------------------------------
// Stein kernel built from an RBF base kernel k(x,y) = exp(-r^2 / (2h^2)).
// ---------------------------------------------------------------------------

/// Closed form of the Stein kernel
///   k0(x,y) = div_x div_y k + grad_y k . s(x) + grad_x k . s(y) + k s(x).s(y)
/// with precomputed scores sx = s(x), sy = s(y):
///   k0 = k * [ d/h^2 - r^2/h^4 + ((x-y).sx - (x-y).sy)/h^2 + sx.sy ].
/// The expression is evaluated in a fixed order so k0(x,y) == k0(y,x) exactly.
double stein_k0(const double* x, const double* y, int d, double h,
                const double* sx, const double* sy);

/// Convenience overload evaluating the scores internally.
double stein_k0(const ScoreModel& s, const double* x, const double* y, double h);

/// Median-heuristic RBF bandwidth: with med = median of the n(n-1)/2 pairwise
/// Euclidean distances of P (even counts average the two middle order
/// statistics), returns sqrt(med^2 / (2 ln(n+1))), natural log.
/// Requires P.count >= 2; throws DomainError when all points coincide.
double median_bandwidth(const PointSet& P);

// ---------------------------------------------------------------------------
// Kernel abstraction consumed by the evaluators and the subset optimizer:
// pairwise term k(x,y), one-point integral kF(x), and the constant
// c = double integral of k. All families are symmetric in (x,y).
// ---------------------------------------------------------------------------

class Kernel {
public:
    virtual ~Kernel() = default;

    virtual int dim() const = 0;
    virtual std::string name() const = 0;

    virtual double k(const double* x, const double* y) const = 0;
    virtual double kF(const double* x) const = 0;
    virtual double c() const = 0;

    /// Throws DomainError if any point of P lies outside the kernel's domain.
    /// Callers validate serially before entering parallel evaluation loops so
    /// no exception can escape a worker thread.
    virtual void validate(const PointSet& P) const = 0;

    /// Per-point auxiliary values evaluated once and reused across pairs
    /// (score vectors for the Stein family; empty for the others). Validates
    /// P first. Layout: aux_dim() values per point, row-major.
    virtual std::vector<double> prepare(const PointSet& P) const;
    virtual int aux_dim() const { return 0; }

    /// Pairwise term given the points' prepare() rows; defaults to k(x,y).
    virtual double k_prepared(const double* x, const double* y,
                              const double* ax, const double* ay) const;
};

/// Uniform-target kernel behind the L2 star discrepancy.
class StarKernel final : public Kernel {
public:
    explicit StarKernel(int dim);

    int dim() const override { return dim_; }
    std::string name() const override { return "l2star"; }
    double k(const double* x, const double* y) const override;
    double kF(const double* x) const override;
    double c() const override;
    void validate(const PointSet& P) const override;

private:
    int dim_;
};

/// Uniform-target kernel behind the weighted L2 star discrepancy.
class WeightedStarKernel final : public Kernel {
public:
    /// One positive weight per coordinate.
    explicit WeightedStarKernel(std::vector<double> gamma);

    int dim() const override { return static_cast<int>(gamma_.size()); }
    std::string name() const override { return "wstar"; }
    double k(const double* x, const double* y) const override;
    double kF(const double* x) const override;
    double c() const override;
    void validate(const PointSet& P) const override;

    const std::vector<double>& gamma() const { return gamma_; }

private:
    std::vector<double> gamma_;
};

/// Stein kernel: kF vanishes identically and c = 0, so the squared
/// discrepancy reduces to the pure double sum (the squared KSD).
class SteinKernel final : public Kernel {
public:
    SteinKernel(std::shared_ptr<const ScoreModel> score, double bandwidth);

    int dim() const override { return score_->dim(); }
    std::string name() const override { return "ksd"; }
    double k(const double* x, const double* y) const override;
    double kF(const double*) const override { return 0.0; }
    double c() const override { return 0.0; }
    void validate(const PointSet& P) const override;

    std::vector<double> prepare(const PointSet& P) const override;
    int aux_dim() const override { return score_->dim(); }
    double k_prepared(const double* x, const double* y,
                      const double* ax, const double* ay) const override;

    double bandwidth() const { return h_; }
    const ScoreModel& score_model() const { return *score_; }
    std::shared_ptr<const ScoreModel> score_ptr() const { return score_; }

private:
    std::shared_ptr<const ScoreModel> score_;
    double h_;
};

}  // namespace kdsel
