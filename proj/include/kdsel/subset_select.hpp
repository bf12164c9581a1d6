#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kdsel/discrepancy.hpp"
#include "kdsel/kernels.hpp"
#include "kdsel/pointset.hpp"

namespace kdsel {

class Rng;

/// A swap is accepted only when it lowers the interaction sum by more than
/// this, so descent terminates and never loops on floating-point ties.
inline constexpr double kEpsImprove = 1e-12;

/// Pair/diagonal contributions V(i,j) of the population to the squared
/// discrepancy of any m-subset: for i != j, V(i,j) = k(x_i, x_j)/m^2; on the
/// diagonal V(i,i) = -(2/m) kF(x_i) + k(x_i, x_i)/m^2. The subset objective
/// is then sum over subset pairs of V plus the kernel constant c. The target
/// size m is fixed in the denominators so the values are constants of the
/// whole optimization.
class ContributionTable {
public:
    /// With cache set (and n small enough to afford n^2 doubles), all pair
    /// values are precomputed; otherwise they are evaluated on demand from
    /// the kernel and its per-point prepared data.
    ContributionTable(const PointSet& P, const Kernel& K, int m, bool cache);

    int count() const { return n_; }
    int subset_size() const { return m_; }
    double constant() const { return c_; }

    /// V(i,j); symmetric in (i,j).
    double v(int i, int j) const {
        if (i == j) return diag_[static_cast<std::size_t>(i)];
        if (!cache_.empty())
            return cache_[static_cast<std::size_t>(i) * n_ + j];
        return pair(i, j);
    }

private:
    double pair(int i, int j) const;

    const PointSet* points_;
    const Kernel* kernel_;
    int n_;
    int m_;
    double c_;
    std::vector<double> aux_;    // kernel's per-point prepared data
    std::vector<double> diag_;   // V(i,i)
    std::vector<double> cache_;  // off-diagonal V, n*n, optional
};

/// Convenience single-entry evaluation of the same two-case formula.
double contribution_v(const PointSet& P, const Kernel& K, int m, int i, int j);

/// Current subset plus the contribution array B over the whole population:
/// for members, removing i changes the interaction sum S by exactly -B_i;
/// for non-members, adding k changes it by exactly +B_k. A swap (h out,
/// k in) changes S by B_k - B_h - 2 V(h,k), and the whole array refreshes in
/// Theta(n) table lookups after a swap.
class SubsetState {
public:
    SubsetState(const ContributionTable& table, const IndexSubset& subset);

    const std::vector<int>& members() const { return members_; }  // ascending
    bool contains(int i) const { return member_[static_cast<std::size_t>(i)] != 0; }
    IndexSubset subset() const;

    double interaction_sum() const { return S_; }
    double objective() const { return S_ + table_->constant(); }
    double b(int i) const { return B_[static_cast<std::size_t>(i)]; }

    /// Exact change in S from swapping member h out and non-member k in.
    double swap_delta(int h, int k) const;

    struct Swap {
        int out;
        int in;
        double delta;
    };

    /// Best (most negative delta) swap over all m(n-m) candidates, ties
    /// broken by smallest (out, in); nullopt when no swap improves by more
    /// than kEpsImprove.
    std::optional<Swap> best_swap() const;

    /// Applies the swap and updates S and every B entry in Theta(n) lookups.
    void apply_swap(int h, int k);

    const ContributionTable& table() const { return *table_; }

private:
    const ContributionTable* table_;
    std::vector<int> members_;
    std::vector<char> member_;
    std::vector<double> B_;
    double S_;
};

/// Repeated best-swap descent until no improving swap remains or the time
/// budget (seconds; 0 = unlimited) expires between swaps. Returns the number
/// of accepted swaps.
long local_search(SubsetState& state, double time_budget = 0.0);

/// Replaces `count` uniformly chosen members with uniformly chosen
/// non-members (all distinct), restoring the state invariants swap by swap.
void perturb(SubsetState& state, int count, Rng& rng);

/// Draws L IID m-subsets, keeps the ceil(L/4) with the lowest objective, and
/// among those returns the one whose minimum symmetric difference to the
/// subsets in `prior` is largest (ties: lower objective, then lexicographic).
/// With empty `prior`, simply the lowest-objective draw.
IndexSubset pick_initial(const ContributionTable& table, int L,
                         const std::vector<IndexSubset>& prior, Rng& rng);

struct SelectConfig {
    int m = 0;
    int global_restarts = 5;   // fresh initializations
    int local_restarts = 5;    // perturb-and-descend rounds per initialization
    int init_candidates = 100; // IID draws scored per initialization
    int perturb_count = 0;     // members replaced per local restart; 0 = min(8, ceil(m/10))
    double time_budget = 0.0;  // seconds, soft, checked between swaps; 0 = unlimited
    std::uint64_t seed = 0;
    bool cache_gram = true;    // dense pair cache when n <= 2^14
};

/// One row of the optimization trace: the objective after an accepted swap
/// (or after an initialization, with out = in = -1).
struct TraceRow {
    int restart;
    long iteration;
    double objective;
    int swapped_out;
    int swapped_in;
};

struct SelectResult {
    IndexSubset subset;
    DiscrepancyValue value;  // squared-discrepancy objective of `subset`
    std::vector<TraceRow> trace;
};

/// Swap-descent subset selection: global_restarts initializations via
/// pick_initial, each followed by local_restarts rounds of descent and
/// perturbation; returns the best subset seen anywhere (best objective
/// initialized to +infinity). Deterministic given cfg.seed.
SelectResult select_subset(const PointSet& P, const Kernel& K, const SelectConfig& cfg);

}  // namespace kdsel
