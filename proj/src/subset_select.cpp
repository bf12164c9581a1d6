#include "kdsel/subset_select.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "kdsel/errors.hpp"
#include "kdsel/parallel.hpp"
#include "kdsel/rng.hpp"

namespace kdsel {

namespace {

using Clock = std::chrono::steady_clock;

bool expired(Clock::time_point start, double budget_seconds) {
    if (budget_seconds <= 0.0) return false;
    return std::chrono::duration<double>(Clock::now() - start).count() >= budget_seconds;
}

}  // namespace

// ---------------------------------------------------------------------------
// ContributionTable
// ---------------------------------------------------------------------------

ContributionTable::ContributionTable(const PointSet& P, const Kernel& K, int m, bool cache)
    : points_(&P), kernel_(&K), n_(P.count()), m_(m), c_(K.c()) {
    if (m_ < 1) throw ContractError("ContributionTable: subset size must be >= 1");
    aux_ = K.prepare(P);  // validates P against the kernel domain

    const double mm = static_cast<double>(m_) * static_cast<double>(m_);
    const int ad = K.aux_dim();
    const auto aux_row = [&](int i) {
        return ad ? aux_.data() + static_cast<std::size_t>(i) * ad : nullptr;
    };

    diag_.resize(static_cast<std::size_t>(n_));
    parallel_for_index(n_, [&](int i) {
        const double* x = P.point(i);
        diag_[static_cast<std::size_t>(i)] =
            -(2.0 / static_cast<double>(m_)) * K.kF(x) +
            K.k_prepared(x, x, aux_row(i), aux_row(i)) / mm;
    });

    if (cache) {
        cache_.resize(static_cast<std::size_t>(n_) * n_);
        parallel_for_index(n_, [&](int i) {
            const double* xi = P.point(i);
            const double* ai = aux_row(i);
            double* row = cache_.data() + static_cast<std::size_t>(i) * n_;
            for (int j = 0; j < n_; ++j)
                row[j] = K.k_prepared(xi, P.point(j), ai, aux_row(j)) / mm;
        });
    }
}

double ContributionTable::pair(int i, int j) const {
    const int ad = kernel_->aux_dim();
    const double* ai = ad ? aux_.data() + static_cast<std::size_t>(i) * ad : nullptr;
    const double* aj = ad ? aux_.data() + static_cast<std::size_t>(j) * ad : nullptr;
    const double mm = static_cast<double>(m_) * static_cast<double>(m_);
    return kernel_->k_prepared(points_->point(i), points_->point(j), ai, aj) / mm;
}

double contribution_v(const PointSet& P, const Kernel& K, int m, int i, int j) {
    if (m < 1) throw ContractError("contribution_v: subset size must be >= 1");
    if (i < 0 || i >= P.count() || j < 0 || j >= P.count())
        throw ContractError("contribution_v: index out of range");
    const double mm = static_cast<double>(m) * static_cast<double>(m);
    const double* xi = P.point(i);
    const double* xj = P.point(j);
    if (i == j) return -(2.0 / static_cast<double>(m)) * K.kF(xi) + K.k(xi, xi) / mm;
    return K.k(xi, xj) / mm;
}

// ---------------------------------------------------------------------------
// SubsetState
// ---------------------------------------------------------------------------

SubsetState::SubsetState(const ContributionTable& table, const IndexSubset& subset)
    : table_(&table) {
    const int n = table.count();
    if (subset.parent_count() != n)
        throw ContractError("SubsetState: subset parent_count does not match the table");
    if (subset.size() != table.subset_size())
        throw ContractError("SubsetState: subset size does not match the table's m");

    members_ = subset.members();
    member_.assign(static_cast<std::size_t>(n), 0);
    for (int i : members_) member_[static_cast<std::size_t>(i)] = 1;

    // B_i = V(i,i) + sum over members j != i of 2 V(i,j); the same formula
    // covers members and non-members.
    B_.resize(static_cast<std::size_t>(n));
    parallel_for_index(n, [&](int i) {
        double acc = table_->v(i, i);
        for (int j : members_)
            if (j != i) acc += 2.0 * table_->v(i, j);
        B_[static_cast<std::size_t>(i)] = acc;
    });

    // S = sum over subset pairs, diagonal once, off-diagonal doubled.
    double s = 0.0;
    for (std::size_t a = 0; a < members_.size(); ++a) {
        s += table_->v(members_[a], members_[a]);
        for (std::size_t b = a + 1; b < members_.size(); ++b)
            s += 2.0 * table_->v(members_[a], members_[b]);
    }
    S_ = s;
}

IndexSubset SubsetState::subset() const { return IndexSubset(table_->count(), members_); }

double SubsetState::swap_delta(int h, int k) const {
    if (h < 0 || h >= table_->count() || !contains(h))
        throw ContractError("swap_delta: h must be a subset member");
    if (k < 0 || k >= table_->count() || contains(k))
        throw ContractError("swap_delta: k must be outside the subset");
    return B_[static_cast<std::size_t>(k)] - B_[static_cast<std::size_t>(h)] -
           2.0 * table_->v(h, k);
}

std::optional<SubsetState::Swap> SubsetState::best_swap() const {
    const int n = table_->count();
    const int m = static_cast<int>(members_.size());

    // One slot per member h (ascending index order); each slot scans every
    // non-member k in ascending order, so ties resolve to the smallest
    // (h, k) no matter how the slots are scheduled.
    std::vector<Swap> per_h(static_cast<std::size_t>(m));
    parallel_for_index(m, [&](int a) {
        const int h = members_[static_cast<std::size_t>(a)];
        const double bh = B_[static_cast<std::size_t>(h)];
        Swap best{h, -1, std::numeric_limits<double>::infinity()};
        for (int k = 0; k < n; ++k) {
            if (member_[static_cast<std::size_t>(k)]) continue;
            const double delta =
                B_[static_cast<std::size_t>(k)] - bh - 2.0 * table_->v(h, k);
            if (delta < best.delta) {
                best.in = k;
                best.delta = delta;
            }
        }
        per_h[static_cast<std::size_t>(a)] = best;
    });

    Swap best{-1, -1, std::numeric_limits<double>::infinity()};
    for (const Swap& s : per_h)
        if (s.in >= 0 && s.delta < best.delta) best = s;
    if (best.in < 0 || !(best.delta < -kEpsImprove)) return std::nullopt;
    return best;
}

void SubsetState::apply_swap(int h, int k) {
    const double delta = swap_delta(h, k);  // also validates membership roles
    const int n = table_->count();

    parallel_for_index(n, [&](int i) {
        if (i == h || i == k) return;
        B_[static_cast<std::size_t>(i)] +=
            2.0 * table_->v(i, k) - 2.0 * table_->v(i, h);
    });
    // h leaves: its defining sum gains the new member k. k joins: its sum
    // drops the departed h. Both values otherwise survive the role flip.
    B_[static_cast<std::size_t>(h)] += 2.0 * table_->v(h, k);
    B_[static_cast<std::size_t>(k)] -= 2.0 * table_->v(k, h);

    member_[static_cast<std::size_t>(h)] = 0;
    member_[static_cast<std::size_t>(k)] = 1;
    members_.erase(std::lower_bound(members_.begin(), members_.end(), h));
    members_.insert(std::lower_bound(members_.begin(), members_.end(), k), k);
    S_ += delta;
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

namespace {

long descend(SubsetState& state, Clock::time_point start, double budget,
             std::vector<TraceRow>* trace, int restart, long* iteration) {
    long accepted = 0;
    while (!expired(start, budget)) {
        const auto swap = state.best_swap();
        if (!swap) break;
        state.apply_swap(swap->out, swap->in);
        ++accepted;
        if (trace) {
            ++*iteration;
            trace->push_back({restart, *iteration, state.objective(), swap->out, swap->in});
        }
    }
    return accepted;
}

}  // namespace

long local_search(SubsetState& state, double time_budget) {
    return descend(state, Clock::now(), time_budget, nullptr, 0, nullptr);
}

void perturb(SubsetState& state, int count, Rng& rng) {
    const int n = state.table().count();
    const int m = static_cast<int>(state.members().size());
    if (count < 1 || count > m) throw ContractError("perturb: need 1 <= count <= m");
    if (count > n - m) throw ContractError("perturb: count exceeds available non-members");

    const std::vector<int> out_pos = rng.sample_without_replacement(m, count);
    std::vector<int> outs;
    outs.reserve(static_cast<std::size_t>(count));
    for (int p : out_pos) outs.push_back(state.members()[static_cast<std::size_t>(p)]);

    std::vector<int> non_members;
    non_members.reserve(static_cast<std::size_t>(n - m));
    for (int i = 0; i < n; ++i)
        if (!state.contains(i)) non_members.push_back(i);
    const std::vector<int> in_pos = rng.sample_without_replacement(n - m, count);

    for (int t = 0; t < count; ++t)
        state.apply_swap(outs[static_cast<std::size_t>(t)],
                         non_members[static_cast<std::size_t>(in_pos[static_cast<std::size_t>(t)])]);
}

IndexSubset pick_initial(const ContributionTable& table, int L,
                         const std::vector<IndexSubset>& prior, Rng& rng) {
    if (L < 1) throw ContractError("pick_initial: need L >= 1");
    const int n = table.count();
    const int m = table.subset_size();

    struct Candidate {
        std::vector<int> members;
        double objective;
    };
    std::vector<Candidate> cands;
    cands.reserve(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        Candidate c;
        c.members = rng.sample_without_replacement(n, m);
        double s = 0.0;
        for (std::size_t a = 0; a < c.members.size(); ++a) {
            s += table.v(c.members[a], c.members[a]);
            for (std::size_t b = a + 1; b < c.members.size(); ++b)
                s += 2.0 * table.v(c.members[a], c.members[b]);
        }
        c.objective = s + table.constant();
        cands.push_back(std::move(c));
    }

    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.objective != b.objective) return a.objective < b.objective;
        return a.members < b.members;
    });
    const std::size_t shortlist = (static_cast<std::size_t>(L) + 3) / 4;  // ceil(L/4)
    cands.resize(std::min(cands.size(), shortlist));

    // Symmetric-difference cardinality of two ascending index lists.
    const auto symdiff = [](const std::vector<int>& a, const std::vector<int>& b) {
        std::size_t ia = 0, ib = 0;
        int out = 0;
        while (ia < a.size() && ib < b.size()) {
            if (a[ia] == b[ib]) {
                ++ia;
                ++ib;
            } else if (a[ia] < b[ib]) {
                ++out;
                ++ia;
            } else {
                ++out;
                ++ib;
            }
        }
        out += static_cast<int>((a.size() - ia) + (b.size() - ib));
        return out;
    };

    std::size_t best = 0;
    if (!prior.empty()) {
        int best_dist = -1;
        for (std::size_t c = 0; c < cands.size(); ++c) {
            int dist = std::numeric_limits<int>::max();
            for (const IndexSubset& p : prior) dist = std::min(dist, symdiff(cands[c].members, p.members()));
            // Shortlist is already ordered by (objective, lexicographic), so
            // strict improvement implements the tie-breaking chain.
            if (dist > best_dist) {
                best_dist = dist;
                best = c;
            }
        }
    }
    return IndexSubset(n, cands[best].members);
}

SelectResult select_subset(const PointSet& P, const Kernel& K, const SelectConfig& cfg) {
    const int n = P.count();
    if (cfg.m < 1 || cfg.m >= n)
        throw ContractError("select_subset: need 1 <= m < population size");
    if (cfg.global_restarts < 1 || cfg.local_restarts < 1 || cfg.init_candidates < 1)
        throw ConfigError("select_subset: restarts and init candidates must be >= 1");
    if (cfg.perturb_count < 0 || cfg.perturb_count > cfg.m)
        throw ConfigError("select_subset: perturb_count must be in [0, m]");

    int pc = cfg.perturb_count;
    if (pc == 0) pc = std::min(8, (cfg.m + 9) / 10);
    pc = std::min(pc, n - cfg.m);

    const bool cache = cfg.cache_gram && n <= (1 << 14);
    const ContributionTable table(P, K, cfg.m, cache);

    const auto start = Clock::now();
    Rng rng(cfg.seed);

    SelectResult result{IndexSubset(n, std::vector<int>(1, 0)), {}, {}};
    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<IndexSubset> inits;
    long iteration = 0;

    for (int g = 0; g < cfg.global_restarts; ++g) {
        const IndexSubset init = pick_initial(table, cfg.init_candidates, inits, rng);
        inits.push_back(init);
        SubsetState state(table, init);
        result.trace.push_back({g, iteration, state.objective(), -1, -1});

        for (int l = 0; l < cfg.local_restarts; ++l) {
            descend(state, start, cfg.time_budget, &result.trace, g, &iteration);
            if (state.objective() < best_obj) {
                best_obj = state.objective();
                result.subset = state.subset();
            }
            if (expired(start, cfg.time_budget)) break;
            if (l + 1 < cfg.local_restarts) perturb(state, pc, rng);
        }
        if (expired(start, cfg.time_budget)) break;
    }

    result.value.kind = K.name() + "-sq";
    if (best_obj < 0.0) {
        result.value.value = 0.0;
        result.value.clamped = true;
    } else {
        result.value.value = best_obj;
    }
    return result;
}

}  // namespace kdsel
