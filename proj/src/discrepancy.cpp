#include "kdsel/discrepancy.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <span>

#include "kdsel/errors.hpp"
#include "kdsel/parallel.hpp"
#include "kdsel/rng.hpp"

namespace kdsel {

namespace {

DiscrepancyValue clamp_squared(std::string kind, double raw) {
    DiscrepancyValue v;
    v.kind = std::move(kind);
    if (raw < 0.0) {
        v.value = 0.0;
        v.clamped = true;
    } else {
        v.value = raw;
    }
    return v;
}

}  // namespace

DiscrepancyValue kernel_disc_sq(const PointSet& P, const Kernel& K) {
    const int n = P.count();
    const std::vector<double> aux = K.prepare(P);  // also validates P
    const int ad = K.aux_dim();
    const auto aux_row = [&](int i) {
        return ad ? aux.data() + static_cast<std::size_t>(i) * ad : nullptr;
    };

    const double kf_sum = sum_over_rows(n, [&](int i) { return K.kF(P.point(i)); });
    const double diag = sum_over_rows(n, [&](int i) {
        return K.k_prepared(P.point(i), P.point(i), aux_row(i), aux_row(i));
    });
    const double cross = sum_over_rows(n, [&](int i) {
        const double* xi = P.point(i);
        const double* ai = aux_row(i);
        double acc = 0.0;
        for (int j = i + 1; j < n; ++j) acc += K.k_prepared(xi, P.point(j), ai, aux_row(j));
        return acc;
    });

    const double nn = static_cast<double>(n);
    const double raw = K.c() - 2.0 * kf_sum / nn + (diag + 2.0 * cross) / (nn * nn);
    return clamp_squared(K.name() + "-sq", raw);
}

DiscrepancyValue warnock_l2_sq(const PointSet& P) {
    if (!P.in_unit_cube()) throw DomainError("warnock_l2_sq: points must lie in [0,1]^d");
    const int n = P.count();
    const int d = P.dim();

    // Per-row slots fuse the one-point term and the row of pair terms, which
    // makes this an independently grouped summation from kernel_disc_sq.
    const double kf_sum = sum_over_rows(n, [&](int i) {
        const double* x = P.point(i);
        double p = 1.0;
        for (int t = 0; t < d; ++t) p *= (1.0 - x[t] * x[t]) / 2.0;
        return p;
    });
    const double pair_sum = sum_over_rows(n, [&](int i) {
        const double* xi = P.point(i);
        double self = 1.0;
        for (int t = 0; t < d; ++t) self *= 1.0 - xi[t];
        double acc = self;
        for (int j = i + 1; j < n; ++j) {
            const double* xj = P.point(j);
            double p = 1.0;
            for (int t = 0; t < d; ++t) p *= 1.0 - std::max(xi[t], xj[t]);
            acc += 2.0 * p;
        }
        return acc;
    });

    const double nn = static_cast<double>(n);
    const double raw = std::pow(3.0, -static_cast<double>(d)) - 2.0 * kf_sum / nn +
                       pair_sum / (nn * nn);
    return clamp_squared("l2star-sq", raw);
}

DiscrepancyValue ksd_sq(const PointSet& P, const SteinKernel& K) {
    const int n = P.count();
    const std::vector<double> scores = K.prepare(P);  // validates the score domain
    const int d = K.dim();
    const auto srow = [&](int i) { return scores.data() + static_cast<std::size_t>(i) * d; };

    const double diag =
        sum_over_rows(n, [&](int i) { return K.k_prepared(P.point(i), P.point(i), srow(i), srow(i)); });
    const double cross = sum_over_rows(n, [&](int i) {
        const double* xi = P.point(i);
        const double* si = srow(i);
        double acc = 0.0;
        for (int j = i + 1; j < n; ++j) acc += K.k_prepared(xi, P.point(j), si, srow(j));
        return acc;
    });

    const double nn = static_cast<double>(n);
    return clamp_squared("ksd-sq", (diag + 2.0 * cross) / (nn * nn));
}

// ---------------------------------------------------------------------------
// Exact L-infinity star discrepancy
// ---------------------------------------------------------------------------

namespace detail {

std::vector<double> linf_grid(const PointSet& P, int j) {
    std::vector<double> g(static_cast<std::size_t>(P.count()));
    for (int i = 0; i < P.count(); ++i) g[static_cast<std::size_t>(i)] = P.coord(i, j);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    if (g.back() != 1.0) g.push_back(1.0);
    return g;
}

}  // namespace detail

namespace {

// Enumeration worker for one subtree of the corner grid. Per recursion level
// it counting-sorts the candidate lists by that dimension's grid rank, so a
// child corner's candidates are a prefix of the sorted buffer; the last
// dimension is resolved with a single rank histogram per parent.
class LinfWorker {
public:
    LinfWorker(const PointSet& P, const std::vector<std::vector<double>>& grids,
               const std::vector<int>& rank)
        : n_(P.count()), d_(P.dim()), grids_(grids), rank_(rank) {
        sorted_open_.resize(static_cast<std::size_t>(d_));
        sorted_closed_.resize(static_cast<std::size_t>(d_));
        for (auto& v : sorted_open_) v.resize(static_cast<std::size_t>(n_));
        for (auto& v : sorted_closed_) v.resize(static_cast<std::size_t>(n_));
        std::size_t max_g = 0;
        for (const auto& g : grids_) max_g = std::max(max_g, g.size());
        hist_.resize(max_g + 1);
        pref_open_.resize(static_cast<std::size_t>(d_));
        pref_closed_.resize(static_cast<std::size_t>(d_));
        for (auto& v : pref_open_) v.resize(max_g + 1);
        for (auto& v : pref_closed_) v.resize(max_g + 1);
    }

    double best() const { return best_; }

    void run(int level, double vol_prefix, std::span<const int> open, std::span<const int> closed) {
        if (level == d_ - 1) {
            leaf(vol_prefix, open, closed);
        } else {
            inner(level, vol_prefix, open, closed);
        }
    }

private:
    int rank_of(int i, int j) const { return rank_[static_cast<std::size_t>(i) * d_ + j]; }

    void leaf(double vol_prefix, std::span<const int> open, std::span<const int> closed) {
        const std::vector<double>& g = grids_[static_cast<std::size_t>(d_ - 1)];
        const std::size_t G = g.size();
        std::fill(hist_.begin(), hist_.begin() + static_cast<std::ptrdiff_t>(G), 0L);
        for (int i : open) ++hist_[static_cast<std::size_t>(rank_of(i, d_ - 1))];
        // Second histogram shares the buffer via an offset-free trick: count
        // closed candidates negatively is error-prone, so use a copy.
        std::vector<long>& chist = pref_open_[static_cast<std::size_t>(d_ - 1)];
        std::fill(chist.begin(), chist.begin() + static_cast<std::ptrdiff_t>(G), 0L);
        for (int i : closed) ++chist[static_cast<std::size_t>(rank_of(i, d_ - 1))];

        long open_run = 0;   // #{rank < t}
        long closed_run = 0; // #{rank <= t}
        for (std::size_t t = 0; t < G; ++t) {
            closed_run += chist[t];
            const double vol = vol_prefix * g[t];
            const double pos = detail::linf_pos(vol, open_run, n_);
            const double neg = detail::linf_neg(vol, closed_run, n_);
            if (pos > best_) best_ = pos;
            if (neg > best_) best_ = neg;
            open_run += hist_[t];
        }
    }

    void inner(int level, double vol_prefix, std::span<const int> open,
               std::span<const int> closed) {
        const std::vector<double>& g = grids_[static_cast<std::size_t>(level)];
        const std::size_t G = g.size();
        std::vector<int>& so = sorted_open_[static_cast<std::size_t>(level)];
        std::vector<int>& sc = sorted_closed_[static_cast<std::size_t>(level)];
        std::vector<long>& po = pref_open_[static_cast<std::size_t>(level)];
        std::vector<long>& pc = pref_closed_[static_cast<std::size_t>(level)];

        counting_sort(level, open, so, po, /*inclusive=*/false, G);
        counting_sort(level, closed, sc, pc, /*inclusive=*/true, G);

        for (std::size_t t = 0; t < G; ++t) {
            run(level + 1, vol_prefix * g[t],
                std::span<const int>(so.data(), static_cast<std::size_t>(po[t])),
                std::span<const int>(sc.data(), static_cast<std::size_t>(pc[t])));
        }
    }

    // Sorts `in` by grid rank at `level` into `out` and fills `pref` so that
    // pref[t] = #{rank < t} (exclusive) or #{rank <= t} (inclusive).
    void counting_sort(int level, std::span<const int> in, std::vector<int>& out,
                       std::vector<long>& pref, bool inclusive, std::size_t G) {
        std::fill(hist_.begin(), hist_.begin() + static_cast<std::ptrdiff_t>(G), 0L);
        for (int i : in) ++hist_[static_cast<std::size_t>(rank_of(i, level))];
        long run = 0;
        for (std::size_t t = 0; t < G; ++t) {
            if (!inclusive) pref[t] = run;
            run += hist_[t];
            if (inclusive) pref[t] = run;
        }
        // Scatter: positions by exclusive cumulative count.
        long pos = 0;
        for (std::size_t t = 0; t < G; ++t) {
            const long cnt = hist_[t];
            hist_[t] = pos;
            pos += cnt;
        }
        for (int i : in) out[static_cast<std::size_t>(hist_[static_cast<std::size_t>(rank_of(i, level))]++)] = i;
    }

    int n_;
    int d_;
    const std::vector<std::vector<double>>& grids_;
    const std::vector<int>& rank_;
    double best_ = 0.0;
    std::vector<std::vector<int>> sorted_open_;
    std::vector<std::vector<int>> sorted_closed_;
    std::vector<long> hist_;
    std::vector<std::vector<long>> pref_open_;
    std::vector<std::vector<long>> pref_closed_;
};

struct LinfGridSetup {
    std::vector<std::vector<double>> grids;
    std::vector<int> rank;       // n*d grid positions
    std::vector<int> interior;   // indices of points with every coordinate < 1
    double cells = 1.0;
};

LinfGridSetup linf_setup(const PointSet& P) {
    if (!P.in_unit_cube()) throw DomainError("linf star discrepancy: points must lie in [0,1]^d");
    const int n = P.count();
    const int d = P.dim();
    LinfGridSetup s;
    s.grids.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        s.grids.push_back(detail::linf_grid(P, j));
        s.cells *= static_cast<double>(s.grids.back().size());
    }
    s.rank.resize(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i) {
        bool inside = true;
        for (int j = 0; j < d; ++j) {
            const std::vector<double>& g = s.grids[static_cast<std::size_t>(j)];
            const double x = P.coord(i, j);
            s.rank[static_cast<std::size_t>(i) * d + j] =
                static_cast<int>(std::lower_bound(g.begin(), g.end(), x) - g.begin());
            if (x == 1.0) inside = false;
        }
        if (inside) s.interior.push_back(i);
    }
    return s;
}

}  // namespace

DiscrepancyValue linf_star_exact(const PointSet& P) {
    const LinfGridSetup setup = linf_setup(P);
    const int n = P.count();
    const int d = P.dim();
    if (setup.cells > 1e9)
        throw ResourceError("linf_star_exact: critical grid has about " +
                            std::to_string(setup.cells) +
                            " corners (guard 1e9); use linf_star_lower_bound instead");

    DiscrepancyValue out;
    out.kind = "linf";

    if (d == 1) {
        LinfWorker w(P, setup.grids, setup.rank);
        std::vector<int> all(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
        w.run(0, 1.0, all, setup.interior);
        out.value = w.best();
        return out;
    }

    // Candidates of a top-level corner are prefixes of the index lists sorted
    // by the first coordinate, so the parallel children share two read-only
    // sorted arrays and their prefix-count tables.
    const std::vector<double>& g0 = setup.grids[0];
    const std::size_t G0 = g0.size();
    std::vector<int> open0(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) open0[static_cast<std::size_t>(i)] = i;
    std::vector<int> closed0 = setup.interior;
    const auto rank0 = [&](int i) { return setup.rank[static_cast<std::size_t>(i) * d]; };
    std::stable_sort(open0.begin(), open0.end(), [&](int a, int b) { return rank0(a) < rank0(b); });
    std::stable_sort(closed0.begin(), closed0.end(),
                     [&](int a, int b) { return rank0(a) < rank0(b); });
    std::vector<long> opref(G0 + 1, 0), cpref(G0 + 1, 0);
    {
        std::vector<long> h(G0, 0);
        for (int i : open0) ++h[static_cast<std::size_t>(rank0(i))];
        long run = 0;
        for (std::size_t t = 0; t < G0; ++t) {
            opref[t] = run;  // #{rank < t}
            run += h[t];
        }
        std::fill(h.begin(), h.end(), 0L);
        for (int i : closed0) ++h[static_cast<std::size_t>(rank0(i))];
        run = 0;
        for (std::size_t t = 0; t < G0; ++t) {
            run += h[t];
            cpref[t] = run;  // #{rank <= t}
        }
    }

    // Each thread keeps one worker across its share of top-level corners; the
    // final result is the max over every subtree regardless of which thread
    // visited it, so scheduling cannot change the value.
    std::vector<double> best_thread(static_cast<std::size_t>(omp_get_max_threads()), 0.0);
#pragma omp parallel
    {
        LinfWorker w(P, setup.grids, setup.rank);
#pragma omp for schedule(dynamic)
        for (long t = 0; t < static_cast<long>(G0); ++t) {
            w.run(1, 1.0 * g0[static_cast<std::size_t>(t)],
                  std::span<const int>(open0.data(),
                                       static_cast<std::size_t>(opref[static_cast<std::size_t>(t)])),
                  std::span<const int>(closed0.data(),
                                       static_cast<std::size_t>(cpref[static_cast<std::size_t>(t)])));
        }
        best_thread[static_cast<std::size_t>(omp_get_thread_num())] = w.best();
    }
    double best = 0.0;
    for (double b : best_thread) best = std::max(best, b);
    out.value = best;
    return out;
}

DiscrepancyValue linf_star_lower_bound(const PointSet& P, long trials, std::uint64_t seed) {
    if (trials < 1) throw ContractError("linf_star_lower_bound: need trials >= 1");
    if (trials > 100'000'000L)
        throw ContractError("linf_star_lower_bound: trials capped at 1e8");
    const LinfGridSetup setup = linf_setup(P);
    const int n = P.count();
    const int d = P.dim();

    DiscrepancyValue out;
    out.kind = "linf-lb";

    // Local discrepancy at one corner given per-dimension grid indices.
    const auto corner_value = [&](const std::vector<std::size_t>& idx) {
        double vol = 1.0;
        for (int j = 0; j < d; ++j) vol *= setup.grids[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
        long open = 0;
        long closed = 0;
        for (int i = 0; i < n; ++i) {
            bool in_open = true;
            for (int j = 0; j < d; ++j)
                if (!(static_cast<std::size_t>(setup.rank[static_cast<std::size_t>(i) * d + j]) <
                      idx[static_cast<std::size_t>(j)])) {
                    in_open = false;
                    break;
                }
            if (in_open) ++open;
        }
        for (int i : setup.interior) {
            bool in_closed = true;
            for (int j = 0; j < d; ++j)
                if (!(static_cast<std::size_t>(setup.rank[static_cast<std::size_t>(i) * d + j]) <=
                      idx[static_cast<std::size_t>(j)])) {
                    in_closed = false;
                    break;
                }
            if (in_closed) ++closed;
        }
        return std::max(detail::linf_pos(vol, open, n), detail::linf_neg(vol, closed, n));
    };

    double best = 0.0;
    const double scan_work = setup.cells * static_cast<double>(n) * d;
    if (setup.cells <= static_cast<double>(trials) && scan_work <= 2e8) {
        // Few enough corners: exhaust the grid, reproducing the exact value.
        std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            best = std::max(best, corner_value(idx));
            int j = d - 1;
            while (j >= 0) {
                if (++idx[static_cast<std::size_t>(j)] < setup.grids[static_cast<std::size_t>(j)].size()) break;
                idx[static_cast<std::size_t>(j)] = 0;
                --j;
            }
            if (j < 0) break;
        }
    } else {
        std::vector<double> slot(static_cast<std::size_t>(trials));
        parallel_for_index(static_cast<int>(trials), [&](int t) {
            Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(t));
            std::vector<std::size_t> idx(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j)
                idx[static_cast<std::size_t>(j)] = static_cast<std::size_t>(
                    rng.uniform_below(setup.grids[static_cast<std::size_t>(j)].size()));
            slot[static_cast<std::size_t>(t)] = corner_value(idx);
        });
        for (double v : slot) best = std::max(best, v);
    }
    out.value = best;
    return out;
}

McEstimate mc_l2_oracle(const PointSet& P, long samples, std::uint64_t seed) {
    if (samples < 1) throw ContractError("mc_l2_oracle: need samples >= 1");
    if (!P.in_unit_cube()) throw DomainError("mc_l2_oracle: points must lie in [0,1]^d");
    const int n = P.count();
    const int d = P.dim();

    constexpr long kBlock = 8192;
    const long nblocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> s1(static_cast<std::size_t>(nblocks));
    std::vector<double> s2(static_cast<std::size_t>(nblocks));
    parallel_for_index(static_cast<int>(nblocks), [&](int b) {
        Rng rng = Rng::for_stream(seed, static_cast<std::uint64_t>(b));
        const long lo = static_cast<long>(b) * kBlock;
        const long hi = std::min(samples, lo + kBlock);
        std::vector<double> q(static_cast<std::size_t>(d));
        double a1 = 0.0;
        double a2 = 0.0;
        for (long t = lo; t < hi; ++t) {
            double vol = 1.0;
            for (int j = 0; j < d; ++j) {
                q[static_cast<std::size_t>(j)] = rng.uniform();
                vol *= q[static_cast<std::size_t>(j)];
            }
            long cnt = 0;
            for (int i = 0; i < n; ++i) {
                const double* x = P.point(i);
                bool in_box = true;
                for (int j = 0; j < d; ++j)
                    if (!(x[j] < q[static_cast<std::size_t>(j)])) {
                        in_box = false;
                        break;
                    }
                if (in_box) ++cnt;
            }
            const double diff = static_cast<double>(cnt) / static_cast<double>(n) - vol;
            const double y = diff * diff;
            a1 += y;
            a2 += y * y;
        }
        s1[static_cast<std::size_t>(b)] = a1;
        s2[static_cast<std::size_t>(b)] = a2;
    });

    const double mean = pairwise_sum(s1) / static_cast<double>(samples);
    const double mean_sq = pairwise_sum(s2) / static_cast<double>(samples);
    McEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(std::max(0.0, mean_sq - mean * mean) / static_cast<double>(samples));
    return est;
}

}  // namespace kdsel
