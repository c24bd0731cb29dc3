#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "msls/core.hpp"
#include "msls/seeding.hpp"

namespace msls {

enum class AcceptRule { Strict, Factor };

enum class Variant { Msls, MslsGreedy };

struct LsConfig {
    std::size_t p = 1;
    std::size_t steps = 50;
    AcceptRule acceptRule = AcceptRule::Strict;
    double delta = 0.1;  // used by AcceptRule::Factor only
    std::uint64_t seed = 0;
    bool recordTrajectory = true;
    unsigned threads = 1;  // exhaustive MSLS only; results do not depend on it
};

/// Relative tolerance of the strict "improves the cost" test.
inline constexpr double kStrictImprovementTol = 1e-12;

/// A multi-swap over the pool 𝒞 ∪ In (centers first, then In points).
/// `outSet` is the chosen Out over pool indices. `inPoints`/`outIdx` are the
/// realized swap after In∩Out cancellation: `inPoints[i]` replaces center
/// slot `outIdx[i]`.
struct SwapProposal {
    std::vector<Point> inPoints;
    std::vector<std::size_t> outIdx;
    std::vector<std::size_t> outSet;
    double delta = 0.0;
    double newCost = 0.0;
};

struct TrajectoryRecord {
    std::size_t step;
    double totalCost;
    bool accepted;
    double seconds;
};

using Trajectory = std::vector<TrajectoryRecord>;

/// ⌈β·k·log(log(max(k,3)))⌉.
inline std::size_t default_step_budget(std::size_t k, double beta = 2.0) {
    const double kk = static_cast<double>(std::max<std::size_t>(k, 3));
    return static_cast<std::size_t>(std::ceil(beta * static_cast<double>(k) * std::log(std::log(kk))));
}

/// Swap size actually used for k centers: p > k is clamped to k.
inline std::size_t effective_swap_size(std::size_t p, std::size_t k) {
    require(p >= 1, "swap size p must be >= 1");
    return std::min(p, k);
}

inline void warn_if_clamped(std::size_t p, std::size_t k) {
    if (p > k) std::clog << "warning: swap size p=" << p << " exceeds k=" << k << ", clamping to " << k << "\n";
}

inline bool accepts(const LsConfig& cfg, double oldCost, double newCost, std::size_t k) {
    if (!(newCost < oldCost)) return false;
    if (cfg.acceptRule == AcceptRule::Factor) {
        require(cfg.delta > 0.0 && cfg.delta < 1.0, "factor rule needs delta in (0,1)");
        return newCost <= (1.0 - cfg.delta / static_cast<double>(k)) * oldCost;
    }
    return oldCost - newCost > kStrictImprovementTol * oldCost;
}

namespace detail {

/// The candidate pool 𝒞 ∪ In of one step: the current centers (indices
/// 0..k-1, served by the state's sorted ranks) plus extra points (indices
/// k..k+m-1) with their distances cached per data point.
class SwapPool {
public:
    SwapPool(const CentersState& st, std::vector<Point> extras) : st_(st), extras_(std::move(extras)) {
        const std::size_t n = st.n(), m = extras_.size();
        for (const auto& e : extras_) require(e.size() == st.data().dim(), "swap pool: dimension mismatch");
        extraDist_.resize(n * m);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t j = 0; j < m; ++j) extraDist_[x * m + j] = sq_dist(st.data()[x], extras_[j]);
    }

    std::size_t size() const { return st_.k() + extras_.size(); }
    std::size_t k() const { return st_.k(); }
    const std::vector<Point>& extras() const { return extras_; }
    const CentersState& state() const { return st_; }

    /// Nearest and second-nearest pool members of x not flagged in `removed`.
    /// Missing entries have dist = +inf.
    std::pair<RankEntry, RankEntry> top2(std::size_t x, const std::vector<bool>& removed) const {
        constexpr RankEntry none{std::numeric_limits<double>::infinity(), std::numeric_limits<std::uint32_t>::max()};
        RankEntry first = none, second = none;
        int found = 0;
        for (const auto& e : st_.rank(x)) {
            if (removed[e.idx]) continue;
            (found == 0 ? first : second) = e;
            if (++found == 2) break;
        }
        const std::size_t m = extras_.size(), kk = k();
        for (std::size_t j = 0; j < m; ++j) {
            if (removed[kk + j]) continue;
            const RankEntry e{extraDist_[x * m + j], static_cast<std::uint32_t>(kk + j)};
            if (e < first) {
                second = first;
                first = e;
            } else if (e < second) {
                second = e;
            }
        }
        return {first, second};
    }

    /// Cost with `removed` deleted, plus the removal charge of every survivor.
    RemovalCharges charges(const std::vector<bool>& removed) const {
        RemovalCharges out;
        const std::size_t u = size();
        std::vector<CompensatedSum> acc(u);
        CompensatedSum base;
        for (std::size_t x = 0; x < st_.n(); ++x) {
            auto [first, second] = top2(x, removed);
            require(std::isfinite(first.dist), "swap pool: every member removed");
            base.add(first.dist);
            acc[first.idx].add(second.dist - first.dist);
        }
        out.baseCost = base.value();
        out.charge.resize(u);
        out.survives.resize(u);
        for (std::size_t c = 0; c < u; ++c) {
            out.survives[c] = !removed[c];
            out.charge[c] = removed[c] ? std::numeric_limits<double>::quiet_NaN() : acc[c].value();
        }
        return out;
    }

    /// Cost of the pool with `removed` deleted, summed in point order.
    double cost_without(const std::vector<bool>& removed) const {
        CompensatedSum s;
        for (std::size_t x = 0; x < st_.n(); ++x) s.add(top2(x, removed).first.dist);
        return s.value();
    }

    std::vector<bool> mask(std::span<const std::size_t> members) const {
        std::vector<bool> m(size(), false);
        for (std::size_t i : members) m[i] = true;
        return m;
    }

    /// Realizes removing `outSet` from the pool as a swap on the centers.
    SwapProposal realize(std::vector<std::size_t> outSet, double newCost) const {
        std::sort(outSet.begin(), outSet.end());
        SwapProposal prop;
        std::vector<bool> out = mask(outSet);
        for (std::size_t i : outSet)
            if (i < k()) prop.outIdx.push_back(i);
        for (std::size_t j = 0; j < extras_.size(); ++j)
            if (!out[k() + j]) prop.inPoints.push_back(extras_[j]);
        prop.outSet = std::move(outSet);
        prop.newCost = newCost;
        prop.delta = newCost - st_.total_cost();
        return prop;
    }

private:
    const CentersState& st_;
    std::vector<Point> extras_;
    std::vector<double> extraDist_;
};

/// Lowest-index survivor with minimal charge.
inline std::size_t cheapest(const RemovalCharges& rc) {
    std::size_t best = rc.charge.size();
    for (std::size_t c = 0; c < rc.charge.size(); ++c) {
        if (!rc.survives[c]) continue;
        if (best == rc.charge.size() || rc.charge[c] < rc.charge[best]) best = c;
    }
    return best;
}

/// Advances `idx` to the next size-|idx| subset of {0..n-1} in lexicographic order.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t r = idx.size();
    for (std::size_t i = r; i-- > 0;) {
        if (idx[i] < n - r + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    if (r > n) return out;
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) idx[i] = i;
    do out.push_back(idx);
    while (next_combination(idx, n));
    return out;
}

}  // namespace detail

/// Exhaustive p-swap: evaluates every size-p Out ⊆ 𝒞 ∪ In. Iterates over the
/// size-(p-1) subsets Z, charges each survivor its removal cost, and pairs Z
/// with the cheapest survivor. Near-best candidates are re-evaluated with a
/// single summation order; exact ties go to the lexicographically smallest Out.
/// Returns the best proposal whether or not it improves.
inline SwapProposal best_multi_swap(const CentersState& state, std::vector<Point> inPoints, unsigned threads = 1) {
    const std::size_t p = inPoints.size();
    require(p >= 1, "best_multi_swap: empty In");
    require(p <= state.k(), "best_multi_swap: p exceeds k");
    detail::SwapPool pool(state, std::move(inPoints));
    const auto zs = detail::all_subsets(pool.size(), p - 1);

    struct Candidate {
        std::vector<std::size_t> out;
        double approxCost;
    };
    std::vector<Candidate> cand(zs.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto rc = pool.charges(pool.mask(zs[i]));
            const std::size_t c = detail::cheapest(rc);
            auto out = zs[i];
            out.push_back(c);
            std::sort(out.begin(), out.end());
            cand[i] = {std::move(out), rc.baseCost + rc.charge[c]};
        }
    };
    const std::size_t nThreads = std::max<std::size_t>(1, std::min<std::size_t>(threads, zs.size()));
    if (nThreads == 1) {
        work(0, zs.size());
    } else {
        std::vector<std::thread> pool_threads;
        const std::size_t chunk = (zs.size() + nThreads - 1) / nThreads;
        for (std::size_t t = 0; t < nThreads; ++t) {
            const std::size_t b = t * chunk, e = std::min(zs.size(), b + chunk);
            if (b < e) pool_threads.emplace_back(work, b, e);
        }
        for (auto& th : pool_threads) th.join();
    }

    double minApprox = std::numeric_limits<double>::infinity();
    for (const auto& c : cand) minApprox = std::min(minApprox, c.approxCost);
    const double window = 1e-9 * std::max(std::abs(minApprox), state.total_cost()) + 1e-300;

    std::vector<std::vector<std::size_t>> finalists;
    for (const auto& c : cand)
        if (c.approxCost <= minApprox + window) finalists.push_back(c.out);
    std::sort(finalists.begin(), finalists.end());
    finalists.erase(std::unique(finalists.begin(), finalists.end()), finalists.end());

    std::vector<std::size_t> bestOut;
    double bestCost = std::numeric_limits<double>::infinity();
    for (const auto& out : finalists) {
        const double c = pool.cost_without(pool.mask(out));
        if (c < bestCost) {  // finalists are sorted, so ties keep the smallest tuple
            bestCost = c;
            bestOut = out;
        }
    }
    return pool.realize(std::move(bestOut), bestCost);
}

/// Greedy p-swap: removes p members of 𝒞 ∪ In one at a time, each round
/// taking the survivor with the smallest removal charge given the members
/// already removed.
inline SwapProposal greedy_multi_swap(const CentersState& state, std::vector<Point> inPoints) {
    const std::size_t p = inPoints.size();
    require(p >= 1, "greedy_multi_swap: empty In");
    require(p <= state.k(), "greedy_multi_swap: p exceeds k");
    detail::SwapPool pool(state, std::move(inPoints));
    std::vector<bool> removed(pool.size(), false);
    std::vector<std::size_t> out;
    for (std::size_t round = 0; round < p; ++round) {
        const std::size_t c = detail::cheapest(pool.charges(removed));
        removed[c] = true;
        out.push_back(c);
    }
    const double newCost = pool.cost_without(removed);
    return pool.realize(std::move(out), newCost);
}

inline void apply_swap(CentersState& state, const SwapProposal& prop) {
    state.replace_centers(prop.outIdx, prop.inPoints);
}

inline std::vector<Point> gather_points(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<Point> pts;
    pts.reserve(idx.size());
    for (std::size_t i : idx) pts.push_back(data.point(i));
    return pts;
}

namespace detail {

template <class Propose>
std::optional<SwapProposal> ls_step(CentersState& state, const LsConfig& cfg, Rng& rng, Propose&& propose) {
    const std::size_t p = effective_swap_size(cfg.p, state.k());
    auto in = gather_points(state.data(), d2_sample(state, rng, p));
    SwapProposal prop = propose(state, std::move(in));
    if (!accepts(cfg, state.total_cost(), prop.newCost, state.k())) return std::nullopt;
    apply_swap(state, prop);
    return prop;
}

}  // namespace detail

/// One exhaustive multi-swap step. Mutates `state` when the best swap is accepted.
inline std::optional<SwapProposal> msls_step(CentersState& state, const LsConfig& cfg, Rng& rng) {
    return detail::ls_step(state, cfg, rng, [&](const CentersState& s, std::vector<Point> in) {
        return best_multi_swap(s, std::move(in), cfg.threads);
    });
}

/// One greedy multi-swap step. With p = 1 this is single-swap local search.
inline std::optional<SwapProposal> msls_g_step(CentersState& state, const LsConfig& cfg, Rng& rng) {
    return detail::ls_step(state, cfg, rng, [](const CentersState& s, std::vector<Point> in) {
        return greedy_multi_swap(s, std::move(in));
    });
}

/// Step-at-a-time driver used by the batch runner and the deadline experiment.
class LocalSearch {
public:
    LocalSearch(const Dataset& data, std::vector<Point> init, LsConfig cfg, Variant variant)
        : state_(data, std::move(init)), cfg_(cfg), variant_(variant), rng_(cfg.seed) {
        warn_if_clamped(cfg_.p, state_.k());
        if (cfg_.recordTrajectory) traj_.push_back({0, state_.total_cost(), false, 0.0});
    }

    std::optional<SwapProposal> step() {
        const auto t0 = std::chrono::steady_clock::now();
        auto res = variant_ == Variant::Msls ? msls_step(state_, cfg_, rng_) : msls_g_step(state_, cfg_, rng_);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++steps_;
        if (res) ++accepted_;
        if (cfg_.recordTrajectory) traj_.push_back({steps_, state_.total_cost(), res.has_value(), secs});
        return res;
    }

    const CentersState& state() const { return state_; }
    CentersState& state() { return state_; }
    const Trajectory& trajectory() const { return traj_; }
    std::size_t steps_taken() const { return steps_; }
    std::size_t steps_accepted() const { return accepted_; }

private:
    CentersState state_;
    LsConfig cfg_;
    Variant variant_;
    Rng rng_;
    Trajectory traj_;
    std::size_t steps_ = 0;
    std::size_t accepted_ = 0;
};

/// Runs cfg.steps local search steps from `init`. The trajectory holds the
/// initial state as step 0 followed by one record per step.
inline std::pair<CentersState, Trajectory> run_local_search(const Dataset& data, std::vector<Point> init,
                                                            const LsConfig& cfg, Variant variant) {
    LocalSearch ls(data, std::move(init), cfg, variant);
    for (std::size_t s = 0; s < cfg.steps; ++s) ls.step();
    return {ls.state(), ls.trajectory()};
}

namespace detail {

/// η² for the positive root of η² − (2+2/p)η − (c+2/p) = 0.
inline double squared_positive_root(double p, double c) {
    require(p >= 1.0, "swap size p must be >= 1");
    const double inv = std::isinf(p) ? 0.0 : 1.0 / p;
    const double b = 2.0 + 2.0 * inv;
    const double eta = 0.5 * (b + std::sqrt(b * b + 4.0 * (c + 2.0 * inv)));
    return eta * eta;
}

}  // namespace detail

/// Approximation bound of p-swap local search (p may be +infinity).
inline double eta_bound(double p) { return detail::squared_positive_root(p, 4.0); }

/// The corresponding bound for swaps over optimal centers, which tends to 9.
inline double kanungo_bound(double p) { return detail::squared_positive_root(p, 3.0); }

}  // namespace msls
