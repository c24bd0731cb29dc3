#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "msls/core.hpp"
#include "msls/local_search.hpp"
#include "msls/seeding.hpp"

namespace msls {

/// Configuration of the APX-centers local search.
///
/// The swap size is p = ⌈pConstant/ε⌉ and the uniform sample drawn from the
/// nice points has ⌈sampleConstant/ε⌉ points. `minDistance`/`aspectRatio`
/// describe the data's pairwise distances; left empty they are computed from
/// the data (quadratic in n).
struct NineEpsConfig {
    double eps = 0.5;
    double pConstant = 2.0;
    double sampleConstant = 4.0;
    std::optional<double> minDistance;
    std::optional<double> aspectRatio;
    std::size_t candidateCap = 100000;  // In-sets evaluated per step
    AcceptRule acceptRule = AcceptRule::Strict;
    double delta = 0.1;

    std::size_t p() const { return static_cast<std::size_t>(std::ceil(pConstant / eps - 1e-12)); }
    std::size_t sample_size() const { return static_cast<std::size_t>(std::ceil(sampleConstant / eps - 1e-12)); }

    void validate() const {
        require(eps > 0.0 && eps < 1.0, "nine-eps: eps must lie in (0,1)");
        require(pConstant > 0.0 && sampleConstant > 0.0, "nine-eps: constants must be positive");
        require(candidateCap >= 1, "nine-eps: candidate cap must be >= 1");
        if (aspectRatio) require(*aspectRatio >= 1.0, "nine-eps: aspect ratio must be >= 1");
        if (minDistance) require(*minDistance > 0.0, "nine-eps: min distance must be positive");
    }
};

struct DistanceScale {
    double minDistance = 1.0;  // smallest nonzero pairwise distance
    double aspectRatio = 1.0;  // largest / smallest nonzero pairwise distance
};

/// Brute-force pairwise scan; identical points are ignored.
inline DistanceScale distance_scale(const Dataset& data) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t a = 0; a < data.size(); ++a)
        for (std::size_t b = a + 1; b < data.size(); ++b) {
            const double d = sq_dist(data[a], data[b]);
            if (d > 0.0) {
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
        }
    if (!std::isfinite(lo)) return {};
    return {std::sqrt(lo), std::max(1.0, std::sqrt(hi / lo))};
}

/// Fills in the distance scale from the data where not supplied.
inline NineEpsConfig resolve_scale(NineEpsConfig cfg, const Dataset& data) {
    cfg.validate();
    if (!cfg.minDistance || !cfg.aspectRatio) {
        const auto s = distance_scale(data);
        if (!cfg.minDistance) cfg.minDistance = s.minDistance;
        if (!cfg.aspectRatio) cfg.aspectRatio = s.aspectRatio;
    }
    return cfg;
}

/// {1, (1+ε), ..., (1+ε)^⌈log_{1+ε}Δ⌉}, in units of the minimum distance.
inline std::vector<double> radius_grid(double aspectRatio, double eps) {
    require(aspectRatio >= 1.0, "radius_grid: aspect ratio must be >= 1");
    require(eps > 0.0, "radius_grid: eps must be positive");
    const double raw = std::log(aspectRatio) / std::log1p(eps);
    const auto top = static_cast<std::size_t>(std::max(0.0, std::ceil(raw - 1e-12)));
    std::vector<double> grid(top + 1);
    for (std::size_t i = 0; i <= top; ++i) grid[i] = std::pow(1.0 + eps, static_cast<double>(i));
    return grid;
}

struct Partition {
    std::vector<std::size_t> far, close, nice;
};

namespace detail {

/// F/C/N split given each point's cost to q and to the temporary centers.
/// `rho` is in the same length unit as the coordinates.
inline Partition partition_by_costs(std::span<const double> costToQ, std::span<const double> costToT, double rho,
                                    double eps) {
    require(rho > 0.0, "partition: rho must be positive");
    const double e3 = eps * eps * eps;
    const double farThr = rho * rho / e3, closeThr = e3 * rho * rho;
    Partition part;
    for (std::size_t x = 0; x < costToQ.size(); ++x) {
        if (costToQ[x] > farThr)
            part.far.push_back(x);
        else if (costToT[x] <= closeThr)
            part.close.push_back(x);
        else
            part.nice.push_back(x);
    }
    return part;
}

}  // namespace detail

/// Splits the data into far points (beyond ρ²/ε³ from q), close points
/// (within ε³ρ² of the temporary centers T) and the remaining nice points.
/// With T empty no point is close.
inline Partition partition_fcn(const Dataset& data, std::span<const Point> temporary, PointView q, double rho,
                               double eps) {
    std::vector<double> toQ(data.size()), toT(data.size(), std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < data.size(); ++x) {
        toQ[x] = sq_dist(data[x], q);
        for (const auto& t : temporary) toT[x] = std::min(toT[x], sq_dist(data[x], t));
    }
    return detail::partition_by_costs(toQ, toT, rho, eps);
}

/// {1, (1−ε), ..., (1−ε)^⌈log_{1−ε}(ε⁷)⌉, 0}; zero is last.
inline std::vector<double> coefficient_values(double eps) {
    require(eps > 0.0 && eps < 1.0, "coefficient_values: eps must lie in (0,1)");
    const double raw = 7.0 * std::log(eps) / std::log1p(-eps);
    const auto top = static_cast<std::size_t>(std::ceil(raw - 1e-12));
    std::vector<double> vals(top + 2);
    for (std::size_t i = 0; i <= top; ++i) vals[i] = std::pow(1.0 - eps, static_cast<double>(i));
    vals.back() = 0.0;
    return vals;
}

/// Every (s+1)-tuple over coefficient_values(ε) except the all-zero tuple.
inline std::vector<std::vector<double>> coefficient_grid(double eps, std::size_t s) {
    require(s >= 1, "coefficient_grid: s must be >= 1");
    const auto vals = coefficient_values(eps);
    const double total = std::pow(static_cast<double>(vals.size()), static_cast<double>(s + 1));
    require(total <= 2e7, "coefficient_grid: grid too large to materialize");
    std::vector<std::vector<double>> out;
    std::vector<std::size_t> digit(s + 1, 0);
    for (;;) {
        bool allZero = true;
        std::vector<double> t(s + 1);
        for (std::size_t j = 0; j <= s; ++j) {
            t[j] = vals[digit[j]];
            allZero = allZero && t[j] == 0.0;
        }
        if (!allZero) out.push_back(std::move(t));
        std::size_t j = s + 1;
        while (j-- > 0) {
            if (++digit[j] < vals.size()) break;
            digit[j] = 0;
        }
        if (j == static_cast<std::size_t>(-1)) break;
    }
    return out;
}

/// A proposed center: the convex combination of μ(S) and the sampled points
/// q₁..q_s weighted by `alpha` (alpha[0] weighs μ(S)).
struct CandidateCenter {
    static constexpr std::size_t kNoRadius = static_cast<std::size_t>(-1);

    Point coords;
    std::size_t target = 0;           // which sampled point this candidate stands in for
    std::size_t radiusIdx = kNoRadius; // index into radius_grid; kNoRadius for the q_i fallback
    std::vector<double> alpha;
};

inline Point convex_combination(const Point& sampleMean, std::span<const Point> qs, std::span<const double> alpha) {
    require(alpha.size() == qs.size() + 1, "convex_combination: need |qs|+1 coefficients");
    double w = 0.0;
    for (double a : alpha) {
        require(a >= 0.0, "convex_combination: negative coefficient");
        w += a;
    }
    require(w > 0.0, "convex_combination: all coefficients zero");
    Point out(sampleMean.size(), 0.0);
    for (std::size_t j = 0; j < out.size(); ++j) {
        double v = alpha[0] * sampleMean[j];
        for (std::size_t i = 0; i < qs.size(); ++i) v += alpha[i + 1] * qs[i][j];
        out[j] = v / w;
    }
    return out;
}

using InSet = std::vector<CandidateCenter>;

namespace detail {

/// One usable radius for a sampled point: its grid index and the mean of the
/// uniform sample drawn from the nice points.
struct RadiusLevel {
    std::size_t radiusIdx;
    Point sampleMean;
};

/// Uniform sample of `size` indices from `pool`: all of them when the pool is
/// smaller than `size`, otherwise `size` independent draws.
inline std::vector<std::size_t> sample_nice(const std::vector<std::size_t>& pool, std::size_t size, Rng& rng) {
    if (pool.size() < size) return pool;
    std::vector<std::size_t> s(size);
    for (auto& v : s) v = pool[static_cast<std::size_t>(rng.below(pool.size()))];
    return s;
}

/// Core of APX-centers. `costToT[x]` is cost(x, T). Calls `emit` once per
/// candidate In-set; the first one is always (q₁, ..., q_s).
template <class Emit>
void apx_centers_impl(const Dataset& data, std::span<const double> costToT, std::span<const Point> qs,
                      const NineEpsConfig& cfg, Rng& rng, std::size_t cap, Emit&& emit) {
    const std::size_t s = qs.size();
    require(s >= 1, "apx_centers: need at least one sampled point");
    require(cfg.minDistance && cfg.aspectRatio, "apx_centers: distance scale not resolved");
    const auto grid = radius_grid(*cfg.aspectRatio, cfg.eps);
    const auto vals = coefficient_values(cfg.eps);
    const std::size_t n = data.size();

    // fallback: every ô_i = q_i
    {
        InSet base;
        for (std::size_t i = 0; i < s; ++i) {
            std::vector<double> alpha(s + 1, 0.0);
            alpha[i + 1] = 1.0;
            base.push_back({qs[i], i, CandidateCenter::kNoRadius, std::move(alpha)});
        }
        emit(base);
    }
    if (cap <= 1) return;

    std::vector<std::vector<RadiusLevel>> levels(s);
    std::vector<double> toQ(n);
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t x = 0; x < n; ++x) toQ[x] = sq_dist(data[x], qs[i]);
        for (std::size_t r = 0; r < grid.size(); ++r) {
            const auto part = partition_by_costs(toQ, costToT, grid[r] * *cfg.minDistance, cfg.eps);
            if (part.nice.empty()) continue;
            const auto sample = sample_nice(part.nice, cfg.sample_size(), rng);
            levels[i].push_back({r, centroid(data, sample)});
        }
        if (levels[i].empty()) return;
    }

    const std::size_t width = s + 1;
    const double tuples = std::pow(static_cast<double>(vals.size()), static_cast<double>(width)) - 1.0;
    double product = 1.0;
    for (const auto& l : levels) product *= static_cast<double>(l.size()) * tuples;

    auto make = [&](std::size_t i, const RadiusLevel& lvl, std::vector<double> alpha) {
        Point c = convex_combination(lvl.sampleMean, qs, alpha);
        return CandidateCenter{std::move(c), i, lvl.radiusIdx, std::move(alpha)};
    };

    if (product <= static_cast<double>(cap - 1)) {
        const auto all = coefficient_grid(cfg.eps, s);
        std::vector<std::vector<CandidateCenter>> perTarget(s);
        for (std::size_t i = 0; i < s; ++i)
            for (const auto& lvl : levels[i])
                for (const auto& alpha : all) perTarget[i].push_back(make(i, lvl, alpha));
        std::vector<std::size_t> pos(s, 0);
        InSet set(s);
        for (;;) {
            for (std::size_t i = 0; i < s; ++i) set[i] = perTarget[i][pos[i]];
            emit(set);
            std::size_t i = s;
            while (i-- > 0) {
                if (++pos[i] < perTarget[i].size()) break;
                pos[i] = 0;
            }
            if (i == static_cast<std::size_t>(-1)) break;
        }
        return;
    }

    // uniform sample (with replacement) from the product
    const std::size_t zero = vals.size() - 1;
    InSet set(s);
    std::vector<std::size_t> digit(width);
    for (std::size_t drawn = 1; drawn < cap; ++drawn) {
        for (std::size_t i = 0; i < s; ++i) {
            const auto& lvl = levels[i][static_cast<std::size_t>(rng.below(levels[i].size()))];
            bool allZero;
            do {
                allZero = true;
                for (auto& d : digit) {
                    d = static_cast<std::size_t>(rng.below(vals.size()));
                    allZero = allZero && d == zero;
                }
            } while (allZero);
            std::vector<double> alpha(width);
            for (std::size_t j = 0; j < width; ++j) alpha[j] = vals[digit[j]];
            set[i] = make(i, lvl, std::move(alpha));
        }
        emit(set);
    }
}

}  // namespace detail

/// Candidate In-sets approximating the optimal centers near `qs`, given the
/// temporary centers `temporary`. The list holds at most `cfg.candidateCap`
/// sets; when the full radius × coefficient product is larger, a uniform
/// sample of it is returned. The set (q₁, ..., q_s) is always first.
inline std::vector<InSet> apx_centers(const Dataset& data, std::span<const Point> temporary,
                                      std::span<const Point> qs, const NineEpsConfig& cfg, Rng& rng) {
    const auto resolved = resolve_scale(cfg, data);
    std::vector<double> toT(data.size(), std::numeric_limits<double>::infinity());
    for (std::size_t x = 0; x < data.size(); ++x)
        for (const auto& t : temporary) toT[x] = std::min(toT[x], sq_dist(data[x], t));
    std::vector<InSet> out;
    detail::apx_centers_impl(data, toT, qs, resolved, rng, resolved.candidateCap,
                             [&](const InSet& set) { out.push_back(set); });
    return out;
}

/// One local search step with APX-centers refinement. D²-samples 𝒬 (|𝒬| = p),
/// and for every size-p Out ⊆ 𝒞 ∪ 𝒬 evaluates the candidate In-sets built
/// from T = (𝒞 ∪ 𝒬) ∖ Out against the swap (În, Out ∖ 𝒬). The best swap over
/// all Out is applied when it improves the cost. `cfg` must have its distance
/// scale resolved (see resolve_scale).
inline std::optional<SwapProposal> nine_eps_step(CentersState& state, const NineEpsConfig& cfg, Rng& rng) {
    require(cfg.minDistance && cfg.aspectRatio, "nine_eps_step: distance scale not resolved");
    const std::size_t k = state.k(), n = state.n();
    const std::size_t p = effective_swap_size(cfg.p(), k);
    const Dataset& data = state.data();
    const auto qIdx = d2_sample(state, rng, p);
    const auto qs = gather_points(data, qIdx);

    std::vector<double> toQ(n * p);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < p; ++j) toQ[x * p + j] = sq_dist(data[x], qs[j]);

    auto outs = detail::all_subsets(k + p, p);
    // Out = 𝒬 leaves nothing to insert
    std::erase_if(outs, [&](const auto& o) { return o.front() >= k; });
    if (outs.empty()) return std::nullopt;
    const std::size_t perOut = std::max<std::size_t>(1, cfg.candidateCap / outs.size());

    double bestCost = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> bestSlots;
    std::vector<Point> bestIn;

    std::vector<bool> removed(k + p);
    std::vector<double> base(n), toT(n), cand(n);
    for (const auto& out : outs) {
        std::fill(removed.begin(), removed.end(), false);
        for (std::size_t i : out) removed[i] = true;
        std::vector<std::size_t> slots;
        std::vector<Point> kept;
        for (std::size_t i : out)
            if (i < k) slots.push_back(i);
        for (std::size_t j = 0; j < p; ++j)
            if (!removed[k + j]) kept.push_back(qs[j]);
        for (std::size_t x = 0; x < n; ++x) {
            const RankEntry* e = state.nearest_surviving(x, removed);
            base[x] = e ? e->dist : std::numeric_limits<double>::infinity();
            toT[x] = base[x];
            for (std::size_t j = 0; j < p; ++j)
                if (!removed[k + j]) toT[x] = std::min(toT[x], toQ[x * p + j]);
        }

        detail::apx_centers_impl(data, toT, kept, cfg, rng, perOut, [&](const InSet& set) {
            std::copy(base.begin(), base.end(), cand.begin());
            for (const auto& c : set)
                for (std::size_t x = 0; x < n; ++x) cand[x] = std::min(cand[x], sq_dist(data[x], c.coords));
            double total = 0.0;
            for (double v : cand) total += v;
            if (total < bestCost) {
                bestCost = total;
                bestSlots = slots;
                bestIn.clear();
                for (const auto& c : set) bestIn.push_back(c.coords);
            }
        });
    }

    // exact cost of the winner, summed the same way as the state's total
    CompensatedSum exact;
    for (std::size_t x = 0; x < n; ++x) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& e : state.rank(x))
            if (std::find(bestSlots.begin(), bestSlots.end(), e.idx) == bestSlots.end()) {
                d = e.dist;
                break;
            }
        for (const auto& c : bestIn) d = std::min(d, sq_dist(data[x], c));
        exact.add(d);
    }
    LsConfig rule;
    rule.acceptRule = cfg.acceptRule;
    rule.delta = cfg.delta;
    SwapProposal prop{bestIn, bestSlots, {}, 0.0, exact.value()};
    prop.delta = prop.newCost - state.total_cost();
    if (!accepts(rule, state.total_cost(), prop.newCost, k)) return std::nullopt;
    apply_swap(state, prop);
    return prop;
}

/// Runs `steps` nine_eps_step calls from `init` with an Rng seeded by `seed`.
inline std::pair<CentersState, Trajectory> run_nine_eps(const Dataset& data, std::vector<Point> init,
                                                        NineEpsConfig cfg, std::size_t steps, std::uint64_t seed) {
    cfg = resolve_scale(cfg, data);
    CentersState state(data, std::move(init));
    warn_if_clamped(cfg.p(), state.k());
    Rng rng(seed);
    Trajectory traj{{0, state.total_cost(), false, 0.0}};
    for (std::size_t s = 1; s <= steps; ++s) {
        const auto t0 = std::chrono::steady_clock::now();
        const bool ok = nine_eps_step(state, cfg, rng).has_value();
        traj.push_back({s, state.total_cost(), ok,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
    }
    return {std::move(state), std::move(traj)};
}

}  // namespace msls
