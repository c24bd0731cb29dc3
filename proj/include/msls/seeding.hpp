#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "msls/core.hpp"

namespace msls {

/// Seedable generator. Wraps std::mt19937_64 (whose output sequence is fixed
/// by the standard) and derives reals and bounded integers itself, so sample
/// sequences do not depend on the standard library's distributions.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64/v1";

    explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        require(bound > 0, "Rng::below: bound must be positive");
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
        std::uint64_t r;
        do r = engine_();
        while (r >= limit);
        return r % bound;
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal() {
        double u1;
        do u1 = uniform();
        while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Independent child stream; deterministic in (seed, stream).
    Rng fork(std::uint64_t stream) const { return Rng(mix(seed_ ^ mix(stream + 0x9e3779b97f4a7c15ULL))); }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

/// Draws `count` indices i.i.d. with probability proportional to `weights`.
/// The distribution is frozen for all draws. Zero total mass falls back to
/// uniform sampling over all indices.
inline std::vector<std::size_t> weighted_sample(std::span<const double> weights, Rng& rng, std::size_t count) {
    require(count >= 1, "weighted_sample: count must be >= 1");
    require(!weights.empty(), "weighted_sample: empty weights");
    std::vector<double> prefix(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        require(weights[i] >= 0.0 && std::isfinite(weights[i]), "weighted_sample: invalid weight");
        acc += weights[i];
        prefix[i] = acc;
    }
    std::vector<std::size_t> out;
    out.reserve(count);
    if (!(acc > 0.0)) {
        for (std::size_t j = 0; j < count; ++j) out.push_back(static_cast<std::size_t>(rng.below(weights.size())));
        return out;
    }
    for (std::size_t j = 0; j < count; ++j) {
        const double u = rng.uniform() * acc;
        auto i = static_cast<std::size_t>(std::upper_bound(prefix.begin(), prefix.end(), u) - prefix.begin());
        if (i == prefix.size()) {
            // u rounded up to acc: take the last index with positive weight
            i = prefix.size() - 1;
            while (weights[i] == 0.0) --i;
        }
        out.push_back(i);
    }
    return out;
}

/// D² sampling against the state's current point costs, without updating
/// costs between draws.
inline std::vector<std::size_t> d2_sample(const CentersState& state, Rng& rng, std::size_t count) {
    const auto costs = state.point_costs();
    return weighted_sample(costs, rng, count);
}

/// Indices picked by k-means++: first uniform, then D² with costs refreshed
/// after every pick. Picks are distinct.
inline std::vector<std::size_t> kmeanspp_indices(const Dataset& data, std::size_t k, Rng& rng) {
    const std::size_t n = data.size();
    require(k >= 1, "kmeanspp_seed: k must be >= 1");
    require(k <= n, "kmeanspp_seed: k exceeds number of points");
    std::vector<std::size_t> picks;
    picks.reserve(k);
    std::vector<bool> picked(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t i) {
        picks.push_back(i);
        picked[i] = true;
        for (std::size_t x = 0; x < n; ++x) d2[x] = std::min(d2[x], sq_dist(data[x], data[i]));
    };

    take(static_cast<std::size_t>(rng.below(n)));
    while (picks.size() < k) {
        double total = 0.0;
        for (std::size_t x = 0; x < n; ++x) total += d2[x];
        if (total > 0.0) {
            take(weighted_sample(d2, rng, 1).front());
        } else {
            // every remaining point coincides with a center; pick uniformly among unpicked indices
            std::vector<std::size_t> rest;
            for (std::size_t x = 0; x < n; ++x)
                if (!picked[x]) rest.push_back(x);
            take(rest[static_cast<std::size_t>(rng.below(rest.size()))]);
        }
    }
    return picks;
}

inline std::vector<Point> kmeanspp_seed(const Dataset& data, std::size_t k, Rng& rng) {
    std::vector<Point> centers;
    for (std::size_t i : kmeanspp_indices(data, k, rng)) centers.push_back(data.point(i));
    return centers;
}

}  // namespace msls
