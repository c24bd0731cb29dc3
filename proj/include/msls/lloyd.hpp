#pragma once

#include <cstddef>
#include <vector>

#include "msls/core.hpp"

namespace msls {

struct Assignment {
    std::vector<std::size_t> label;
    std::vector<double> pointCost;
    double total = 0.0;
};

inline Assignment assign_points(const Dataset& data, std::span<const Point> centers) {
    check_centers(data, centers);
    Assignment a;
    a.label.resize(data.size());
    a.pointCost.resize(data.size());
    CompensatedSum s;
    for (std::size_t x = 0; x < data.size(); ++x) {
        auto [c, d] = nearest_center(data[x], centers);
        a.label[x] = c;
        a.pointCost[x] = d;
        s.add(d);
    }
    a.total = s.value();
    return a;
}

/// Moves every center to the centroid of its cluster. An empty cluster's
/// center is reseeded at the point of largest current cost (lowest index on
/// ties); that point's cost is then treated as zero for further reseeds.
inline std::vector<Point> lloyd_update(const Dataset& data, const std::vector<Point>& centers, const Assignment& a) {
    const std::size_t k = centers.size(), d = data.dim();
    std::vector<Point> sums(k, Point(d, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t x = 0; x < data.size(); ++x) {
        auto p = data[x];
        auto& s = sums[a.label[x]];
        for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
        ++counts[a.label[x]];
    }
    std::vector<double> residual = a.pointCost;
    std::vector<Point> next(k);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            next[c] = std::move(sums[c]);
            for (double& v : next[c]) v /= static_cast<double>(counts[c]);
            continue;
        }
        std::size_t far = 0;
        for (std::size_t x = 1; x < residual.size(); ++x)
            if (residual[x] > residual[far]) far = x;
        if (residual[far] > 0.0) {
            next[c] = data.point(far);
            residual[far] = 0.0;
        } else {
            next[c] = centers[c];  // every point already sits on a center
        }
    }
    return next;
}

struct LloydResult {
    std::vector<Point> centers;
    std::vector<double> costs;  // cost after each completed iteration
};

/// Up to `iters` Lloyd iterations. Stops early once an iteration improves the
/// cost by less than a 1e-12 relative fraction.
inline LloydResult lloyd_iterate(const Dataset& data, std::vector<Point> centers, std::size_t iters) {
    check_centers(data, centers);
    LloydResult res;
    if (iters == 0) {
        res.centers = std::move(centers);
        return res;
    }
    Assignment a = assign_points(data, centers);
    double prev = a.total;
    for (std::size_t it = 0; it < iters; ++it) {
        centers = lloyd_update(data, centers, a);
        a = assign_points(data, centers);
        res.costs.push_back(a.total);
        if (prev - a.total <= 1e-12 * prev) break;
        prev = a.total;
    }
    res.centers = std::move(centers);
    return res;
}

}  // namespace msls
