#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msls {

/// Raised when a caller breaks an operation's preconditions (dimension
/// mismatch, empty center set, out-of-range index, ...).
class contract_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const char* what) {
    if (!cond) throw contract_error(what);
}

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Per-feature (min, max) recorded by min-max scaling.
struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

/// Row-major point set. All rows share the same dimension.
class Dataset {
public:
    Dataset() = default;

    Dataset(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
        require(dim_ > 0, "Dataset: dimension must be positive");
        require(coords_.size() % dim_ == 0, "Dataset: coordinate count is not a multiple of dim");
        for (double v : coords_) require(std::isfinite(v), "Dataset: non-finite coordinate");
    }

    static Dataset from_points(const std::vector<Point>& pts) {
        require(!pts.empty(), "Dataset: need at least one point");
        const std::size_t d = pts.front().size();
        std::vector<double> flat;
        flat.reserve(pts.size() * d);
        for (const auto& p : pts) {
            require(p.size() == d, "Dataset: points have different dimensions");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return Dataset(d, std::move(flat));
    }

    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return size() == 0; }

    PointView operator[](std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
    Point point(std::size_t i) const {
        auto v = (*this)[i];
        return {v.begin(), v.end()};
    }

    const std::vector<double>& coords() const { return coords_; }

    const std::optional<std::vector<FeatureRange>>& scaling() const { return scaling_; }
    void set_scaling(std::vector<FeatureRange> s) { scaling_ = std::move(s); }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
    std::optional<std::vector<FeatureRange>> scaling_;
};

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sq_dist(PointView a, PointView b) {
    require(a.size() == b.size(), "sq_dist: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

/// Index of the nearest center; ties go to the lowest index.
inline std::pair<std::size_t, double> nearest_center(PointView x, std::span<const Point> centers) {
    std::size_t best = 0;
    double bestD = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(x, centers[c]);
        if (d < bestD) {
            bestD = d;
            best = c;
        }
    }
    return {best, bestD};
}

inline void check_centers(const Dataset& data, std::span<const Point> centers) {
    require(!centers.empty(), "centers must be nonempty");
    for (const auto& c : centers) require(c.size() == data.dim(), "center dimension mismatch");
}

/// k-means cost: sum over points of the squared distance to the nearest center.
inline double cost(const Dataset& data, std::span<const Point> centers) {
    check_centers(data, centers);
    CompensatedSum total;
    for (std::size_t i = 0; i < data.size(); ++i) total.add(nearest_center(data[i], centers).second);
    return total.value();
}

/// Mean of the rows selected by `indices`.
inline Point centroid(const Dataset& data, std::span<const std::size_t> indices) {
    require(!indices.empty(), "centroid: empty subset");
    Point mu(data.dim(), 0.0);
    for (std::size_t i : indices) {
        require(i < data.size(), "centroid: index out of range");
        auto x = data[i];
        for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += x[j];
    }
    for (double& v : mu) v /= static_cast<double>(indices.size());
    return mu;
}

inline Point centroid(const Dataset& data) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return centroid(data, all);
}

inline Point centroid(std::span<const Point> pts) {
    require(!pts.empty(), "centroid: empty subset");
    Point mu(pts.front().size(), 0.0);
    for (const auto& p : pts) {
        require(p.size() == mu.size(), "centroid: dimension mismatch");
        for (std::size_t j = 0; j < mu.size(); ++j) mu[j] += p[j];
    }
    for (double& v : mu) v /= static_cast<double>(pts.size());
    return mu;
}

/// One entry of a point's ranking over centers.
struct RankEntry {
    double dist;
    std::uint32_t idx;

    friend bool operator<(const RankEntry& a, const RankEntry& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.idx < b.idx);
    }
};

/// Result of a removal query: for every surviving center, the total cost
/// increase caused by deleting it on top of the removed set.
struct RemovalCharges {
    double baseCost = 0.0;          // cost with the removed set deleted
    std::vector<double> charge;     // one per center; NaN for removed ones
    std::vector<bool> survives;
};

/// Current centers plus the per-point bookkeeping that makes swap evaluation
/// cheap. Each point keeps all k centers sorted by (squared distance, index),
/// so nearest-after-removal queries only scan a short prefix.
///
/// The state refers to its dataset; the dataset must outlive it.
class CentersState {
public:
    CentersState(const Dataset& data, std::vector<Point> centers) : data_(&data), centers_(std::move(centers)) {
        check_centers(data, centers_);
        require(centers_.size() < std::numeric_limits<std::uint32_t>::max(), "too many centers");
        rebuild();
    }

    const Dataset& data() const { return *data_; }
    std::size_t k() const { return centers_.size(); }
    std::size_t n() const { return data_->size(); }
    const std::vector<Point>& centers() const { return centers_; }
    const Point& center(std::size_t c) const { return centers_[c]; }

    std::size_t assign(std::size_t x) const { return rank(x)[0].idx; }
    double point_cost(std::size_t x) const { return rank(x)[0].dist; }
    double total_cost() const { return total_; }

    std::vector<double> point_costs() const {
        std::vector<double> out(n());
        for (std::size_t x = 0; x < out.size(); ++x) out[x] = point_cost(x);
        return out;
    }

    /// Sorted (distance, center) pairs for point x, length k.
    std::span<const RankEntry> rank(std::size_t x) const { return {ranks_.data() + x * k(), k()}; }

    /// First entry of rank(x) whose center is not flagged in `removed`.
    /// Returns nullptr when every center is removed.
    const RankEntry* nearest_surviving(std::size_t x, const std::vector<bool>& removed, std::size_t skip = 0) const {
        for (const auto& e : rank(x)) {
            if (removed[e.idx]) continue;
            if (skip == 0) return &e;
            --skip;
        }
        return nullptr;
    }

    /// Removal charges with `removedSet` hypothetically deleted. Pure query.
    RemovalCharges eval_removals(std::span<const std::size_t> removedSet) const {
        std::vector<bool> removed(k(), false);
        for (std::size_t c : removedSet) {
            require(c < k(), "eval_removals: center index out of range");
            removed[c] = true;
        }
        const auto removedCount = static_cast<std::size_t>(std::count(removed.begin(), removed.end(), true));
        require(removedCount < k(), "eval_removals: cannot remove every center");

        RemovalCharges out;
        out.survives.resize(k());
        std::vector<CompensatedSum> acc(k());
        CompensatedSum base;
        for (std::size_t x = 0; x < n(); ++x) {
            const RankEntry* first = nearest_surviving(x, removed);
            const RankEntry* second = nearest_surviving(x, removed, 1);
            base.add(first->dist);
            acc[first->idx].add(second ? second->dist - first->dist : std::numeric_limits<double>::infinity());
        }
        out.baseCost = base.value();
        out.charge.resize(k());
        for (std::size_t c = 0; c < k(); ++c) {
            out.survives[c] = !removed[c];
            out.charge[c] = removed[c] ? std::numeric_limits<double>::quiet_NaN() : acc[c].value();
        }
        // A lone survivor cannot be removed even if it serves no points.
        if (removedCount + 1 == k())
            for (std::size_t c = 0; c < k(); ++c)
                if (!removed[c]) out.charge[c] = std::numeric_limits<double>::infinity();
        return out;
    }

    /// Appends a center; it gets index k (before the call).
    void add_center(Point c) {
        require(c.size() == data_->dim(), "add_center: dimension mismatch");
        centers_.push_back(std::move(c));
        rebuild();
    }

    /// Removes center `c`; later centers shift down by one index.
    void remove_center(std::size_t c) {
        require(c < k(), "remove_center: index out of range");
        require(k() > 1, "remove_center: cannot remove the last center");
        centers_.erase(centers_.begin() + static_cast<std::ptrdiff_t>(c));
        rebuild();
    }

    /// Overwrites the listed center slots with new points, keeping k fixed.
    /// Only the rank entries of the replaced slots are recomputed.
    void replace_centers(std::span<const std::size_t> slots, std::span<const Point> points) {
        require(slots.size() == points.size(), "replace_centers: size mismatch");
        if (slots.empty()) return;
        std::vector<bool> touched(k(), false);
        for (std::size_t i = 0; i < slots.size(); ++i) {
            require(slots[i] < k(), "replace_centers: index out of range");
            require(!touched[slots[i]], "replace_centers: duplicate slot");
            require(points[i].size() == data_->dim(), "replace_centers: dimension mismatch");
            touched[slots[i]] = true;
            centers_[slots[i]] = points[i];
        }
        const std::size_t kk = k();
        std::vector<RankEntry> fresh(slots.size());
        for (std::size_t x = 0; x < n(); ++x) {
            RankEntry* row = ranks_.data() + x * kk;
            auto keep = std::remove_if(row, row + kk, [&](const RankEntry& e) { return touched[e.idx]; });
            for (std::size_t i = 0; i < slots.size(); ++i)
                fresh[i] = {sq_dist((*data_)[x], centers_[slots[i]]), static_cast<std::uint32_t>(slots[i])};
            std::sort(fresh.begin(), fresh.end());
            // merge the sorted survivors with the sorted fresh entries in place, from the back
            std::ptrdiff_t a = (keep - row) - 1, b = static_cast<std::ptrdiff_t>(fresh.size()) - 1;
            for (std::ptrdiff_t w = static_cast<std::ptrdiff_t>(kk) - 1; w >= 0; --w) {
                if (b < 0 || (a >= 0 && fresh[static_cast<std::size_t>(b)] < row[a]))
                    row[w] = row[a--];
                else
                    row[w] = fresh[static_cast<std::size_t>(b--)];
            }
        }
        recompute_total();
    }

private:
    void rebuild() {
        const std::size_t kk = k();
        ranks_.assign(n() * kk, RankEntry{0.0, 0});
        for (std::size_t x = 0; x < n(); ++x) {
            RankEntry* row = ranks_.data() + x * kk;
            for (std::size_t c = 0; c < kk; ++c) row[c] = {sq_dist((*data_)[x], centers_[c]), static_cast<std::uint32_t>(c)};
            std::sort(row, row + kk);
        }
        recompute_total();
    }

    void recompute_total() {
        CompensatedSum s;
        for (std::size_t x = 0; x < n(); ++x) s.add(point_cost(x));
        total_ = s.value();
    }

    const Dataset* data_;
    std::vector<Point> centers_;
    std::vector<RankEntry> ranks_;
    double total_ = 0.0;
};

inline CentersState build_state(const Dataset& data, std::vector<Point> centers) {
    return CentersState(data, std::move(centers));
}

}  // namespace msls
