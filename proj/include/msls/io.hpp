#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msls/core.hpp"
#include "msls/seeding.hpp"

namespace msls {

/// Malformed input file. `row` and `column` are 1-based (0 when not applicable).
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : std::runtime_error(row ? what + " at row " + std::to_string(row) + ", column " + std::to_string(column) : what),
          row_(row),
          column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_, column_;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses delimited numeric text. Rows are counted from 1 in file order
/// (a header counts as row 1); blank lines are skipped.
inline Dataset parse_csv(std::istream& in, char delimiter = ',', bool header = false) {
    std::string line;
    std::size_t row = 0, dim = 0;
    std::vector<double> coords;
    bool skippedHeader = !header;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        if (!skippedHeader) {
            skippedHeader = true;
            continue;
        }
        std::size_t col = 0;
        std::string_view rest(line);
        for (;;) {
            const auto cut = rest.find(delimiter);
            const auto cell = rest.substr(0, cut);
            ++col;
            double v;
            if (!detail::parse_double(cell, v))
                throw parse_error("non-numeric cell '" + std::string(detail::trim(cell)) + "'", row, col);
            coords.push_back(v);
            if (cut == std::string_view::npos) break;
            rest.remove_prefix(cut + 1);
        }
        if (dim == 0)
            dim = col;
        else if (col != dim)
            throw parse_error("ragged row: expected " + std::to_string(dim) + " columns, found " + std::to_string(col),
                              row, col);
    }
    if (coords.empty()) throw parse_error("no data rows");
    return Dataset(dim, std::move(coords));
}

inline Dataset load_csv(const std::string& path, char delimiter = ',', bool header = false) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    return parse_csv(in, delimiter, header);
}

/// Maps every feature to [0,1] by (x − min)/(max − min); constant features
/// become 0. The ranges are recorded on the result.
inline Dataset minmax_scale(const Dataset& data) {
    require(!data.empty(), "minmax_scale: empty dataset");
    const std::size_t d = data.dim(), n = data.size();
    std::vector<FeatureRange> ranges(d, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < d; ++j) {
            ranges[j].min = std::min(ranges[j].min, data[x][j]);
            ranges[j].max = std::max(ranges[j].max, data[x][j]);
        }
    std::vector<double> out(n * d);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t j = 0; j < d; ++j) {
            const double span = ranges[j].max - ranges[j].min;
            out[x * d + j] = span > 0.0 ? std::clamp((data[x][j] - ranges[j].min) / span, 0.0, 1.0) : 0.0;
        }
    Dataset scaled(d, std::move(out));
    scaled.set_scaling(std::move(ranges));
    return scaled;
}

/// ⌈fraction·n⌉ rows drawn uniformly without replacement; rows keep their
/// original relative order.
inline Dataset subsample(const Dataset& data, double fraction, Rng& rng) {
    require(fraction > 0.0 && fraction <= 1.0, "subsample: fraction must lie in (0,1]");
    const std::size_t n = data.size();
    const auto m = std::min(n, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)));
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // partial Fisher-Yates
    for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + static_cast<std::size_t>(rng.below(n - i))]);
    idx.resize(std::max<std::size_t>(m, 1));
    std::sort(idx.begin(), idx.end());
    std::vector<double> out;
    out.reserve(idx.size() * data.dim());
    for (std::size_t i : idx) out.insert(out.end(), data[i].begin(), data[i].end());
    Dataset sample(data.dim(), std::move(out));
    if (data.scaling()) sample.set_scaling(*data.scaling());
    return sample;
}

struct MixtureSpec {
    std::size_t n = 1000;
    std::size_t dim = 2;
    std::size_t components = 4;
    double sigma = 0.05;     // per-coordinate standard deviation
    double spread = 1.0;     // means uniform in [0, spread]^dim
    double imbalance = 0.0;  // component weights ∝ (1 + imbalance·u), u ~ U[0,1)
};

struct Mixture {
    Dataset data;
    std::vector<std::size_t> label;
    std::vector<Point> means;
};

/// Isotropic Gaussian mixture with uniformly placed means.
inline Mixture make_gaussian_mixture(const MixtureSpec& spec, Rng& rng) {
    require(spec.n >= 1 && spec.dim >= 1 && spec.components >= 1, "mixture: sizes must be positive");
    Mixture m;
    m.means.assign(spec.components, Point(spec.dim));
    for (auto& mu : m.means)
        for (double& v : mu) v = spec.spread * rng.uniform();
    std::vector<double> weight(spec.components);
    for (double& w : weight) w = 1.0 + spec.imbalance * rng.uniform();

    // deterministic allocation of component sizes by largest remainder
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    std::vector<std::size_t> count(spec.components);
    std::size_t assigned = 0;
    std::vector<std::pair<double, std::size_t>> rem;
    for (std::size_t c = 0; c < spec.components; ++c) {
        const double exact = static_cast<double>(spec.n) * weight[c] / wsum;
        count[c] = static_cast<std::size_t>(exact);
        assigned += count[c];
        rem.push_back({exact - static_cast<double>(count[c]), c});
    }
    std::sort(rem.begin(), rem.end(), [](auto a, auto b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (std::size_t i = 0; assigned < spec.n; ++i, ++assigned) ++count[rem[i % rem.size()].second];

    std::vector<double> coords;
    coords.reserve(spec.n * spec.dim);
    for (std::size_t c = 0; c < spec.components; ++c)
        for (std::size_t i = 0; i < count[c]; ++i) {
            for (std::size_t j = 0; j < spec.dim; ++j) coords.push_back(m.means[c][j] + spec.sigma * rng.normal());
            m.label.push_back(c);
        }
    m.data = Dataset(spec.dim, std::move(coords));
    return m;
}

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline void write_points_csv(std::ostream& out, std::span<const Point> pts, char delimiter = ',') {
    for (const auto& p : pts) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (j) out << delimiter;
            out << format_double(p[j]);
        }
        out << '\n';
    }
}

}  // namespace msls
