#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "msls/core.hpp"
#include "msls/io.hpp"
#include "msls/lloyd.hpp"
#include "msls/local_search.hpp"
#include "msls/nine_eps.hpp"
#include "msls/seeding.hpp"

namespace msls {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid experiment description; `field` names the offending JSON path.
class spec_error : public std::runtime_error {
public:
    spec_error(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// One algorithm entry of an experiment: "kmpp", "ssls", "msls", "msls-g" or "nine-eps".
struct AlgorithmSpec {
    std::string variant;
    std::size_t p = 1;
    double eps = 0.5;
    std::size_t candidateCap = 100000;

    std::string label() const {
        if (variant == "kmpp" || variant == "ssls") return variant;
        if (variant == "nine-eps") return variant + "(eps=" + format_double(eps) + ")";
        return variant + "(p=" + std::to_string(p) + ")";
    }
};

struct ExperimentSpec {
    std::string name = "experiment";
    // exactly one of the two dataset sources
    std::optional<std::string> path;
    char delimiter = ',';
    bool header = false;
    std::optional<MixtureSpec> synthetic;
    std::uint64_t datasetSeed = 0;

    std::size_t k = 10;
    std::vector<AlgorithmSpec> algorithms;
    std::size_t steps = 50;
    std::size_t lloydIters = 10;
    std::vector<std::uint64_t> seeds;
    std::vector<std::size_t> lambdas;
    double subsampleFraction = 1.0;
    bool scale = true;
    bool scaleBeforeSubsample = false;

    nlohmann::json raw;  // echoed into result meta
};

namespace detail {

template <class T>
T field(const nlohmann::json& j, const std::string& key, T fallback, const std::string& prefix = "") {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw spec_error(prefix + key, std::string("wrong type (") + e.what() + ")");
    }
}

}  // namespace detail

inline ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
    using detail::field;
    if (!j.is_object()) throw spec_error("<root>", "spec must be a JSON object");
    ExperimentSpec s;
    s.raw = j;
    s.name = field<std::string>(j, "name", s.name);
    if (!j.contains("dataset")) throw spec_error("dataset", "missing");
    const auto& ds = j.at("dataset");
    if (!ds.is_object()) throw spec_error("dataset", "must be an object");
    if (ds.contains("path") == ds.contains("synthetic"))
        throw spec_error("dataset", "give exactly one of 'path' or 'synthetic'");
    if (ds.contains("path")) {
        s.path = field<std::string>(ds, "path", "", "dataset.");
        const auto delim = field<std::string>(ds, "delimiter", ",", "dataset.");
        if (delim.size() != 1) throw spec_error("dataset.delimiter", "must be a single character");
        s.delimiter = delim[0];
        s.header = field<bool>(ds, "header", false, "dataset.");
    } else {
        const auto& sy = ds.at("synthetic");
        if (!sy.is_object()) throw spec_error("dataset.synthetic", "must be an object");
        MixtureSpec m;
        const std::string pre = "dataset.synthetic.";
        m.n = field<std::size_t>(sy, "n", m.n, pre);
        m.dim = field<std::size_t>(sy, "d", m.dim, pre);
        m.components = field<std::size_t>(sy, "components", m.components, pre);
        m.sigma = field<double>(sy, "sigma", m.sigma, pre);
        m.spread = field<double>(sy, "spread", m.spread, pre);
        m.imbalance = field<double>(sy, "imbalance", m.imbalance, pre);
        if (m.n == 0 || m.dim == 0 || m.components == 0) throw spec_error(pre + "n", "sizes must be positive");
        if (!(m.sigma >= 0.0)) throw spec_error(pre + "sigma", "must be >= 0");
        s.synthetic = m;
    }
    s.datasetSeed = field<std::uint64_t>(ds, "seed", 0, "dataset.");

    s.k = field<std::size_t>(j, "k", 0);
    if (s.k == 0) throw spec_error("k", "must be a positive integer");
    s.steps = field<std::size_t>(j, "steps", s.steps);
    s.lloydIters = field<std::size_t>(j, "lloyd_iters", s.lloydIters);
    s.subsampleFraction = field<double>(j, "subsample", 1.0);
    if (!(s.subsampleFraction > 0.0 && s.subsampleFraction <= 1.0)) throw spec_error("subsample", "must lie in (0,1]");
    s.scale = field<bool>(j, "scale", true);
    s.scaleBeforeSubsample = field<bool>(j, "scale_before_subsample", false);

    s.seeds = field<std::vector<std::uint64_t>>(j, "seeds", {});
    if (s.seeds.empty()) throw spec_error("seeds", "must be a nonempty list");
    if (j.contains("lambdas")) {
        const auto& l = j.at("lambdas");
        if (!l.is_array()) throw spec_error("lambdas", "must be a list");
        for (const auto& v : l) {
            if (!v.is_number_integer() || v.get<long long>() <= 0)
                throw spec_error("lambdas", "values must be positive integers");
            s.lambdas.push_back(v.get<std::size_t>());
        }
    }

    if (!j.contains("algorithms") || !j.at("algorithms").is_array() || j.at("algorithms").empty())
        throw spec_error("algorithms", "must be a nonempty list");
    std::size_t i = 0;
    for (const auto& a : j.at("algorithms")) {
        const std::string pre = "algorithms[" + std::to_string(i++) + "].";
        if (!a.is_object()) throw spec_error(pre.substr(0, pre.size() - 1), "must be an object");
        AlgorithmSpec alg;
        alg.variant = field<std::string>(a, "variant", "", pre);
        if (alg.variant != "kmpp" && alg.variant != "ssls" && alg.variant != "msls" && alg.variant != "msls-g" &&
            alg.variant != "nine-eps")
            throw spec_error(pre + "variant", "unknown variant '" + alg.variant + "'");
        alg.p = field<std::size_t>(a, "p", 1, pre);
        if (alg.p == 0) throw spec_error(pre + "p", "must be >= 1");
        if (alg.variant == "ssls") alg.p = 1;
        alg.eps = field<double>(a, "eps", 0.5, pre);
        if (!(alg.eps > 0.0 && alg.eps < 1.0)) throw spec_error(pre + "eps", "must lie in (0,1)");
        alg.candidateCap = field<std::size_t>(a, "candidate_cap", alg.candidateCap, pre);
        s.algorithms.push_back(alg);
    }
    return s;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw spec_error("<root>", std::string("invalid JSON: ") + e.what());
    }
    return parse_experiment_spec(j);
}

/// Loads or generates the dataset, then subsamples and scales it in the
/// configured order.
inline Dataset prepare_dataset(const ExperimentSpec& spec) {
    Rng rng(spec.datasetSeed);
    Dataset data;
    if (spec.path) {
        data = load_csv(*spec.path, spec.delimiter, spec.header);
    } else {
        Rng gen = rng.fork(1);
        data = make_gaussian_mixture(*spec.synthetic, gen).data;
    }
    Rng sub = rng.fork(2);
    if (spec.scale && spec.scaleBeforeSubsample) data = minmax_scale(data);
    if (spec.subsampleFraction < 1.0) data = subsample(data, spec.subsampleFraction, sub);
    if (spec.scale && !spec.scaleBeforeSubsample) data = minmax_scale(data);
    if (spec.k > data.size()) throw spec_error("k", "exceeds the number of points");
    return data;
}

struct ResultRow {
    std::string dataset;
    std::string algorithm;
    std::size_t p = 0;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    std::string phase;  // "seed", "ls", "lloyd" or "deadline"
    std::size_t index = 0;
    double cost = 0.0;
    double relativeCost = 0.0;
    double seconds = 0.0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    nlohmann::json meta = nlohmann::json::object();
};

struct SummaryRow {
    std::string dataset, algorithm, phase;
    std::size_t p = 0, k = 0, index = 0, count = 0;
    double costMean = 0, costStd = 0, relativeMean = 0, relativeStd = 0, secondsMean = 0;
};

/// Mean and sample standard deviation across seeds for every
/// (dataset, algorithm, p, k, phase, index) cell.
inline std::vector<SummaryRow> summarize(const ResultTable& t) {
    using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, std::string, std::size_t>;
    std::map<Key, std::vector<const ResultRow*>> cells;
    std::vector<Key> order;
    for (const auto& r : t.rows) {
        Key key{r.dataset, r.algorithm, r.p, r.k, r.phase, r.index};
        auto [it, fresh] = cells.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.push_back(&r);
    }
    auto stats = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::pair{m, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
    };
    std::vector<SummaryRow> out;
    for (const auto& key : order) {
        const auto& rows = cells[key];
        std::vector<double> c, rel, sec;
        for (const auto* r : rows) {
            c.push_back(r->cost);
            rel.push_back(r->relativeCost);
            sec.push_back(r->seconds);
        }
        SummaryRow s;
        std::tie(s.dataset, s.algorithm, s.p, s.k, s.phase, s.index) = key;
        s.count = rows.size();
        std::tie(s.costMean, s.costStd) = stats(c);
        std::tie(s.relativeMean, s.relativeStd) = stats(rel);
        s.secondsMean = stats(sec).first;
        out.push_back(s);
    }
    return out;
}

namespace detail {

/// Uniform stepping interface over the local search variants.
class Engine {
public:
    virtual ~Engine() = default;
    virtual void step() = 0;
    virtual const CentersState& state() const = 0;
};

class SwapEngine final : public Engine {
public:
    SwapEngine(const Dataset& d, std::vector<Point> init, LsConfig cfg, Variant v) : ls_(d, std::move(init), cfg, v) {}
    void step() override { ls_.step(); }
    const CentersState& state() const override { return ls_.state(); }

private:
    LocalSearch ls_;
};

class NineEpsEngine final : public Engine {
public:
    NineEpsEngine(const Dataset& d, std::vector<Point> init, const NineEpsConfig& cfg, std::uint64_t seed)
        : state_(d, std::move(init)), cfg_(resolve_scale(cfg, d)), rng_(seed) {
        warn_if_clamped(cfg_.p(), state_.k());
    }
    void step() override { nine_eps_step(state_, cfg_, rng_); }
    const CentersState& state() const override { return state_; }

private:
    CentersState state_;
    NineEpsConfig cfg_;
    Rng rng_;
};

/// Seed used by every local search run of one experiment seed, so that
/// variants that coincide (msls-g with p=1 and ssls) behave identically.
inline std::uint64_t ls_seed(std::uint64_t seed) { return Rng::mix(seed ^ 0x5eed5eed5eedULL); }

inline std::unique_ptr<Engine> make_engine(const AlgorithmSpec& a, const Dataset& data, std::vector<Point> init,
                                           std::uint64_t seed, std::size_t steps) {
    if (a.variant == "nine-eps") {
        NineEpsConfig cfg;
        cfg.eps = a.eps;
        cfg.candidateCap = a.candidateCap;
        return std::make_unique<NineEpsEngine>(data, std::move(init), cfg, ls_seed(seed));
    }
    LsConfig cfg;
    cfg.p = a.p;
    cfg.steps = steps;
    cfg.seed = ls_seed(seed);
    cfg.recordTrajectory = false;
    return std::make_unique<SwapEngine>(data, std::move(init), cfg,
                                        a.variant == "msls" ? Variant::Msls : Variant::MslsGreedy);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void fill_relative(ResultTable& t) {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (const auto& r : t.rows)
        if (r.algorithm == "kmpp" && r.phase == "seed") {
            sum += r.cost;
            ++cnt;
        }
    const double base = cnt ? sum / static_cast<double>(cnt) : 0.0;
    for (auto& r : t.rows) r.relativeCost = base > 0.0 ? r.cost / base : 1.0;
    t.meta["kmpp_mean_cost"] = base;
}

inline nlohmann::json base_meta(const ExperimentSpec& spec, const std::string& mode, const Dataset& data) {
    return {{"spec", spec.raw},     {"mode", mode},       {"version", kVersion}, {"rng", Rng::kName},
            {"n", data.size()},     {"d", data.dim()}};
}

struct Seeded {
    std::vector<Point> centers;
    ResultRow row;
};

inline Seeded seed_centers(const ExperimentSpec& spec, const Dataset& data, std::uint64_t seed) {
    Rng rng(seed);
    const auto t0 = std::chrono::steady_clock::now();
    auto centers = kmeanspp_seed(data, spec.k, rng);
    ResultRow r{spec.name, "kmpp", 0, seed, spec.k, "seed", 0, cost(data, centers), 0.0, seconds_since(t0)};
    return {std::move(centers), r};
}

}  // namespace detail

/// KM++ seeding followed by `steps` local search steps of every algorithm,
/// all starting from the same seeding. Records the cost after every step.
inline ResultTable run_trajectory_experiment(const ExperimentSpec& spec) {
    const Dataset data = prepare_dataset(spec);
    ResultTable t;
    t.meta = detail::base_meta(spec, "trajectory", data);
    for (std::uint64_t seed : spec.seeds) {
        auto seeded = detail::seed_centers(spec, data, seed);
        t.rows.push_back(seeded.row);
        for (const auto& alg : spec.algorithms) {
            if (alg.variant == "kmpp") continue;
            auto eng = detail::make_engine(alg, data, seeded.centers, seed, spec.steps);
            const std::string label = alg.label();
            t.rows.push_back({spec.name, label, alg.p, seed, spec.k, "ls", 0, eng->state().total_cost(), 0.0, 0.0});
            for (std::size_t s = 1; s <= spec.steps; ++s) {
                const auto t0 = std::chrono::steady_clock::now();
                eng->step();
                const double secs = detail::seconds_since(t0);
                t.rows.push_back({spec.name, label, alg.p, seed, spec.k, "ls", s, eng->state().total_cost(), 0.0, secs});
            }
        }
    }
    detail::fill_relative(t);
    return t;
}

/// Lloyd postprocessing from KM++ and from every local search result.
/// Index 0 is the starting cost; early convergence repeats the final cost.
inline ResultTable run_lloyd_experiment(const ExperimentSpec& spec) {
    const Dataset data = prepare_dataset(spec);
    ResultTable t;
    t.meta = detail::base_meta(spec, "lloyd", data);
    auto emit_lloyd = [&](const std::string& label, std::size_t p, std::uint64_t seed, std::vector<Point> start) {
        const double c0 = cost(data, start);
        t.rows.push_back({spec.name, label, p, seed, spec.k, "lloyd", 0, c0, 0.0, 0.0});
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = lloyd_iterate(data, std::move(start), spec.lloydIters);
        const double per = res.costs.empty() ? 0.0 : detail::seconds_since(t0) / static_cast<double>(res.costs.size());
        double last = c0;
        for (std::size_t i = 1; i <= spec.lloydIters; ++i) {
            if (i <= res.costs.size()) last = res.costs[i - 1];
            t.rows.push_back({spec.name, label, p, seed, spec.k, "lloyd", i, last, 0.0, per});
        }
    };
    for (std::uint64_t seed : spec.seeds) {
        auto seeded = detail::seed_centers(spec, data, seed);
        t.rows.push_back(seeded.row);
        emit_lloyd("kmpp", 0, seed, seeded.centers);
        for (const auto& alg : spec.algorithms) {
            if (alg.variant == "kmpp") continue;
            auto eng = detail::make_engine(alg, data, seeded.centers, seed, spec.steps);
            for (std::size_t s = 0; s < spec.steps; ++s) eng->step();
            emit_lloyd(alg.label(), alg.p, seed, eng->state().centers());
        }
    }
    detail::fill_relative(t);
    return t;
}

/// Mean wall time of one Lloyd iteration (assignment + update), over at
/// least three timed iterations.
inline double measure_lloyd_iteration(const Dataset& data, std::vector<Point> centers, std::size_t reps = 3) {
    reps = std::max<std::size_t>(reps, 3);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < reps; ++i) {
        const auto a = assign_points(data, centers);
        centers = lloyd_update(data, centers, a);
    }
    return detail::seconds_since(t0) / static_cast<double>(reps);
}

/// Runs every algorithm against wall-clock budgets λ·τ, where τ is the time
/// of one Lloyd iteration on the instance. The step in flight when a
/// deadline passes is completed, and its result counts for that deadline.
inline ResultTable run_deadline_experiment(const ExperimentSpec& spec) {
    if (spec.lambdas.empty()) throw spec_error("lambdas", "deadline mode needs a nonempty list");
    const Dataset data = prepare_dataset(spec);
    ResultTable t;
    t.meta = detail::base_meta(spec, "deadline", data);
    std::vector<std::size_t> lambdas = spec.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    double tau = 0.0;
    constexpr std::size_t kMaxSteps = 1000000;

    for (std::uint64_t seed : spec.seeds) {
        auto seeded = detail::seed_centers(spec, data, seed);
        t.rows.push_back(seeded.row);
        if (tau == 0.0) {
            tau = measure_lloyd_iteration(data, seeded.centers);
            t.meta["tau"] = tau;
        }
        for (std::size_t lam : lambdas)
            t.rows.push_back({spec.name, "kmpp", 0, seed, spec.k, "deadline", lam, seeded.row.cost, 0.0,
                              static_cast<double>(lam) * tau});
        for (const auto& alg : spec.algorithms) {
            if (alg.variant == "kmpp") continue;
            auto eng = detail::make_engine(alg, data, seeded.centers, seed, kMaxSteps);
            const double budget = static_cast<double>(lambdas.back()) * tau;
            std::vector<double> startTimes, costs;  // per step
            const auto t0 = std::chrono::steady_clock::now();
            for (double now = 0.0; now < budget && startTimes.size() < kMaxSteps; now = detail::seconds_since(t0)) {
                startTimes.push_back(now);
                eng->step();
                costs.push_back(eng->state().total_cost());
            }
            const double initial = seeded.row.cost;
            for (std::size_t lam : lambdas) {
                const double deadline = static_cast<double>(lam) * tau;
                double c = initial;
                for (std::size_t i = 0; i < startTimes.size() && startTimes[i] < deadline; ++i) c = costs[i];
                t.rows.push_back({spec.name, alg.label(), alg.p, seed, spec.k, "deadline", lam, c, 0.0, deadline});
            }
        }
    }
    detail::fill_relative(t);
    return t;
}

inline constexpr const char* kResultColumns = "dataset,algorithm,p,seed,k,phase,index,cost,relative_cost,seconds";

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

/// Splits one CSV record, honoring double-quoted fields.
inline std::vector<std::string> split_csv_record(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write '" + path + "'");
    return out;
}

}  // namespace detail

inline nlohmann::json to_json(const ResultRow& r) {
    return {{"dataset", r.dataset}, {"algorithm", r.algorithm}, {"p", r.p},
            {"seed", r.seed},       {"k", r.k},                 {"phase", r.phase},
            {"index", r.index},     {"cost", r.cost},           {"relative_cost", r.relativeCost},
            {"seconds", r.seconds}};
}

inline ResultRow row_from_json(const nlohmann::json& j) {
    return {j.at("dataset").get<std::string>(), j.at("algorithm").get<std::string>(), j.at("p").get<std::size_t>(),
            j.at("seed").get<std::uint64_t>(),  j.at("k").get<std::size_t>(),         j.at("phase").get<std::string>(),
            j.at("index").get<std::size_t>(),   j.at("cost").get<double>(),           j.at("relative_cost").get<double>(),
            j.at("seconds").get<double>()};
}

inline void write_results_csv(std::ostream& out, const ResultTable& t) {
    out << kResultColumns << '\n';
    for (const auto& r : t.rows)
        out << detail::csv_field(r.dataset) << ',' << detail::csv_field(r.algorithm) << ',' << r.p << ',' << r.seed
            << ',' << r.k << ',' << r.phase << ',' << r.index << ',' << format_double(r.cost) << ','
            << format_double(r.relativeCost) << ',' << format_double(r.seconds) << '\n';
}

inline void write_summary_csv(std::ostream& out, const ResultTable& t) {
    out << "dataset,algorithm,p,k,phase,index,count,cost_mean,cost_std,relative_cost_mean,relative_cost_std,"
           "seconds_mean\n";
    for (const auto& s : summarize(t))
        out << detail::csv_field(s.dataset) << ',' << detail::csv_field(s.algorithm) << ',' << s.p << ',' << s.k << ','
            << s.phase << ',' << s.index << ',' << s.count << ',' << format_double(s.costMean) << ','
            << format_double(s.costStd) << ',' << format_double(s.relativeMean) << ','
            << format_double(s.relativeStd) << ',' << format_double(s.secondsMean) << '\n';
}

inline nlohmann::json results_to_json(const ResultTable& t) {
    nlohmann::json records = nlohmann::json::array(), summary = nlohmann::json::array();
    for (const auto& r : t.rows) records.push_back(to_json(r));
    for (const auto& s : summarize(t))
        summary.push_back({{"dataset", s.dataset},
                           {"algorithm", s.algorithm},
                           {"p", s.p},
                           {"k", s.k},
                           {"phase", s.phase},
                           {"index", s.index},
                           {"count", s.count},
                           {"cost_mean", s.costMean},
                           {"cost_std", s.costStd},
                           {"relative_cost_mean", s.relativeMean},
                           {"relative_cost_std", s.relativeStd},
                           {"seconds_mean", s.secondsMean}});
    return {{"meta", t.meta}, {"records", records}, {"summary", summary}};
}

enum class ResultFormat { Csv, Json };

/// CSV: raw rows at `path`, per-cell mean/std at `<path>.summary.csv`.
/// JSON: one document with meta, records and summary.
inline void export_results(const ResultTable& t, const std::string& path, ResultFormat fmt) {
    if (fmt == ResultFormat::Json) {
        auto out = detail::open_out(path);
        out << results_to_json(t).dump(2) << '\n';
        if (!out) throw io_error("failed writing '" + path + "'");
        return;
    }
    {
        auto out = detail::open_out(path);
        write_results_csv(out, t);
        if (!out) throw io_error("failed writing '" + path + "'");
    }
    auto sum = detail::open_out(path + ".summary.csv");
    write_summary_csv(sum, t);
}

inline std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != kResultColumns) throw parse_error("missing results header", 1, 1);
    std::vector<ResultRow> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv_record(line);
        if (f.size() != 10) throw parse_error("expected 10 fields", lineNo, f.size());
        auto num = [&](std::size_t col) {
            double v;
            if (!detail::parse_double(f[col], v)) throw parse_error("bad number", lineNo, col + 1);
            return v;
        };
        auto integer = [&](std::size_t col) {
            std::uint64_t v = 0;
            auto [ptr, ec] = std::from_chars(f[col].data(), f[col].data() + f[col].size(), v);
            if (ec != std::errc() || ptr != f[col].data() + f[col].size()) throw parse_error("bad integer", lineNo, col + 1);
            return v;
        };
        rows.push_back({f[0], f[1], static_cast<std::size_t>(integer(2)), integer(3), static_cast<std::size_t>(integer(4)),
                        f[5], static_cast<std::size_t>(integer(6)), num(7), num(8), num(9)});
    }
    return rows;
}

inline ResultTable read_results_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    ResultTable t;
    t.meta = j.at("meta");
    for (const auto& r : j.at("records")) t.rows.push_back(row_from_json(r));
    return t;
}

}  // namespace msls
