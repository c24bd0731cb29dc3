// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msls/msls.hpp"
#include "msls_cli.hpp"
#include "oracles.hpp"

using namespace msls;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Monotonicity ledger shared by every criterion that produces a trajectory.
struct MonotoneLedger {
    static constexpr double kSlack = 1e-9;
    std::size_t series = 0, points = 0, violations = 0;

    void add(const std::vector<double>& costs) {
        ++series;
        points += costs.size();
        for (std::size_t i = 1; i < costs.size(); ++i)
            if (costs[i] > costs[i - 1] * (1 + kSlack)) ++violations;
    }
    void add(const Trajectory& t) {
        std::vector<double> c;
        for (const auto& r : t) c.push_back(r.totalCost);
        add(c);
    }
    void add_lloyd(double start, const LloydResult& r) {
        std::vector<double> c{start};
        c.insert(c.end(), r.costs.begin(), r.costs.end());
        add(c);
    }
};

MonotoneLedger ledger;

Dataset from_oracle(const std::vector<oracle::Pt>& pts) { return Dataset::from_points(pts); }

// 1. exhaustive swap selection against brute force over every Out
Outcome oracle_swap_selection() {
    constexpr double kRel = 1e-9;
    std::mt19937_64 g(2024);
    int ok = 0, accepted = 0;
    std::string firstBad;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 8 + g() % 23, d = 1 + g() % 4, k = 1 + g() % 5, p = 1 + g() % 2;
        const auto pts = oracle::random_points(g, n, d, 0.0, 10.0);
        const auto data = from_oracle(pts);
        Rng seedRng(g());
        CentersState state(data, kmeanspp_seed(data, k, seedRng));
        LsConfig cfg;
        cfg.p = p;
        Rng rng(g());

        // the same In the step will draw
        Rng probe = rng;
        const std::size_t pe = effective_swap_size(p, k);
        const auto in = gather_points(data, d2_sample(state, probe, pe));

        const auto all = oracle::all_swaps(pts, state.centers(), in);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : all) best = std::min(best, s.cost);
        const double oldCost = oracle::cost(pts, state.centers());

        const auto prop = best_multi_swap(state, in);
        bool good = oracle::rel_close(prop.newCost, best, kRel) &&
                    oracle::rel_close(prop.delta, best - oldCost, kRel, 1e-9 * oldCost + 1e-12);
        // the chosen Out must be one of the optimal ones
        bool outOptimal = false;
        for (const auto& s : all)
            if (s.out == prop.outSet) outOptimal = oracle::rel_close(s.cost, best, kRel);
        good = good && outOptimal;

        CentersState stepped = state;
        const auto res = msls_step(stepped, cfg, rng);
        if (res) {
            ++accepted;
            good = good && res->outSet == prop.outSet &&
                   oracle::rel_close(oracle::cost(pts, stepped.centers()), best, kRel);
        } else {
            good = good && !(best < oldCost * (1 - kStrictImprovementTol));
        }
        if (good)
            ++ok;
        else if (firstBad.empty())
            firstBad = fmt(" first mismatch at instance %d", inst);
    }
    return {ok == 50, fmt("%d/50 instances match (%d steps accepted), rel tol %.0e", ok, accepted, kRel) + firstBad};
}

// 2. incremental bookkeeping under 200 applied swaps
Outcome incremental_bookkeeping() {
    constexpr double kRel = 1e-9;
    std::mt19937_64 g(77);
    const auto pts = oracle::random_points(g, 2000, 5, -50.0, 50.0);
    const auto data = from_oracle(pts);
    Rng rng(5);
    CentersState state(data, kmeanspp_seed(data, 20, rng));
    double worst = 0;
    for (int s = 0; s < 200; ++s) {
        const std::size_t m = 1 + g() % 3;
        std::vector<std::size_t> slots;
        while (slots.size() < m) {
            const std::size_t c = g() % 20;
            if (std::find(slots.begin(), slots.end(), c) == slots.end()) slots.push_back(c);
        }
        std::vector<Point> in;
        for (std::size_t i = 0; i < m; ++i) in.push_back(data.point(g() % 2000));
        state.replace_centers(slots, in);
        const double truth = oracle::cost(pts, state.centers());
        worst = std::max(worst, std::abs(state.total_cost() - truth) / truth);
    }
    return {worst <= kRel, fmt("max relative drift %.2e over 200 swaps (tol %.0e)", worst, kRel)};
}

// 3. cost(Q,{p}) = cost(Q,{mu(Q)}) + |Q| * ||p - mu(Q)||^2
Outcome mean_shift_identity() {
    constexpr double kRel = 1e-9;
    std::mt19937_64 g(3);
    int ok = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t q = 1 + g() % 20, d = 1 + g() % 5;
        const auto pts = oracle::random_points(g, q, d, -5.0, 5.0);
        const auto p = oracle::random_points(g, 1, d, -10.0, 10.0)[0];
        const auto data = from_oracle(pts);
        const Point mu = centroid(data);
        const double lhs = cost(data, std::vector<Point>{p});
        const double rhs = cost(data, std::vector<Point>{mu}) + static_cast<double>(q) * sq_dist(p, mu);
        ok += oracle::rel_close(lhs, rhs, kRel);
    }
    return {ok == 1000, fmt("%d/1000 checks within rel %.0e", ok, kRel)};
}

// 4. a uniform sample of m = 1/(eps*delta) points gives a (1+eps)-approximate 1-mean w.p. >= 1-delta
Outcome sample_mean_frequency() {
    constexpr double kEps = 0.2, kDelta = 0.2, kSlack = 0.05;
    constexpr std::size_t kM = 25, kTrials = 2000;
    Rng rng(8);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
        const std::size_t n = 50 + rng.below(451), d = 1 + rng.below(5);
        std::vector<double> coords(n * d);
        const bool gaussian = t % 2 == 0;
        for (double& v : coords) v = gaussian ? rng.normal() : rng.uniform();
        if (t % 4 == 1)  // skewed: a small far group
            for (std::size_t x = 0; x < n / 10; ++x) coords[x * d] += 5.0;
        const Dataset pts(d, coords);
        const double best = cost(pts, std::vector<Point>{centroid(pts)});
        std::vector<std::size_t> s(kM);
        for (auto& i : s) i = static_cast<std::size_t>(rng.below(n));
        hits += cost(pts, std::vector<Point>{centroid(pts, s)}) <= (1 + kEps) * best;
    }
    const double freq = static_cast<double>(hits) / kTrials;
    return {freq >= 1 - kDelta - kSlack, fmt("frequency %.4f (need >= %.2f)", freq, 1 - kDelta - kSlack)};
}

// 5. bound values printed by the CLI
Outcome bound_values() {
    auto call = [](std::vector<const char*> args) {
        std::ostringstream out, err;
        args.insert(args.begin(), "msls");
        const int code = cli::run(static_cast<int>(args.size()), args.data(), out, err);
        return std::pair{code, out.str()};
    };
    const auto kan = call({"bound", "--p", "inf", "--variant", "kanungo"});
    const auto inf = call({"bound", "--p", "inf", "--variant", "msls"});
    const auto one = call({"bound", "--p", "1", "--variant", "msls"});
    const auto zero = call({"bound", "--p", "0"});
    constexpr double kTol = 1e-5;
    const bool pass = kan.first == 0 && kan.second == "9.000000\n" && inf.first == 0 &&
                      std::abs(std::stod(inf.second) - 10.472136) <= kTol && one.first == 0 &&
                      std::abs(std::stod(one.second) - 26.649111) <= kTol && zero.first == 2;
    auto strip = [](std::string s) { return s.empty() ? s : s.substr(0, s.size() - 1); };
    return {pass, "kanungo(inf)=" + strip(kan.second) + " msls(inf)=" + strip(inf.second) + " msls(1)=" +
                      strip(one.second) + fmt(" p=0 exit %d", zero.first)};
}

Dataset planted_25(std::uint64_t seed) {
    MixtureSpec ms;
    ms.n = 10000;
    ms.dim = 20;
    ms.components = 25;
    ms.sigma = 0.1;
    Rng rng(seed);
    return minmax_scale(make_gaussian_mixture(ms, rng).data);
}

// 6. MSLS-G(4) vs SSLS vs KM++ on a planted mixture
Outcome planted_reproduction() {
    const auto data = planted_25(1);
    std::vector<double> km, ss, mg;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const auto init = kmeanspp_seed(data, 25, rng);
        km.push_back(cost(data, init));
        LsConfig cfg;
        cfg.steps = 50;
        cfg.seed = Rng::mix(seed);
        cfg.p = 1;
        const auto [s1, t1] = run_local_search(data, init, cfg, Variant::MslsGreedy);
        cfg.p = 4;
        const auto [s4, t4] = run_local_search(data, init, cfg, Variant::MslsGreedy);
        ledger.add(t1);
        ledger.add(t4);
        ss.push_back(s1.total_cost());
        mg.push_back(s4.total_cost());
    }
    const double k = mean(km), s = mean(ss), m = mean(mg);
    const bool pass = m <= 0.97 * s && m <= 0.85 * k && s <= 0.85 * k;
    return {pass, fmt("KM++ %.2f, SSLS %.2f (%.3f), MSLS-G(4) %.2f (%.3f of SSLS, %.3f of KM++)", k, s, s / k, m,
                      m / s, m / k)};
}

// 7. exhaustive and greedy removal give comparable costs
Outcome msls_vs_greedy() {
    MixtureSpec ms;
    ms.n = 10000;
    ms.dim = 20;
    ms.components = 25;
    ms.sigma = 0.1;
    Rng gen(2);
    const auto full = make_gaussian_mixture(ms, gen).data;
    Rng sub(3);
    const auto data = minmax_scale(subsample(full, 0.05, sub));
    std::vector<double> ex, gr;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed);
        const auto init = kmeanspp_seed(data, 10, rng);
        LsConfig cfg;
        cfg.steps = 50;
        cfg.p = 3;
        cfg.seed = Rng::mix(seed);
        const auto [a, ta] = run_local_search(data, init, cfg, Variant::Msls);
        const auto [b, tb] = run_local_search(data, init, cfg, Variant::MslsGreedy);
        ledger.add(ta);
        ledger.add(tb);
        ex.push_back(a.total_cost());
        gr.push_back(b.total_cost());
    }
    const double rel = std::abs(mean(ex) - mean(gr)) / mean(ex);
    return {rel <= 0.05, fmt("n=%zu, MSLS %.3f, MSLS-G %.3f, relative gap %.4f (tol 0.05)", data.size(), mean(ex),
                             mean(gr), rel)};
}

// 9. APX-centers local search on a planted 4-component mixture
Outcome nine_eps_desk() {
    constexpr std::size_t kCap = 2000;
    std::size_t within95 = 0, within2 = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        MixtureSpec ms;
        ms.n = 400;
        ms.dim = 2;
        ms.components = 4;
        Rng rng(seed);
        const auto mix = make_gaussian_mixture(ms, rng);
        const auto planted = lloyd_iterate(mix.data, mix.means, 100);
        const double opt = std::min(cost(mix.data, mix.means), planted.costs.empty() ? cost(mix.data, mix.means)
                                                                                      : planted.costs.back());
        ledger.add_lloyd(cost(mix.data, mix.means), planted);
        NineEpsConfig cfg;
        cfg.eps = 0.5;
        cfg.candidateCap = kCap;
        const auto init = kmeanspp_seed(mix.data, 4, rng);
        const auto [state, traj] = run_nine_eps(mix.data, init, cfg, 200, Rng::mix(seed));
        ledger.add(traj);
        const double ratio = state.total_cost() / opt;
        worst = std::max(worst, ratio);
        within95 += ratio <= 9.5;
        within2 += ratio <= 2.0;
    }
    return {within95 == 10 && within2 >= 8,
            fmt("<=9.5x on %zu/10, <=2x on %zu/10, worst ratio %.3f (cap %zu)", within95, within2, worst, kCap)};
}

// 10. tiny instances against the exhaustive optimum. The detail also reports
// the best solution whose centers are input points, which bounds what any
// search over input points can reach.
Outcome tiny_optimum() {
    std::mt19937_64 g(10);
    int ok = 0, discreteOver = 0, reachedDiscrete = 0;
    double worst = 0;
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 5 + g() % 6, d = 1 + g() % 3, k = 2 + g() % 2;
        const auto pts = oracle::random_points(g, n, d);
        const double opt = oracle::optimal_cost(pts, k);
        const double discrete = oracle::optimal_discrete_cost(pts, k);
        discreteOver += discrete > 1.2 * opt;
        const auto data = from_oracle(pts);
        Rng rng(g());
        LsConfig cfg;
        cfg.p = 2;
        cfg.steps = 100;
        cfg.seed = g();
        const auto [state, traj] = run_local_search(data, kmeanspp_seed(data, k, rng), cfg, Variant::Msls);
        ledger.add(traj);
        const double ratio = opt > 0 ? state.total_cost() / opt : (state.total_cost() == 0 ? 1.0 : INFINITY);
        worst = std::max(worst, ratio);
        ok += ratio <= 1.2;
        reachedDiscrete += oracle::rel_close(state.total_cost(), discrete, 1e-9);
    }
    return {ok >= 18, fmt("%d/20 within 1.2x OPT, worst ratio %.4f; best input-point centers exceed 1.2x OPT on "
                          "%d/20; local search reached that input-point optimum on %d/20",
                          ok, worst, discreteOver, reachedDiscrete)};
}

// 8. every trajectory produced above, plus Lloyd from local search results
Outcome monotonicity() {
    const auto data = planted_25(4);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Rng rng(seed);
        const auto init = kmeanspp_seed(data, 25, rng);
        ledger.add_lloyd(cost(data, init), lloyd_iterate(data, init, 10));
        LsConfig cfg;
        cfg.steps = 15;
        cfg.p = 4;
        cfg.seed = seed;
        const auto [s, t] = run_local_search(data, init, cfg, Variant::MslsGreedy);
        ledger.add(t);
        ledger.add_lloyd(s.total_cost(), lloyd_iterate(data, s.centers(), 10));
        cfg.acceptRule = AcceptRule::Factor;
        ledger.add(run_local_search(data, init, cfg, Variant::MslsGreedy).second);
    }
    return {ledger.violations == 0, fmt("%zu violations in %zu series (%zu points)", ledger.violations,
                                        ledger.series, ledger.points)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    // monotonicity runs last: it audits trajectories from the other criteria
    const std::vector<Criterion> criteria{
        {1, "swap selection matches brute force", oracle_swap_selection},
        {2, "incremental bookkeeping", incremental_bookkeeping},
        {3, "mean shift identity", mean_shift_identity},
        {4, "sample mean approximation frequency", sample_mean_frequency},
        {5, "bound values", bound_values},
        {6, "planted mixture ordering", planted_reproduction},
        {7, "exhaustive vs greedy comparability", msls_vs_greedy},
        {9, "APX-centers desk test", nine_eps_desk},
        {10, "tiny instances near optimum", tiny_optimum},
        {8, "monotonicity", monotonicity},
    };
    std::map<int, std::string> lines;
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = c.run();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        lines[c.id] = fmt("%s [%d] %s: ", o.pass ? "PASS" : "FAIL", c.id, c.name) + o.detail + fmt(" (%.1fs)", secs);
        std::cerr << lines[c.id] << '\n';
    }
    for (const auto& [id, line] : lines) std::cout << line << '\n';
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing of " << lines.size() << '\n';
    return failures ? 1 : 0;
}
