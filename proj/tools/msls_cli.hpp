#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "msls/msls.hpp"

namespace msls::cli {

struct ClusterOptions {
    std::string input;
    std::size_t k = 0;
    std::string algo = "msls-g";
    std::size_t p = 1;
    std::optional<std::size_t> steps;
    std::uint64_t seed = 0;
    bool scale = true;
    std::string out;
    std::string summary;
    char delimiter = ',';
    bool header = false;
    double eps = 0.5;
    std::size_t cap = 100000;
    unsigned threads = 1;
};

struct ExperimentOptions {
    std::string spec;
    std::string mode;
    std::string out;
    std::string format;
};

struct BoundOptions {
    std::string p;
    std::string variant = "msls";
};

inline unsigned default_threads() {
    if (const char* env = std::getenv("MSLS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw io_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw io_error("failed writing '" + path + "'");
}

inline int cmd_cluster(const ClusterOptions& o, std::ostream& out, std::ostream& err) {
    Dataset data = load_csv(o.input, o.delimiter, o.header);
    if (o.scale) data = minmax_scale(data);
    if (o.k == 0 || o.k > data.size()) {
        err << "error: --k must lie in [1, " << data.size() << "]\n";
        return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Rng seedRng(o.seed);
    auto centers = kmeanspp_seed(data, o.k, seedRng);
    const double initial = cost(data, centers);
    const std::size_t steps = o.steps.value_or(default_step_budget(o.k));
    std::size_t taken = 0, accepted = 0, p = o.p;
    const std::uint64_t lsSeed = Rng::mix(o.seed ^ 0x5eed5eed5eedULL);

    if (o.algo == "ssls" || o.algo == "msls" || o.algo == "msls-g") {
        LsConfig cfg;
        cfg.p = o.algo == "ssls" ? 1 : o.p;
        p = cfg.p;
        cfg.steps = steps;
        cfg.seed = lsSeed;
        cfg.threads = o.threads;
        cfg.recordTrajectory = false;
        LocalSearch ls(data, std::move(centers), cfg, o.algo == "msls" ? Variant::Msls : Variant::MslsGreedy);
        for (std::size_t s = 0; s < steps; ++s) ls.step();
        taken = ls.steps_taken();
        accepted = ls.steps_accepted();
        centers = ls.state().centers();
    } else if (o.algo == "nine-eps") {
        NineEpsConfig cfg;
        cfg.eps = o.eps;
        cfg.candidateCap = o.cap;
        p = cfg.p();
        auto [state, traj] = run_nine_eps(data, std::move(centers), cfg, steps, lsSeed);
        taken = steps;
        for (const auto& r : traj) accepted += r.accepted ? 1 : 0;
        centers = state.centers();
    } else if (o.algo != "kmpp") {
        err << "error: unknown --algo '" << o.algo << "'\n";
        return 2;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream csv;
    write_points_csv(csv, centers);
    const nlohmann::json summary = {{"algorithm", o.algo},
                                    {"k", o.k},
                                    {"p", p},
                                    {"seed", o.seed},
                                    {"n", data.size()},
                                    {"d", data.dim()},
                                    {"initial_cost", initial},
                                    {"final_cost", cost(data, centers)},
                                    {"steps", taken},
                                    {"steps_accepted", accepted},
                                    {"seconds", secs},
                                    {"version", kVersion}};
    if (o.out.empty()) {
        out << csv.str();
        err << summary.dump() << '\n';
    } else {
        write_text(o.out, csv.str());
        write_text(o.summary.empty() ? o.out + ".summary.json" : o.summary, summary.dump(2) + "\n");
    }
    return 0;
}

inline int cmd_experiment(const ExperimentOptions& o, std::ostream& out, std::ostream& err) {
    ExperimentSpec spec;
    try {
        spec = load_experiment_spec(o.spec);
    } catch (const spec_error& e) {
        err << "error: invalid spec: " << e.what() << '\n';
        return 2;
    }
    ResultTable table;
    try {
        if (o.mode == "trajectory")
            table = run_trajectory_experiment(spec);
        else if (o.mode == "lloyd")
            table = run_lloyd_experiment(spec);
        else
            table = run_deadline_experiment(spec);
    } catch (const spec_error& e) {
        err << "error: invalid spec: " << e.what() << '\n';
        return 2;
    }
    const bool json = o.format == "json" || (o.format.empty() && o.out.size() >= 5 && o.out.ends_with(".json"));
    if (o.out.empty()) {
        if (json)
            out << results_to_json(table).dump(2) << '\n';
        else
            write_results_csv(out, table);
    } else {
        export_results(table, o.out, json ? ResultFormat::Json : ResultFormat::Csv);
    }
    return 0;
}

inline int cmd_bound(const BoundOptions& o, std::ostream& out, std::ostream& err) {
    double p;
    if (o.p == "inf" || o.p == "infinity") {
        p = std::numeric_limits<double>::infinity();
    } else {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(o.p, &used);
            if (used != o.p.size() || v < 1) throw std::invalid_argument("p");
            p = static_cast<double>(v);
        } catch (const std::exception&) {
            err << "error: --p must be an integer >= 1 or 'inf'\n";
            return 2;
        }
    }
    const double v = o.variant == "kanungo" ? kanungo_bound(p) : eta_bound(p);
    out << std::fixed << std::setprecision(6) << v << '\n';
    return 0;
}

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 IO/parse failure, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-swap k-means++ local search"};
    app.name("msls");
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");

    ClusterOptions co;
    co.threads = default_threads();
    auto* cluster = app.add_subcommand("cluster", "Cluster a CSV dataset");
    cluster->add_option("--input", co.input, "Input CSV")->required();
    cluster->add_option("--k", co.k, "Number of centers")->required();
    cluster->add_option("--algo", co.algo, "Algorithm")
        ->check(CLI::IsMember({"kmpp", "ssls", "msls", "msls-g", "nine-eps"}));
    cluster->add_option("--p", co.p, "Swap size")->check(CLI::PositiveNumber);
    cluster->add_option("--steps", co.steps, "Local search steps (default: 2·k·ln ln k)");
    cluster->add_option("--seed", co.seed, "RNG seed");
    cluster->add_option("--scale", co.scale, "Apply min-max scaling (true/false)");
    cluster->add_option("--out", co.out, "Centers CSV output (stdout when absent)");
    cluster->add_option("--summary", co.summary, "Summary JSON output (default: <out>.summary.json)");
    cluster->add_option("--delimiter", co.delimiter, "CSV delimiter");
    cluster->add_flag("--header", co.header, "Skip the first CSV row");
    cluster->add_option("--eps", co.eps, "nine-eps accuracy parameter")->check(CLI::Range(0.0, 1.0));
    cluster->add_option("--cap", co.cap, "nine-eps candidate In-sets per step")->check(CLI::PositiveNumber);
    cluster->add_option("--threads", co.threads, "Worker threads for msls (env MSLS_THREADS)")->check(CLI::PositiveNumber);

    ExperimentOptions eo;
    auto* experiment = app.add_subcommand("experiment", "Run a benchmark experiment");
    experiment->add_option("--spec", eo.spec, "Experiment spec (JSON)")->required();
    experiment->add_option("--mode", eo.mode, "trajectory | lloyd | deadline")
        ->required()
        ->check(CLI::IsMember({"trajectory", "lloyd", "deadline"}));
    experiment->add_option("--out", eo.out, "Result file (stdout when absent)");
    experiment->add_option("--format", eo.format, "csv | json (default: from --out extension)")
        ->check(CLI::IsMember({"csv", "json"}));

    BoundOptions bo;
    auto* bound = app.add_subcommand("bound", "Print the approximation bound for swap size p");
    bound->add_option("--p", bo.p, "Swap size (integer >= 1 or 'inf')")->required();
    bound->add_option("--variant", bo.variant, "msls | kanungo")->check(CLI::IsMember({"msls", "kanungo"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (cluster->parsed()) return cmd_cluster(co, out, err);
        if (experiment->parsed()) return cmd_experiment(eo, out, err);
        return cmd_bound(bo, out, err);
    } catch (const contract_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace msls::cli
