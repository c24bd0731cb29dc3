#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "msls_cli.hpp"

using namespace msls;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "msls");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("msls_cli_" + name)).string();
}

std::string write_dataset() {
    const auto path = temp_path("data.csv");
    Rng rng(21);
    MixtureSpec spec;
    spec.n = 300;
    spec.dim = 3;
    spec.components = 5;
    std::ofstream f(path);
    const auto m = make_gaussian_mixture(spec, rng);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < m.data.size(); ++i) pts.push_back(m.data.point(i));
    write_points_csv(f, pts);
    return path;
}

std::string write_spec(const nlohmann::json& j) {
    const auto path = temp_path("spec.json");
    std::ofstream(path) << j.dump();
    return path;
}

nlohmann::json small_spec() {
    return {{"dataset", {{"synthetic", {{"n", 200}, {"d", 2}, {"components", 3}}}}},
            {"k", 3},
            {"steps", 3},
            {"lloyd_iters", 2},
            {"seeds", {1, 2}},
            {"lambdas", {1, 2}},
            {"algorithms", {{{"variant", "msls-g"}, {"p", 2}}}}};
}

}  // namespace

TEST_CASE("bound prints the documented values", "[cli]") {
    CHECK(run_cli({"bound", "--p", "inf", "--variant", "msls"}).out == "10.472136\n");
    CHECK(run_cli({"bound", "--p", "inf", "--variant", "kanungo"}).out == "9.000000\n");
    CHECK(run_cli({"bound", "--p", "1"}).out == "26.649111\n");
    CHECK(run_cli({"bound", "--p", "0"}).code == 2);
    CHECK(run_cli({"bound", "--p", "abc"}).code == 2);
    CHECK(run_cli({"bound", "--p", "1", "--variant", "other"}).code == 2);
}

TEST_CASE("usage errors exit 2 with help", "[cli]") {
    const auto none = run_cli({});
    CHECK(none.code == 2);
    CHECK(none.err.find("cluster") != std::string::npos);
    CHECK(run_cli({"cluster", "--k", "3"}).code == 2);
    CHECK(run_cli({"cluster", "--input", "x.csv", "--k", "3", "--algo", "bogus"}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
}

TEST_CASE("cluster: io and parse failures exit 1", "[cli]") {
    CHECK(run_cli({"cluster", "--input", "/nonexistent.csv", "--k", "2"}).code == 1);
    const auto bad = temp_path("bad.csv");
    std::ofstream(bad) << "1,2\n3,x\n";
    const auto r = run_cli({"cluster", "--input", bad, "--k", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("row 2, column 2") != std::string::npos);
}

TEST_CASE("cluster: kmpp with k=1 returns an input point", "[cli]") {
    const auto data = write_dataset();
    const auto r = run_cli({"cluster", "--input", data, "--k", "1", "--algo", "kmpp", "--scale", "false"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    const auto centers = parse_csv(in);
    REQUIRE(centers.size() == 1);
    const auto d = load_csv(data);
    bool found = false;
    for (std::size_t i = 0; i < d.size(); ++i) found = found || d.point(i) == centers.point(0);
    CHECK(found);
    const auto summary = nlohmann::json::parse(r.err);
    CHECK(std::isfinite(summary["final_cost"].get<double>()));
}

TEST_CASE("cluster: equivalences between algorithms", "[cli]") {
    const auto data = write_dataset();
    auto centers = [&](std::vector<std::string> extra) {
        std::vector<std::string> args{"cluster", "--input", data, "--k", "5", "--seed", "9"};
        args.insert(args.end(), extra.begin(), extra.end());
        const auto r = run_cli(args);
        REQUIRE(r.code == 0);
        return r.out;
    };
    CHECK(centers({"--algo", "msls-g", "--p", "1", "--steps", "20"}) == centers({"--algo", "ssls", "--steps", "20"}));
    CHECK(centers({"--algo", "msls", "--steps", "0"}) == centers({"--algo", "kmpp"}));
    CHECK(centers({"--algo", "msls", "--p", "2", "--steps", "5"}) ==
          centers({"--algo", "msls", "--p", "2", "--steps", "5"}));
}

TEST_CASE("cluster: --out writes centers and summary files", "[cli]") {
    const auto data = write_dataset();
    const auto out = temp_path("centers.csv");
    const auto r = run_cli({"cluster", "--input", data, "--k", "4", "--algo", "msls-g", "--p", "2", "--steps", "5",
                            "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(load_csv(out).size() == 4);
    std::ifstream sf(out + ".summary.json");
    const auto summary = nlohmann::json::parse(sf);
    CHECK(summary["steps"] == 5);
    CHECK(summary["final_cost"].get<double>() <= summary["initial_cost"].get<double>());
    std::filesystem::remove(out);
    std::filesystem::remove(out + ".summary.json");
}

TEST_CASE("cluster: config file supplies defaults", "[cli]") {
    const auto data = write_dataset();
    const auto cfg = temp_path("cfg.toml");
    std::ofstream(cfg) << "[cluster]\nk = 2\nalgo = \"kmpp\"\n";
    const auto r = run_cli({"--config", cfg, "cluster", "--input", data});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    CHECK(parse_csv(in).size() == 2);
}

TEST_CASE("experiment: spec echo, seeds and formats", "[cli]") {
    const auto spec = small_spec();
    const auto path = write_spec(spec);
    const auto r = run_cli({"experiment", "--spec", path, "--mode", "trajectory", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["meta"]["spec"] == spec);
    std::set<std::uint64_t> seeds;
    for (const auto& rec : doc["records"]) seeds.insert(rec["seed"].get<std::uint64_t>());
    CHECK(seeds == std::set<std::uint64_t>{1, 2});

    const auto csv = run_cli({"experiment", "--spec", path, "--mode", "lloyd"});
    REQUIRE(csv.code == 0);
    CHECK(csv.out.rfind(kResultColumns, 0) == 0);

    const auto out = temp_path("res.json");
    REQUIRE(run_cli({"experiment", "--spec", path, "--mode", "deadline", "--out", out}).code == 0);
    CHECK(read_results_json(out).meta.contains("tau"));
    std::filesystem::remove(out);
}

TEST_CASE("experiment: invalid input exits 2", "[cli]") {
    auto spec = small_spec();
    const auto path = write_spec(spec);
    CHECK(run_cli({"experiment", "--spec", path, "--mode", "sideways"}).code == 2);
    spec["k"] = 0;
    const auto bad = write_spec(spec);
    const auto r = run_cli({"experiment", "--spec", bad, "--mode", "trajectory"});
    CHECK(r.code == 2);
    CHECK(r.err.find("k:") != std::string::npos);
    const auto junk = temp_path("junk.json");
    std::ofstream(junk) << "{not json";
    CHECK(run_cli({"experiment", "--spec", junk, "--mode", "trajectory"}).code == 2);
    CHECK(run_cli({"experiment", "--spec", "/nonexistent.json", "--mode", "trajectory"}).code == 1);
}
