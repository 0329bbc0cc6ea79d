#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "tubelab/experiment.hpp"
#include "tubelab/plot.hpp"

using namespace tubelab;
namespace fs = std::filesystem;

namespace {

Config parse(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tubelab_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable table(const fs::path& p) {
    std::ifstream in(p);
    return read_csv(in);
}

ExperimentConfig config(const std::string& text, const fs::path& out) {
    auto cfg = parse(text);
    cfg.set("experiment", "out", out.string());
    return ExperimentConfig::from_config(cfg);
}

}  // namespace

TEST_CASE("config validation names the offending key") {
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\ndeltas = 4\n")), ConfigError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = volume\ndeltas = 4\n")),
                         "unknown kind 'volume'", ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = nikodym\n")), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = nikodym\ndeltas = 6, 5\n")), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = nikodym\ndeltas = 5\np = 0.5\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = nikodym\ndeltas = 5\ncolour = red\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = incidence\ndeltas = 5\nr = \n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = domain\ndeltas = 8\neta = 0\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = dims\n[moran]\npreset = koch\n")),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = dims\nsource = cantor\n")), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_config(parse("[experiment]\nkind = dims\n[extra]\nx = 1\n")), ConfigError);
}

TEST_CASE("delta lists and resolved defaults") {
    auto c = ExperimentConfig::from_config(parse("[experiment]\nkind = domain\ndeltas = 8..24:4\n"));
    CHECK(c.delta_exps == std::vector<int>{8, 12, 16, 20, 24});
    CHECK(c.moran.name == "middle-thirds");
    CHECK(c.resolved.get("experiment", "deltas") == "8, 12, 16, 20, 24");
    auto k = ExperimentConfig::from_config(parse("[experiment]\nkind = kakeya\ndeltas = 6, 8\n"));
    CHECK(k.p.size() == 1);
    CHECK(k.p[0] == doctest::Approx(1 + std::log(2.0) / std::log(3.0)));
    CHECK(k.function == "disc");
    // The resolved text parses back to the same configuration.
    const auto again = ExperimentConfig::from_config(parse(k.resolved.canonical()));
    CHECK(again.hash() == k.hash());
    CHECK(again.p == k.p);
}

TEST_CASE("dims of the middle-thirds set: box ratio constant at log2/log3") {
    const auto out = scratch("dims");
    const auto art = run_experiment(config("[experiment]\nkind = dims\ndepth = 16\n[moran]\npreset = middle-thirds\n", out));
    REQUIRE(art.ok);
    const auto t = table(out / "dims.csv");
    REQUIRE(t.rows.size() == 16);
    const auto col = t.column("box_dim_ratio");
    for (const auto& row : t.rows) CHECK(std::stod(row[col]) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-11));
    // Every row carries the parameter tuple.
    for (const auto& row : t.rows) {
        CHECK(row[t.column("kind")] == "dims");
        CHECK(row[t.column("spec")] == "middle-thirds");
        CHECK(row[t.column("gamma")] == "0.25");
    }
    CHECK(fs::exists(out / "dims.svg"));
    CHECK(slurp(out / "status.csv").find("\nok,dims,") != std::string::npos);
}

TEST_CASE("sharp incidence example at delta = 2^-10: ratio column at least 1/64") {
    const auto out = scratch("incidence");
    const auto art = run_experiment(
        config("[experiment]\nkind = incidence\nsource = sharp-example\ns = 0.5\ndeltas = 10\nr = 1, 2, 4, 8, 16, 32\n", out));
    REQUIRE(art.ok);
    const auto t = table(out / "incidence.csv");
    REQUIRE(t.rows.size() == 6);
    for (const auto& row : t.rows) {
        CHECK(std::stod(row[t.column("ratio")]) >= 1.0 / 64);
        CHECK(std::stod(row[t.column("lower_ratio")]) >= 1.0 / 64);
        CHECK(row[t.column("delta")] == "0.0009765625");
    }
}

TEST_CASE("theorem-b domain: plot annotation near 1/6") {
    const auto out = scratch("domain");
    const auto art =
        run_experiment(config("[experiment]\nkind = domain\ndeltas = 8..24\n[moran]\npreset = theorem-b\n", out));
    REQUIRE(art.ok);
    const std::string svg = slurp(out / "domain.svg");
    std::smatch m;
    REQUIRE(std::regex_search(svg, m, std::regex("geo_mean: slope = (-?[0-9.]+)")));
    CHECK(std::abs(std::stod(m[1].str()) - 1.0 / 6) <= 0.03);
    CHECK(fs::exists(out / "caps_d24.csv"));
    CHECK(table(out / "domain.csv").rows.size() == 17);
}

TEST_CASE("identical config and seed give byte-identical tables; the manifest reruns them") {
    const std::string text = "[experiment]\nkind = incidence\nsource = cantor-slopes\ns = 0.5\ndeltas = 6..8\nr = 1, 3\nseed = 7\n";
    const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
    REQUIRE(run_experiment(config(text, a)).ok);
    auto cb = config(text, b);
    cb.threads = 1;
    REQUIRE(run_experiment(cb).ok);
    CHECK(slurp(a / "incidence.csv") == slurp(b / "incidence.csv"));
    CHECK(slurp(a / "incidence.csv").size() > 100);

    auto cfg = read_experiment_config((a / "manifest.json").string());
    cfg.set("experiment", "out", c.string());
    REQUIRE(run_experiment(ExperimentConfig::from_config(cfg)).ok);
    CHECK(slurp(a / "incidence.csv") == slurp(c / "incidence.csv"));
    CHECK(slurp(a / "incidence.svg") == slurp(c / "incidence.svg"));

    const auto other = config(std::regex_replace(text, std::regex("seed = 7"), "seed = 8"), scratch("det_d"));
    CHECK(other.hash() != ExperimentConfig::from_config(read_experiment_config((a / "manifest.json").string())).hash());
}

TEST_CASE("thread count does not change tables") {
    const std::string text = "[experiment]\nkind = nikodym\ndeltas = 4..6\n";
    const auto a = scratch("thr_a"), b = scratch("thr_b");
    auto one = config(text, a);
    auto four = config(text, b);
    four.threads = 4;
    REQUIRE(run_experiment(one).ok);
    REQUIRE(run_experiment(four).ok);
    CHECK(slurp(a / "nikodym.csv") == slurp(b / "nikodym.csv"));
}

TEST_CASE("resource cap names the delta at fault") {
    const auto out = scratch("cap");
    const auto art = run_experiment(config("[experiment]\nkind = nikodym\ndeltas = 4..7\nmax_cells = 4096\n", out));
    CHECK_FALSE(art.ok);
    CHECK(art.failure.find("delta = 2^-7") != std::string::npos);
    const std::string status = slurp(out / "status.csv");
    CHECK(status.find("\nfail,nikodym,") != std::string::npos);
    CHECK(status.find(",7,delta = 2^-7") != std::string::npos);
    // Rows of the scales that fit were still written.
    CHECK(table(out / "nikodym.csv").rows.size() == 6);
}

TEST_CASE("other kinds run and stream rows") {
    std::ostringstream echo;
    const auto k = run_experiment(config("[experiment]\nkind = kakeya\ndeltas = 5, 6\n", scratch("kak")), &echo);
    CHECK(k.ok);
    CHECK(echo.str().rfind("kind,source,seed,s,function", 0) == 0);
    CHECK(run_experiment(config("[experiment]\nkind = dualsum\ndeltas = 4, 5\n", scratch("dual"))).ok);
    CHECK(run_experiment(config("[experiment]\nkind = energy\ndeltas = 6, 12\n", scratch("energy"))).ok);
}

TEST_CASE("generated inputs reload as experiment sources") {
    const auto dir = scratch("gen");
    const auto c = config("[experiment]\nkind = nikodym\ndeltas = 5\n", dir);
    const auto files = generate_inputs(c);
    REQUIRE(files.size() == 1);
    auto cfg = c.resolved;
    cfg.set("experiment", "source", "file:" + files[0]);
    cfg.set("experiment", "out", (dir / "from_file").string());
    REQUIRE(run_experiment(ExperimentConfig::from_config(cfg)).ok);
    REQUIRE(run_experiment(c).ok);
    const auto a = table(dir / "nikodym.csv"), b = table(dir / "from_file" / "nikodym.csv");
    CHECK(a.rows[0][a.column("ratio")] == b.rows[0][b.column("ratio")]);

    const auto tubes = scratch("gen_tubes");
    const auto ci = config("[experiment]\nkind = incidence\nsource = cantor-slopes\ndeltas = 6\nr = 2\n", tubes);
    const auto tube_files = generate_inputs(ci);
    REQUIRE(tube_files.size() == 1);
    auto cf = ci.resolved;
    cf.set("experiment", "source", "file:" + tube_files[0]);
    cf.set("experiment", "out", (tubes / "from_file").string());
    REQUIRE(run_experiment(ExperimentConfig::from_config(cf)).ok);
    REQUIRE(run_experiment(ci).ok);
    const auto ta = table(tubes / "incidence.csv"), tb = table(tubes / "from_file" / "incidence.csv");
    CHECK(ta.rows[0][ta.column("rich_cells")] == tb.rows[0][tb.column("rich_cells")]);
}

TEST_CASE("plot from CSV recovers a power law") {
    std::istringstream csv("delta,value,group\n0.5,2,a\n0.25,4,a\n0.125,8,a\n0.5,1,b\n0.25,1,b\n");
    auto p = plot_from_csv(read_csv(csv), "delta", "value", "group");
    REQUIRE(p.series.size() == 2);
    CHECK(p.series[0].fitted);
    CHECK(p.series[0].fit.beta == doctest::Approx(1.0));
    CHECK(p.series[1].fit.beta == doctest::Approx(0.0));
    const std::string svg = render_svg(p);
    CHECK(svg.find("group=a: slope = 1.0000") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    std::istringstream bad("delta,value\n0.5,1\n");
    CHECK_THROWS_AS(plot_from_csv(read_csv(bad), "delta", "missing"), std::invalid_argument);
}
