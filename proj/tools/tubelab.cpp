// tubelab: gen | run | verify | plot
//
// Exit codes: 0 success, 1 failed check or failure row, 2 usage error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tubelab/experiment.hpp"
#include "tubelab/plot.hpp"
#include "tubelab/suites.hpp"

namespace {

constexpr int kUsage = 2;

struct Overrides {
    std::string spec;
    std::string out;
    std::optional<int> delta_min, delta_max;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--spec", o.spec, "experiment config or manifest.json")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--delta-min-exp", o.delta_min, "first scale exponent j (delta = 2^-j)");
    cmd->add_option("--delta-max-exp", o.delta_max, "last scale exponent j");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "random seed");
}

// Flags replace the matching config keys before validation, so the manifest
// records the values actually used.
tubelab::ExperimentConfig resolve(const Overrides& o) {
    tubelab::Config cfg = tubelab::read_experiment_config(o.spec);
    if (o.delta_min || o.delta_max) {
        int lo = o.delta_min.value_or(0), hi = o.delta_max.value_or(0);
        if (!o.delta_min || !o.delta_max) {
            const auto base = tubelab::ExperimentConfig::from_config(cfg).delta_exps;
            if (base.empty()) lo = hi = o.delta_min.value_or(hi);
            if (!o.delta_min && !base.empty()) lo = base.front();
            if (!o.delta_max && !base.empty()) hi = base.back();
        }
        cfg.set("experiment", "deltas", std::to_string(lo) + ".." + std::to_string(hi));
    }
    if (!o.out.empty()) cfg.set("experiment", "out", o.out);
    if (o.threads) cfg.set("experiment", "threads", std::to_string(*o.threads));
    if (o.seed) cfg.set("experiment", "seed", std::to_string(*o.seed));
    return tubelab::ExperimentConfig::from_config(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tube incidence and maximal operator experiments"};
    app.require_subcommand(1);

    Overrides gen_opts, run_opts;
    auto* gen = app.add_subcommand("gen", "write the inputs of every scale");
    add_common(gen, gen_opts);
    auto* run = app.add_subcommand("run", "run an experiment: CSV tables, SVG fits, manifest");
    add_common(run, run_opts);
    bool quiet = false;
    run->add_flag("--quiet", quiet, "do not echo rows");

    std::string suite;
    int verify_threads = 1;
    std::uint64_t verify_seed = 1;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "oracles | invariants | paper-checks")->required();
    verify->add_option("--threads", verify_threads, "worker threads")->check(CLI::PositiveNumber);
    verify->add_option("--seed", verify_seed, "random seed");

    std::string csv_path, x_col = "delta", y_col, group_col, svg_path, title;
    auto* plot = app.add_subcommand("plot", "render a log-log fit of two CSV columns");
    plot->add_option("csv", csv_path, "input table")->required()->check(CLI::ExistingFile);
    plot->add_option("--x", x_col, "scale column");
    plot->add_option("--y", y_col, "value column")->required();
    plot->add_option("--group", group_col, "one series per value of this column");
    plot->add_option("--title", title, "plot title");
    plot->add_option("--out", svg_path, "SVG file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*gen) {
            for (const auto& f : tubelab::generate_inputs(resolve(gen_opts))) std::cout << f << '\n';
            return 0;
        }
        if (*run) {
            const auto config = resolve(run_opts);
            const auto art = tubelab::run_experiment(config, quiet ? nullptr : &std::cout);
            std::cerr << (art.ok ? "ok" : "FAILED: " + art.failure) << "; manifest " << art.manifest << '\n';
            return art.ok ? 0 : 1;
        }
        if (*verify) {
            const auto& names = tubelab::suite_names();
            if (std::find(names.begin(), names.end(), suite) == names.end()) {
                std::cerr << "unknown suite '" << suite << "'; expected oracles, invariants or paper-checks\n";
                return kUsage;
            }
            tubelab::SuiteOptions opts;
            opts.threads = verify_threads;
            opts.seed = verify_seed;
            opts.progress = &std::cout;
            int failed = 0;
            for (const auto& r : tubelab::run_suite(suite, opts)) failed += r.pass ? 0 : 1;
            std::cout << (failed ? std::to_string(failed) + " FAILED" : "ALL PASS") << '\n';
            return failed ? 1 : 0;
        }
        if (*plot) {
            std::ifstream in(csv_path);
            auto p = tubelab::plot_from_csv(tubelab::read_csv(in), x_col, y_col, group_col);
            p.title = title.empty() ? y_col + " against " + x_col : title;
            const std::string svg = tubelab::render_svg(p);
            if (svg_path.empty()) std::cout << svg;
            else std::ofstream(svg_path, std::ios::binary) << svg;
            for (const auto& s : p.series)
                if (s.fitted) std::cerr << (s.label.empty() ? y_col : s.label) << ": slope " << s.fit.beta << '\n';
            return 0;
        }
    } catch (const tubelab::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kUsage;
}
