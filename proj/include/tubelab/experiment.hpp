#pragma once
// Experiment runner: validated configuration, scale sweeps dispatched to the
// owning modules, CSV tables, SVG fits and a manifest that reproduces the run.
//
// Config layout:
//   [experiment]  kind, deltas ("8..24", "8..24:2" or "10, 12"), seed, threads,
//                 out, max_cells, source, s, p, r, eta, gamma, m, a, depth,
//                 function
//   [moran]       preset (middle-thirds | theorem-a | theorem-b, with N and
//                 budget) or the rule keys read by MoranRule::from_config

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubelab/config.hpp"
#include "tubelab/setgen.hpp"

namespace tubelab {

enum class ExperimentKind { incidence, nikodym, kakeya, dims, domain, energy, dualsum };

std::string kind_name(ExperimentKind kind);

// Invalid configuration; the CLI maps it to a usage error.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
// A cell grid larger than max_cells.
struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// A checked property failed during the sweep.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::dims;
    std::vector<int> delta_exps;  // delta = 2^-j, strictly increasing j
    std::string source;           // sharp-example | cantor-slopes | cantor | moran | file:PATH
    MoranRule moran;
    int depth = 0;                // dims: generations 1..depth
    double s = 0.0;
    std::vector<double> p;
    std::vector<int> r;
    double eta = 0.05;
    double gamma = 0.25;
    int m = 3;
    double a = 2.0;               // dualsum: row shift of the adversarial assignment
    std::string function = "bush";
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";
    std::int64_t max_cells = std::int64_t{1} << 26;

    // Resolved configuration, defaults filled in; its canonical text is hashed.
    Config resolved;

    // Throws ConfigError naming the offending key.
    static ExperimentConfig from_config(const Config& cfg);
    // Accepts a config file or a manifest.json written by run_experiment.
    static ExperimentConfig load(const std::string& path);
    std::string hash() const;
};

// Raw config from a config file or from the "config" text of a manifest.json.
Config read_experiment_config(const std::string& path);

struct TableFile {
    std::string path;
    std::vector<std::string> header;
    std::int64_t rows = 0;
};

struct RunArtifact {
    std::string out_dir;
    std::vector<TableFile> tables;
    std::vector<std::string> plots;
    std::string manifest;
    bool ok = true;
    std::string failure;  // also written as the row of status.csv
};

std::string code_version();

// Writes <out>/<kind>.csv, <out>/<kind>.svg, <out>/status.csv and
// <out>/manifest.json; rows are flushed as they are produced and echoed to
// `progress`. Invariant violations, resource caps and other runtime errors end
// the sweep with ok = false and a failure row; configuration errors throw
// ConfigError.
RunArtifact run_experiment(const ExperimentConfig& config, std::ostream* progress = nullptr);

// Writes the inputs of each scale (tube families, direction sets or Moran
// endpoints) in the text formats of core and setgen; returns the paths.
std::vector<std::string> generate_inputs(const ExperimentConfig& config);

}  // namespace tubelab
