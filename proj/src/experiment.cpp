#include "tubelab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tubelab/domains.hpp"
#include "tubelab/incidence.hpp"
#include "tubelab/maximal.hpp"
#include "tubelab/plot.hpp"

#ifndef TUBELAB_VERSION
#define TUBELAB_VERSION "0.0.0"
#endif

namespace tubelab {

namespace fs = std::filesystem;

namespace {

const char* const kSection = "experiment";
const std::map<std::string, ExperimentKind> kKinds = {
    {"incidence", ExperimentKind::incidence}, {"nikodym", ExperimentKind::nikodym},
    {"kakeya", ExperimentKind::kakeya},       {"dims", ExperimentKind::dims},
    {"domain", ExperimentKind::domain},       {"energy", ExperimentKind::energy},
    {"dualsum", ExperimentKind::dualsum},
};

std::string g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

// Commas would split a CSV cell.
std::string cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a number");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
    }
}

// "8..24", "8..24:2" or "8, 10, 12".
std::vector<int> parse_deltas(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        std::string hi = text.substr(dots + 2), step = "1";
        if (const auto colon = hi.find(':'); colon != std::string::npos) {
            step = hi.substr(colon + 1);
            hi = hi.substr(0, colon);
        }
        const auto a = parse_int("deltas", trim_copy(text.substr(0, dots)));
        const auto b = parse_int("deltas", trim_copy(hi));
        const auto st = parse_int("deltas", trim_copy(step));
        if (st < 1) throw ConfigError("key 'deltas': step must be positive");
        for (auto j = a; j <= b; j += st) out.push_back(static_cast<int>(j));
    } else {
        for (const auto& item : split_list(text)) out.push_back(static_cast<int>(parse_int("deltas", item)));
    }
    if (out.empty()) throw ConfigError("key 'deltas': empty list");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] < 1 || out[i] > 62) throw ConfigError("key 'deltas': exponent " + std::to_string(out[i]) + " outside 1..62");
        if (i && out[i] <= out[i - 1]) throw ConfigError("key 'deltas': exponents must increase");
    }
    return out;
}

MoranRule moran_from(const Config& cfg) {
    const auto preset = cfg.get("moran", "preset");
    if (!preset) {
        if (cfg.section("moran").empty()) return middle_thirds_rule();
        try {
            return MoranRule::from_config(cfg, "moran");
        } catch (const std::exception& e) {
            throw ConfigError(std::string("[moran]: ") + e.what());
        }
    }
    const auto budget = parse_int("budget", cfg.get_or("moran", "budget", "200"));
    if (budget < 1) throw ConfigError("key 'budget' must be positive");
    if (*preset == "middle-thirds") return middle_thirds_rule();
    if (*preset == "theorem-b") return theorem_b_rule(budget);
    if (*preset == "theorem-a") {
        const auto n = parse_int("N", cfg.get_or("moran", "N", "8"));
        if (n < 2) throw ConfigError("key 'N' must be at least 2");
        return theorem_a_rule(n, budget);
    }
    throw ConfigError("unknown moran preset '" + *preset + "'");
}

bool grid_kind(ExperimentKind k) {
    return k == ExperimentKind::incidence || k == ExperimentKind::nikodym || k == ExperimentKind::kakeya ||
           k == ExperimentKind::dualsum;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, std::vector<std::string> header, std::ostream* echo)
        : out_(path, std::ios::binary), echo_(echo) {
        if (!out_) throw std::runtime_error("cannot write " + path.string());
        file_.path = path.filename().string();
        file_.header = std::move(header);
        emit(join(file_.header, ","));
    }
    void row(const std::vector<std::string>& cells) {
        if (cells.size() != file_.header.size()) throw std::logic_error("row width differs from header");
        emit(join(cells, ","));
        ++file_.rows;
    }
    TableFile finish() {
        out_.close();
        return file_;
    }

private:
    void emit(const std::string& line) {
        out_ << line << '\n';
        out_.flush();
        if (echo_) *echo_ << line << '\n' << std::flush;
    }
    std::ofstream out_;
    std::ostream* echo_;
    TableFile file_;
};

// Fit of the samples seen so far; blank until two scales are present.
class RunningFit {
public:
    std::string add(const std::string& key, double delta, double value) {
        auto& s = samples_[key];
        if (value > 0 && std::isfinite(value)) s.emplace_back(delta, value);
        if (s.size() < 2) return "";
        return g12(exponent_fit(s).beta);
    }

private:
    std::map<std::string, std::vector<std::pair<double, double>>> samples_;
};

void check_cells(int k, std::int64_t cells_per_unit, std::int64_t cap) {
    const long double cells = std::ldexp(static_cast<long double>(cells_per_unit), 2 * k);
    if (cells > static_cast<long double>(cap))
        throw ResourceCapError("delta = 2^-" + std::to_string(k) + " needs " + g12(static_cast<double>(cells)) +
                               " grid cells, above max_cells = " + std::to_string(cap));
}

DirectionSet directions_for(const ExperimentConfig& c, int k) {
    if (c.source == "cantor") return DirectionSet::cantor(c.s, k);
    std::ifstream in(c.source.substr(5));
    if (!in) throw ConfigError("cannot open direction file " + c.source.substr(5));
    return DirectionSet::from_rationals(k, read_rationals(in));
}

TubeFamily file_family(const ExperimentConfig& c) {
    std::ifstream in(c.source.substr(5));
    if (!in) throw ConfigError("cannot open tube file " + c.source.substr(5));
    TubeFamily f;
    f.tubes = read_tubes(in);
    if (f.tubes.empty()) throw ConfigError("tube file " + c.source.substr(5) + " is empty");
    f.k = f.tubes.front().dual.k;
    f.validate();
    return f;
}

std::string delta_name(int j) { return "d" + std::to_string(j); }

struct Sweep {
    const ExperimentConfig& c;
    const fs::path& dir;
    std::ostream* progress;
    std::vector<TableFile>& tables;
    LogLogPlot& plot;
    int current = 0;  // delta exponent being processed, for failure rows

    std::vector<std::string> prefix() const {
        return {kind_name(c.kind), cell(c.source), std::to_string(c.seed)};
    }
    void sample(const std::string& label, double delta, double value) {
        if (!(value > 0) || !std::isfinite(value) || !(delta > 0 && delta < 1)) return;
        for (auto& s : plot.series)
            if (s.label == label) {
                s.samples.emplace_back(delta, value);
                return;
            }
        plot.series.push_back(PlotSeries{label, {{delta, value}}, {}, false});
    }

    void incidence() {
        CsvWriter w(dir / "incidence.csv",
                    {"kind", "source", "seed", "s", "delta_exp", "delta", "tubes", "r", "rich_cells", "c_kt", "c_reg",
                     "ratio", "lower_ratio"},
                    progress);
        plot.title = "r-rich cells";
        plot.y_label = "rich_cells";
        auto emit = [&](const TubeFamily& f, const IncidenceReport& rep) {
            const double delta = std::ldexp(1.0, -f.k);
            const double lower = static_cast<double>(rep.rich_cells) * rep.r * std::pow(delta, 2 - c.s);
            if (c.source == "sharp-example" && !(lower >= 1.0 / 64))
                throw InvariantViolation("sharp example has " + std::to_string(rep.rich_cells) + " " +
                                         std::to_string(rep.r) + "-rich cells, below delta^(s-2) / (64 r)");
            auto row = prefix();
            for (const auto& v : {g12(c.s), std::to_string(f.k), g12(delta), std::to_string(f.size()),
                                  std::to_string(rep.r), std::to_string(rep.rich_cells), g12(rep.c_kt), g12(rep.c_reg),
                                  g12(rep.ratio), g12(lower)})
                row.push_back(v);
            w.row(row);
            sample("r=" + std::to_string(rep.r), delta, static_cast<double>(rep.rich_cells));
        };
        if (c.source.rfind("file:", 0) == 0) {
            const TubeFamily f = file_family(c);
            current = f.k;
            check_cells(f.k, 1, c.max_cells);
            for (const auto& rep : incidence_sweep(f, c.s, c.r, c.threads)) emit(f, rep);
        } else {
            for (int k : c.delta_exps) {
                current = k;
                check_cells(k, 1, c.max_cells);
                if (c.source == "sharp-example") {
                    for (int r : c.r) {
                        SharpExample ex;
                        try {
                            ex = sharp_example(c.s, k, r);
                        } catch (const std::invalid_argument& e) {
                            throw ConfigError("sharp example at delta = 2^-" + std::to_string(k) + ", r = " +
                                              std::to_string(r) + ": " + e.what());
                        }
                        emit(ex.family, verify_incidence_bound(ex.family, c.s, r, c.threads));
                    }
                } else {
                    const TubeFamily f = cantor_katz_tao_family(c.s, k, c.seed);
                    for (const auto& rep : incidence_sweep(f, c.s, c.r, c.threads)) emit(f, rep);
                }
            }
        }
        tables.push_back(w.finish());
    }

    GridFunction test_function(int k, const DirectionSet& dirs) const {
        if (c.function == "bush")
            return GridFunction::indicator(GridBox::unit_square(k), bush_construction(dirs, 0.0, 1.0).core);
        const double delta = std::ldexp(1.0, -k);
        if (c.kind == ExperimentKind::kakeya)
            return GridFunction::disc(GridBox::covering(k, -0.25, 0.25, -0.25, 0.25), 0.0, 0.0, delta);
        return GridFunction::disc(GridBox::unit_square(k), 0.5, 0.5, delta);
    }

    void nikodym() {
        CsvWriter w(dir / "nikodym.csv",
                    {"kind", "source", "seed", "s", "function", "delta_exp", "delta", "directions", "p", "ratio",
                     "beta_hat"},
                    progress);
        plot.title = "Nikodym norm ratio";
        plot.y_label = "ratio";
        RunningFit fit;
        for (int k : c.delta_exps) {
            current = k;
            check_cells(k, 1, c.max_cells);
            const double delta = std::ldexp(1.0, -k);
            const auto dirs = directions_for(c, k);
            const auto f = test_function(k, dirs);
            const auto out = nikodym_apply(f, dirs, c.threads);
            if (out.max() > f.max() * (1 + 1e-12))
                throw InvariantViolation("maximal function exceeds the sup of f");
            for (double p : c.p) {
                const double ratio = out.lp_norm(p) / f.lp_norm(p);
                auto row = prefix();
                for (const auto& v : {g12(c.s), c.function, std::to_string(k), g12(delta), std::to_string(dirs.size()),
                                      g12(p), g12(ratio), fit.add(g12(p), delta, ratio)})
                    row.push_back(v);
                w.row(row);
                sample("p=" + g12(p), delta, ratio);
            }
        }
        tables.push_back(w.finish());
    }

    void kakeya() {
        CsvWriter w(dir / "kakeya.csv",
                    {"kind", "source", "seed", "s", "function", "delta_exp", "delta", "directions", "p", "ratio",
                     "floor", "tube_sum_ratio", "beta_hat"},
                    progress);
        plot.title = "Kakeya norm ratio";
        plot.y_label = "ratio";
        RunningFit fit;
        for (int k : c.delta_exps) {
            current = k;
            check_cells(k, 1, c.max_cells);
            const double delta = std::ldexp(1.0, -k);
            const auto dirs = directions_for(c, k);
            const auto f = test_function(k, dirs);
            NormOptions o;
            o.op = MaximalOperator::kakeya;
            o.s = c.s;
            o.threads = c.threads;
            const double tube_sum = tube_sum_norm(bush_family(dirs), 1 + 1 / c.s, c.s).ratio;
            for (double p : c.p) {
                const double ratio = norm_ratio(f, dirs, p, o);
                const double floor = std::pow(delta, 1 - 2 / p) / 8;
                if (c.function == "disc" && !(ratio >= floor))
                    throw InvariantViolation("disc ratio " + g12(ratio) + " below delta^(1-2/p) / 8 at p = " + g12(p));
                auto row = prefix();
                for (const auto& v : {g12(c.s), c.function, std::to_string(k), g12(delta), std::to_string(dirs.size()),
                                      g12(p), g12(ratio), g12(floor), g12(tube_sum), fit.add(g12(p), delta, ratio)})
                    row.push_back(v);
                w.row(row);
                sample("p=" + g12(p), delta, ratio);
            }
        }
        tables.push_back(w.finish());
    }

    void dualsum() {
        CsvWriter w(dir / "dualsum.csv",
                    {"kind", "source", "seed", "s", "a", "delta_exp", "delta", "directions", "p_prime", "norm",
                     "max_distance", "beta_hat"},
                    progress);
        plot.title = "Dual tube-sum norm";
        plot.y_label = "norm";
        RunningFit fit;
        for (int k : c.delta_exps) {
            current = k;
            check_cells(k, 5, c.max_cells);
            const double delta = std::ldexp(1.0, -k);
            const auto dirs = directions_for(c, k);
            const auto assignment = adversarial_assignment(dirs, c.a);
            for (double p : c.p) {
                const auto res = dual_sum_norm(assignment, k, p);
                if (res.max_distance > std::floor(c.a) + 1)
                    throw InvariantViolation("assigned tube " + g12(res.max_distance) + " cells from its point");
                auto row = prefix();
                for (const auto& v : {g12(c.s), g12(c.a), std::to_string(k), g12(delta), std::to_string(dirs.size()),
                                      g12(p), g12(res.norm), g12(res.max_distance), fit.add(g12(p), delta, res.norm)})
                    row.push_back(v);
                w.row(row);
                sample("p'=" + g12(p), delta, res.norm);
            }
        }
        tables.push_back(w.finish());
    }

    void dims() {
        CsvWriter w(dir / "dims.csv",
                    {"kind", "source", "seed", "spec", "gamma", "K", "intervals", "generation_length", "box_dim_ratio",
                     "qa_alpha"},
                    progress);
        plot.title = "Generation counts of " + c.moran.name;
        plot.y_label = "intervals";
        const MoranSet set = build_moran(c.moran.expand(c.depth), c.depth);
        long double expected = 1;
        for (int K = 1; K <= c.depth; ++K) {
            current = K;
            const auto intervals = static_cast<std::int64_t>(set.generations[K].size());
            expected *= static_cast<long double>(set.spec.levels[K - 1].n);
            if (static_cast<long double>(intervals) != expected)
                throw InvariantViolation("generation " + std::to_string(K) + " has " + std::to_string(intervals) +
                                         " intervals, not n_1 ... n_K");
            const double length = set.generation_length(K).to_double();
            std::vector<double> pts;
            for (const auto& e : set.endpoints(K)) pts.push_back(e.to_double());
            const double qa = qa_profile(pts, c.gamma, length).alpha;
            auto row = prefix();
            for (const auto& v : {cell(c.moran.name), g12(c.gamma), std::to_string(K), std::to_string(intervals),
                                  g12(length), g12(box_dim_ratio(set, 1, K)), g12(qa)})
                row.push_back(v);
            w.row(row);
            sample("intervals", length, static_cast<double>(intervals));
        }
        tables.push_back(w.finish());
    }

    GcsDomain build_domain() {
        current = c.delta_exps.back();
        try {
            return domain_for(c.moran, dyadic_delta(c.delta_exps.back()));
        } catch (const std::out_of_range& e) {
            throw ConfigError(std::string("moran rule cannot reach the smallest delta: ") + e.what());
        }
    }

    void domain() {
        CsvWriter w(dir / "domain.csv",
                    {"kind", "source", "seed", "spec", "eta", "delta_exp", "delta", "level", "depth", "lower", "upper",
                     "geo_mean", "beta_hat"},
                    progress);
        plot.title = "Cap counts of " + c.moran.name;
        plot.y_label = "caps";
        const GcsDomain dom = build_domain();
        RunningFit fit;
        for (int j : c.delta_exps) {
            current = j;
            const Rational delta = dyadic_delta(j);
            const double dd = delta.to_double();
            const CapCover cover = cap_cover(dom, delta, c.eta);
            for (const auto& cap : cover.caps) {
                const auto chk = check_cap(dom, cap);
                if (!chk.supporting || !(chk.max_distance < delta.to_long_double()))
                    throw InvariantViolation("cap over [" + cap.t_lo.str() + ", " + cap.t_hi.str() + "] is not a delta-cap");
            }
            {
                std::ofstream caps(dir / ("caps_" + delta_name(j) + ".csv"), std::ios::binary);
                cover.write_csv(caps);
                tables.push_back(TableFile{"caps_" + delta_name(j) + ".csv", {"class", "t_lo", "t_hi", "slope", "intercept"},
                                           static_cast<std::int64_t>(cover.size())});
            }
            const std::int64_t lower =
                dom.finite() ? 1 : static_cast<std::int64_t>(dom.cantor().generations[cover.level].size());
            const auto upper = static_cast<std::int64_t>(cover.size());
            if (upper < lower) throw InvariantViolation("fewer caps than generation intervals");
            const double geo = std::sqrt(static_cast<double>(lower) * static_cast<double>(upper));
            auto row = prefix();
            for (const auto& v : {cell(c.moran.name), g12(c.eta), std::to_string(j), g12(dd), std::to_string(cover.level),
                                  std::to_string(cover.depth), std::to_string(lower), std::to_string(upper), g12(geo),
                                  fit.add("geo", dd, geo)})
                row.push_back(v);
            w.row(row);
            sample("lower", dd, static_cast<double>(lower));
            sample("upper", dd, static_cast<double>(upper));
            sample("geo_mean", dd, geo);
        }
        tables.insert(tables.begin(), w.finish());
    }

    void energy() {
        CsvWriter w(dir / "energy.csv",
                    {"kind", "source", "seed", "spec", "eta", "m", "delta_exp", "delta", "level", "m0", "m1",
                     "xi_bound", "energy_exponent", "product_bound"},
                    progress);
        plot.title = "Additive energy bound of " + c.moran.name;
        plot.y_label = "xi_bound";
        const GcsDomain dom = build_domain();
        for (int j : c.delta_exps) {
            current = j;
            const Rational delta = dyadic_delta(j);
            const auto e = additive_energy_estimate(dom, delta, c.m, c.eta);
            auto row = prefix();
            for (const auto& v : {cell(c.moran.name), g12(c.eta), std::to_string(c.m), std::to_string(j),
                                  g12(delta.to_double()), std::to_string(e.level), std::to_string(e.m0),
                                  g12(static_cast<double>(e.m1)), g12(static_cast<double>(e.xi_bound)),
                                  g12(e.energy_exponent), std::string(e.product_bound ? "1" : "0")})
                row.push_back(v);
            w.row(row);
            sample("xi_bound", delta.to_double(), static_cast<double>(e.xi_bound));
        }
        tables.push_back(w.finish());
    }
};

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
    for (const auto& [name, k] : kKinds)
        if (k == kind) return name;
    return "unknown";
}

std::string code_version() { return TUBELAB_VERSION; }

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
    ExperimentConfig c;
    for (const auto& name : cfg.sections())
        if (name != kSection && name != "moran" && !cfg.section(name).empty())
            throw ConfigError("unknown section [" + name + "]");
    static const std::vector<std::string> known = {"kind", "deltas", "seed", "threads", "out", "max_cells", "source",
                                                   "s", "p", "r", "eta", "gamma", "m", "a", "depth", "function"};
    for (const auto& [key, value] : cfg.section(kSection))
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown key '" + key + "'");

    const auto kind = cfg.get(kSection, "kind");
    if (!kind) throw ConfigError("missing key 'kind'");
    const auto it = kKinds.find(*kind);
    if (it == kKinds.end()) throw ConfigError("unknown kind '" + *kind + "'");
    c.kind = it->second;
    const bool moran_kind =
        c.kind == ExperimentKind::dims || c.kind == ExperimentKind::domain || c.kind == ExperimentKind::energy;

    auto get = [&](const std::string& key) { return cfg.get(kSection, key); };
    auto num = [&](const std::string& key, double fallback) {
        const auto v = get(key);
        return v ? parse_double(key, *v) : fallback;
    };
    auto integer = [&](const std::string& key, std::int64_t fallback) {
        const auto v = get(key);
        return v ? parse_int(key, *v) : fallback;
    };

    if (const auto d = get("deltas")) c.delta_exps = parse_deltas(*d);
    else if (c.kind != ExperimentKind::dims) throw ConfigError("missing key 'deltas'");

    switch (c.kind) {
        case ExperimentKind::incidence: c.source = "sharp-example"; break;
        case ExperimentKind::nikodym:
        case ExperimentKind::kakeya:
        case ExperimentKind::dualsum: c.source = "cantor"; break;
        default: c.source = "moran";
    }
    c.source = get("source").value_or(c.source);
    const bool file_source = c.source.rfind("file:", 0) == 0 && c.source.size() > 5;
    if (c.kind == ExperimentKind::incidence) {
        if (c.source != "sharp-example" && c.source != "cantor-slopes" && !file_source)
            throw ConfigError("incidence source must be sharp-example, cantor-slopes or file:PATH");
    } else if (moran_kind) {
        if (c.source != "moran") throw ConfigError("source of kind " + *kind + " must be moran");
    } else if (c.source != "cantor" && !file_source) {
        throw ConfigError("direction source must be cantor or file:PATH");
    }

    const double cantor_s = std::log(2.0) / std::log(3.0);
    c.s = num("s", c.kind == ExperimentKind::incidence ? 0.5 : cantor_s);
    if (!(c.s > 0 && c.s <= 1)) throw ConfigError("key 's' must lie in (0, 1]");

    std::vector<double> p_default;
    if (c.kind == ExperimentKind::nikodym) p_default = {1.0, 2.0};
    else if (c.kind == ExperimentKind::kakeya) p_default = {1 + c.s};
    else if (c.kind == ExperimentKind::dualsum) p_default = {1 + 1 / c.s};
    if (const auto v = get("p")) {
        for (const auto& item : split_list(*v)) c.p.push_back(parse_double("p", item));
        if (c.p.empty()) throw ConfigError("key 'p': empty list");
    } else {
        c.p = p_default;
    }
    for (double p : c.p)
        if (!(p >= 1)) throw ConfigError("key 'p': exponents must be at least 1");
    if (c.kind == ExperimentKind::dualsum)
        for (double p : c.p)
            if (!(p > 1)) throw ConfigError("key 'p': dual exponents must exceed 1");

    if (const auto v = get("r")) {
        for (const auto& item : split_list(*v)) c.r.push_back(static_cast<int>(parse_int("r", item)));
        if (c.r.empty()) throw ConfigError("key 'r': empty list");
    } else if (c.kind == ExperimentKind::incidence) {
        c.r = {1, 2, 4, 8, 16};
    }
    for (int r : c.r)
        if (r < 1) throw ConfigError("key 'r': thresholds must be positive");

    c.eta = num("eta", c.eta);
    if (!(c.eta > 0)) throw ConfigError("key 'eta' must be positive");
    c.gamma = num("gamma", c.gamma);
    if (!(c.gamma > 0 && c.gamma < 1)) throw ConfigError("key 'gamma' must lie in (0, 1)");
    c.m = static_cast<int>(integer("m", c.m));
    if (c.m < 1) throw ConfigError("key 'm' must be positive");
    c.a = num("a", c.a);
    if (!(c.a >= 0)) throw ConfigError("key 'a' must be non-negative");
    c.depth = static_cast<int>(integer("depth", c.kind == ExperimentKind::dims ? 8 : 0));
    if (c.kind == ExperimentKind::dims && c.depth < 1) throw ConfigError("key 'depth' must be positive");
    c.function = get("function").value_or(c.kind == ExperimentKind::kakeya ? "disc" : "bush");
    if (c.function != "bush" && c.function != "disc") throw ConfigError("key 'function' must be bush or disc");
    const auto seed = integer("seed", 1);
    if (seed < 0) throw ConfigError("key 'seed' must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.threads = static_cast<int>(integer("threads", 1));
    if (c.threads < 1) throw ConfigError("key 'threads' must be at least 1");
    c.out_dir = get("out").value_or(c.out_dir);
    if (c.out_dir.empty()) throw ConfigError("key 'out' is empty");
    c.max_cells = integer("max_cells", c.max_cells);
    if (c.max_cells < 1) throw ConfigError("key 'max_cells' must be positive");

    if (moran_kind) c.moran = moran_from(cfg);
    if (grid_kind(c.kind) && !c.delta_exps.empty() && c.delta_exps.back() > 30)
        throw ConfigError("key 'deltas': grid experiments need exponents <= 30");

    c.resolved = cfg;
    auto set = [&](const std::string& key, const std::string& value) { c.resolved.set(kSection, key, value); };
    std::vector<std::string> items;
    for (int j : c.delta_exps) items.push_back(std::to_string(j));
    if (!items.empty()) set("deltas", join(items, ", "));
    set("source", c.source);
    set("s", g17(c.s));
    items.clear();
    for (double p : c.p) items.push_back(g17(p));
    if (!items.empty()) set("p", join(items, ", "));
    items.clear();
    for (int r : c.r) items.push_back(std::to_string(r));
    if (!items.empty()) set("r", join(items, ", "));
    set("eta", g17(c.eta));
    set("gamma", g17(c.gamma));
    set("m", std::to_string(c.m));
    set("a", g17(c.a));
    set("depth", std::to_string(c.depth));
    set("function", c.function);
    set("seed", std::to_string(c.seed));
    set("threads", std::to_string(c.threads));
    set("out", c.out_dir);
    set("max_cells", std::to_string(c.max_cells));
    return c;
}

Config read_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    std::istringstream body(text);
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw ConfigError("manifest " + path + ": " + e.what());
        }
        if (!manifest.contains("config") || !manifest["config"].is_string())
            throw ConfigError("manifest " + path + " has no config text");
        body.str(manifest["config"].get<std::string>());
    }
    try {
        return Config::parse(body);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return from_config(read_experiment_config(path)); }

std::string ExperimentConfig::hash() const { return fnv1a_hex(resolved.canonical()); }

RunArtifact run_experiment(const ExperimentConfig& config, std::ostream* progress) {
    RunArtifact art;
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    art.out_dir = dir.string();
    LogLogPlot plot;
    Sweep sweep{config, dir, progress, art.tables, plot};
    const std::map<ExperimentKind, std::function<void()>> dispatch = {
        {ExperimentKind::incidence, [&] { sweep.incidence(); }}, {ExperimentKind::nikodym, [&] { sweep.nikodym(); }},
        {ExperimentKind::kakeya, [&] { sweep.kakeya(); }},       {ExperimentKind::dims, [&] { sweep.dims(); }},
        {ExperimentKind::domain, [&] { sweep.domain(); }},       {ExperimentKind::energy, [&] { sweep.energy(); }},
        {ExperimentKind::dualsum, [&] { sweep.dualsum(); }},
    };
    try {
        dispatch.at(config.kind)();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        art.ok = false;
        art.failure = e.what();
    }

    {
        std::ofstream status(dir / "status.csv", std::ios::binary);
        status << "status,kind,config_hash,delta_exp,message\n";
        status << (art.ok ? "ok" : "fail") << ',' << kind_name(config.kind) << ',' << config.hash() << ','
               << (art.ok ? "" : std::to_string(sweep.current)) << ',' << cell(art.failure) << '\n';
    }
    if (progress && !art.ok)
        *progress << "fail," << kind_name(config.kind) << ',' << config.hash() << ',' << sweep.current << ','
                  << cell(art.failure) << '\n';

    if (!plot.series.empty()) {
        fit_series(plot);
        const std::string name = kind_name(config.kind) + ".svg";
        std::ofstream(dir / name, std::ios::binary) << render_svg(plot);
        art.plots.push_back(name);
    }

    nlohmann::ordered_json m;
    m["tool"] = "tubelab";
    m["code_version"] = code_version();
    m["kind"] = kind_name(config.kind);
    m["config_hash"] = config.hash();
    m["config"] = config.resolved.canonical();
    m["status"] = art.ok ? "ok" : "fail";
    if (!art.ok) m["failure"] = art.failure;
    m["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : art.tables)
        m["tables"].push_back({{"file", t.path}, {"rows", t.rows}, {"fnv1a", file_hash(dir / t.path)}});
    m["plots"] = art.plots;
    art.manifest = (dir / "manifest.json").string();
    std::ofstream(art.manifest, std::ios::binary) << m.dump(2) << '\n';
    return art;
}

std::vector<std::string> generate_inputs(const ExperimentConfig& c) {
    const fs::path dir(c.out_dir);
    fs::create_directories(dir);
    std::vector<std::string> files;
    auto open = [&](const std::string& name) {
        files.push_back((dir / name).string());
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + files.back());
        return out;
    };
    switch (c.kind) {
        case ExperimentKind::incidence:
            if (c.source.rfind("file:", 0) == 0) break;
            for (int k : c.delta_exps) {
                if (c.source == "sharp-example") {
                    for (int r : c.r) {
                        auto out = open("tubes_" + delta_name(k) + "_r" + std::to_string(r) + ".txt");
                        write_tubes(out, sharp_example(c.s, k, r).family.tubes);
                    }
                } else {
                    auto out = open("tubes_" + delta_name(k) + ".txt");
                    write_tubes(out, cantor_katz_tao_family(c.s, k, c.seed).tubes);
                }
            }
            break;
        case ExperimentKind::nikodym:
        case ExperimentKind::kakeya:
        case ExperimentKind::dualsum:
            for (int k : c.delta_exps) {
                std::vector<Rational> values;
                for (auto t : directions_for(c, k).slopes) values.emplace_back(t, std::int64_t{1} << k);
                auto out = open("directions_" + delta_name(k) + ".txt");
                write_rationals(out, values);
            }
            break;
        case ExperimentKind::dims: {
            const MoranSet set = build_moran(c.moran.expand(c.depth), c.depth);
            auto out = open("endpoints_K" + std::to_string(c.depth) + ".txt");
            write_rationals(out, set.endpoints(c.depth));
            break;
        }
        case ExperimentKind::domain:
        case ExperimentKind::energy: {
            const GcsDomain dom = domain_for(c.moran, dyadic_delta(c.delta_exps.back()));
            auto out = open("endpoints_K" + std::to_string(dom.depth()) + ".txt");
            write_rationals(out, dom.cantor().endpoints(dom.depth()));
            break;
        }
    }
    return files;
}

}  // namespace tubelab
