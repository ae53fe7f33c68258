// Experiment runner: build finite systems, compute ergodic-mean profiles,
// run stabilization/fluctuation/gap/tail analyses, build map
// approximations, and verify system invariants. Emits CSV artifacts plus
// JSON summaries; identical (config, seed) inputs produce byte-identical
// outputs.
//
// Exit codes: 0 success, 1 I/O failure, 2 verify assertion failed,
// 3 configuration error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergo/core.hpp"
#include "ergo/ergodic.hpp"
#include "ergo/io.hpp"
#include "ergo/map_approx.hpp"
#include "ergo/measure.hpp"
#include "ergo/systems.hpp"

using json = nlohmann::json;
using namespace ergo;

namespace {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- options

struct Options {
    // system
    std::string system_name;
    Index size_m = 0;
    Index step_n = 0;
    double alpha = 0.0;
    Index m_max = 0;
    int alphabet = 2;
    // observable
    std::string observable_name;
    Index block_k = 0;
    std::string pattern;
    std::string function_name;
    double function_param = 0.0;
    // analysis parameters
    std::vector<Index> points;
    std::string n_grid_spec;
    double epsilon = 0.0;
    double delta_param = 0.0;
    Index n_min = 16;
    Index horizon = 0;
    Index window_k = 0;
    Index window_l = 0;
    std::vector<double> thresholds;
    Index sample_size = 256;
    std::uint64_t seed = 0;
    // map approximation
    std::string map_name;
    double map_alpha = 0.0;
    std::string images_csv;
    std::string grid_kind = "uniform";
    std::string grid_csv;
    double match_delta = 0.0;
    bool transitive = false;
    std::string metric_name = "circle";
    double error_epsilon = 0.0;
    // grid construction
    std::string grid_config;
    // outputs
    std::string out;
    std::string json_out;
    // verify tolerances
    std::map<std::string, double> tolerances;
};

Index json_index(const json& j, const char* key, Index fallback) {
    return j.contains(key) ? j.at(key).get<Index>() : fallback;
}

double json_double(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::string json_string(const json& j, const char* key, std::string fallback) {
    return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

void load_config(Options& opt, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    if (cfg.contains("system")) {
        const json& s = cfg["system"];
        opt.system_name = json_string(s, "name", opt.system_name);
        opt.size_m = json_index(s, "M", opt.size_m);
        opt.step_n = json_index(s, "N", opt.step_n);
        opt.alpha = json_double(s, "alpha", opt.alpha);
        opt.m_max = json_index(s, "M_max", opt.m_max);
        opt.alphabet = static_cast<int>(json_index(s, "m", Index(opt.alphabet)));
    }
    if (cfg.contains("observable")) {
        const json& o = cfg["observable"];
        opt.observable_name = json_string(o, "name", opt.observable_name);
        opt.block_k = json_index(o, "K", opt.block_k);
        opt.pattern = json_string(o, "pattern", opt.pattern);
        opt.function_name = json_string(o, "function", opt.function_name);
        opt.function_param = json_double(o, "param", opt.function_param);
    }
    if (cfg.contains("points")) opt.points = cfg["points"].get<std::vector<Index>>();
    if (cfg.contains("thresholds"))
        opt.thresholds = cfg["thresholds"].get<std::vector<double>>();
    opt.n_grid_spec = json_string(cfg, "n_grid", opt.n_grid_spec);
    opt.epsilon = json_double(cfg, "epsilon", opt.epsilon);
    opt.delta_param = json_double(cfg, "delta", opt.delta_param);
    opt.n_min = json_index(cfg, "n_min", opt.n_min);
    opt.horizon = json_index(cfg, "horizon", opt.horizon);
    opt.window_k = json_index(cfg, "K", opt.window_k);
    opt.window_l = json_index(cfg, "L", opt.window_l);
    opt.sample_size = json_index(cfg, "sample_size", opt.sample_size);
    opt.seed = json_index(cfg, "seed", opt.seed);
    if (cfg.contains("map")) {
        const json& m = cfg["map"];
        opt.map_name = json_string(m, "name", opt.map_name);
        opt.map_alpha = json_double(m, "alpha", opt.map_alpha);
        opt.images_csv = json_string(m, "images_csv", opt.images_csv);
    }
    if (cfg.contains("grid")) {
        const json& g = cfg["grid"];
        opt.grid_kind = json_string(g, "kind", opt.grid_kind);
        opt.size_m = json_index(g, "M", opt.size_m);
        opt.grid_csv = json_string(g, "csv", opt.grid_csv);
    }
    opt.match_delta = json_double(cfg, "match_delta", opt.match_delta);
    if (cfg.contains("transitive")) opt.transitive = cfg["transitive"].get<bool>();
    opt.metric_name = json_string(cfg, "metric", opt.metric_name);
    opt.error_epsilon = json_double(cfg, "error_epsilon", opt.error_epsilon);
    opt.out = json_string(cfg, "out", opt.out);
    opt.json_out = json_string(cfg, "json_out", opt.json_out);
    if (cfg.contains("tolerances"))
        for (const auto& [key, value] : cfg["tolerances"].items())
            opt.tolerances[key] = value.get<double>();
}

// ------------------------------------------------------------ construction

FiniteSystem build_system(const Options& opt) {
    if (opt.system_name == "rotation") {
        if (opt.size_m == 0) throw ConfigError("rotation needs --M");
        return rotation_system(opt.size_m, opt.step_n);
    }
    if (opt.system_name == "rotation_irrational") {
        if (opt.m_max == 0) throw ConfigError("rotation_irrational needs --M-max");
        auto [n, m] = convergent(opt.alpha, opt.m_max);
        return rotation_system(m, n);
    }
    if (opt.system_name == "bernoulli_block")
        return bernoulli_block_system(opt.alphabet, static_cast<int>(opt.step_n));
    if (opt.system_name == "bernoulli_debruijn")
        return bernoulli_debruijn_system(opt.alphabet, static_cast<int>(opt.step_n));
    throw ConfigError("unknown system: '" + opt.system_name + "'");
}

std::map<int, int> parse_pattern(const std::string& text) {
    // "pos:sym,pos:sym", e.g. "-1:0,0:1"
    std::map<int, int> pattern;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("cylinder pattern entries look like pos:symbol");
        pattern[std::stoi(item.substr(0, colon))] = std::stoi(item.substr(colon + 1));
    }
    if (pattern.empty()) throw ConfigError("empty cylinder pattern");
    return pattern;
}

Observable build_observable(const Options& opt, const FiniteSystem& system,
                            std::vector<std::string>& warnings) {
    const std::string& name = opt.observable_name;
    if (name == "delta") return delta_observable(system.size());
    if (name == "block") {
        if (opt.block_k == 0) throw ConfigError("block observable needs --K");
        return block_observable(system.size(), opt.block_k, &warnings);
    }
    if (name == "coordinate") return coordinate_observable(system.size());
    if (name == "cylinder") return cylinder_observable(system, parse_pattern(opt.pattern));
    if (name == "continuous") {
        auto tf = make_test_function(opt.function_name, opt.function_param);
        return continuous_observable(system, tf.eval);
    }
    throw ConfigError("unknown observable: '" + name + "'");
}

std::vector<Index> parse_n_grid(const std::string& spec, Index system_size) {
    if (spec.empty()) throw ConfigError("means needs --n-grid");
    std::vector<Index> grid;
    auto push_unique = [&grid](Index n) {
        if (n >= 1 && (grid.empty() || grid.back() < n)) grid.push_back(n);
    };
    if (spec.rfind("log:", 0) == 0 || spec.rfind("lin:", 0) == 0) {
        Index lo = 0, hi = 0, count = 0;
        char kind[4] = {0};
        if (std::sscanf(spec.c_str(), "%3[a-z]:%zu:%zu:%zu", kind, &lo, &hi, &count) != 4 ||
            lo == 0 || hi < lo || count == 0)
            throw ConfigError("n-grid spec looks like log:lo:hi:count or lin:lo:hi:count");
        for (Index i = 0; i < count; ++i) {
            double t = count == 1 ? 0.0 : double(i) / double(count - 1);
            double value = spec[0] == 'l' && spec[1] == 'o'
                               ? double(lo) * std::pow(double(hi) / double(lo), t)
                               : double(lo) + t * double(hi - lo);
            push_unique(static_cast<Index>(std::llround(value)));
        }
    } else {
        std::istringstream in(spec);
        std::string item;
        while (std::getline(in, item, ',')) push_unique(std::stoul(item));
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    }
    if (grid.empty()) throw ConfigError("n-grid resolved to no usable window lengths");
    (void)system_size;
    return grid;
}

std::vector<Index> resolve_sample(const Options& opt, Index system_size) {
    Index count = opt.sample_size == 0 ? system_size : opt.sample_size;
    return sample_indices(system_size, count, opt.seed);
}

Index thread_count() {
    const char* env = std::getenv("ERGO_THREADS");
    if (!env) return 1;
    long value = std::strtol(env, nullptr, 10);
    return value > 1 ? static_cast<Index>(value) : 1;
}

// ------------------------------------------------------------------ output

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

void emit_json(const json& doc, const std::string& path) {
    if (path.empty()) {
        std::cout << doc.dump(2) << '\n';
        return;
    }
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path);
}

json system_summary(const Options& opt, const FiniteSystem& system,
                    const std::vector<std::string>& warnings) {
    json doc;
    doc["system"] = opt.system_name;
    doc["M"] = system.size();
    doc["transitive"] = is_transitive(system.perm);
    doc["seed"] = opt.seed;
    if (!warnings.empty()) doc["warnings"] = warnings;
    return doc;
}

// ------------------------------------------------------------ subcommands

int run_build(const Options& opt) {
    if (!opt.grid_config.empty()) {
        std::ifstream in(opt.grid_config);
        if (!in) throw IoError("cannot open grid config: " + opt.grid_config);
        json cfg;
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("malformed grid config: ") + e.what());
        }
        std::vector<DiracAtom> atoms;
        for (const auto& row : cfg.at("atoms"))
            atoms.push_back({row.at(0).get<double>(), row.at(1).get<long long>(),
                             row.at(2).get<long long>()});
        TestSuite suite;
        for (const auto& f : cfg.at("test_functions"))
            suite.functions.push_back(make_test_function(
                f.at("name").get<std::string>(), json_double(f, "param", 0.0)));
        double epsilon = cfg.at("epsilon").get<double>();
        std::function<bool(double)> allowed = [](double) { return true; };
        if (cfg.contains("allowed")) {
            const json& a = cfg["allowed"];
            std::string name = a.at("name").get<std::string>();
            if (name == "exclude_rationals") {
                int max_denominator = static_cast<int>(json_index(a, "q", 100));
                allowed = [max_denominator](double x) {
                    for (int q = 1; q <= max_denominator; ++q)
                        if (std::fabs(x * q - std::round(x * q)) < 1e-12) return false;
                    return true;
                };
            } else if (name != "all") {
                throw ConfigError("unknown allowed-set predicate: " + name);
            }
        }
        MetricKind metric = json_string(cfg, "metric", "interval") == "circle"
                                ? MetricKind::circle
                                : MetricKind::euclidean_interval;
        auto grid = build_grid(DiracMixture(atoms), suite, epsilon, allowed, opt.seed,
                               metric);
        if (opt.out.empty()) throw ConfigError("build needs --out");
        auto out = open_output(opt.out);
        write_grid_csv(out, grid);
        if (!opt.json_out.empty()) {
            json doc;
            doc["points"] = grid.size();
            doc["epsilon"] = epsilon;
            doc["gap"] = weakstar_gap(grid, suite);
            emit_json(doc, opt.json_out);
        }
        return 0;
    }

    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    std::optional<Observable> observable;
    if (!opt.observable_name.empty())
        observable = build_observable(opt, system, warnings);
    if (opt.out.empty()) throw ConfigError("build needs --out");
    auto out = open_output(opt.out);
    write_system_csv(out, system, observable ? &*observable : nullptr);
    if (!out) throw IoError("failed writing " + opt.out);
    if (!opt.json_out.empty()) emit_json(system_summary(opt, system, warnings), opt.json_out);
    return 0;
}

int run_means(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    if (opt.points.empty()) throw ConfigError("means needs --points");
    auto grid = parse_n_grid(opt.n_grid_spec, system.size());

    std::vector<MeanProfile> profiles;
    profiles.reserve(opt.points.size());
    for (Index x : opt.points) {
        if (x >= system.size()) throw ConfigError("point index out of range");
        profiles.push_back(mean_curve(system, f, x, grid));
    }
    if (opt.out.empty()) throw ConfigError("means needs --out");
    auto out = open_output(opt.out);
    write_means_csv(out, profiles);
    if (!out) throw IoError("failed writing " + opt.out);
    if (!opt.json_out.empty()) {
        json doc = system_summary(opt, system, warnings);
        doc["points"] = opt.points;
        doc["n_grid_size"] = grid.size();
        json finals = json::array();
        for (const MeanProfile& profile : profiles)
            finals.push_back(profile.samples.back().second);
        doc["final_means"] = finals;
        emit_json(doc, opt.json_out);
    }
    return 0;
}

int run_stabilize(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    double epsilon = opt.epsilon > 0.0 ? opt.epsilon : 0.1;
    double delta = opt.delta_param > 0.0 ? opt.delta_param : 0.05;
    auto sample = resolve_sample(opt, system.size());
    auto result = stabilization_scan(system, f, epsilon, delta, opt.n_min, sample);

    json doc = system_summary(opt, system, warnings);
    doc["epsilon"] = result.epsilon;
    doc["delta"] = result.delta;
    doc["n_min"] = result.n_min;
    doc["sample_size"] = sample.size();
    doc["plateau_length"] = result.plateau_length;
    doc["covered_fraction"] = result.covered_fraction;
    doc["found"] = result.found;
    emit_json(doc, opt.json_out);
    return 0;
}

int run_fluct(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    double epsilon = opt.epsilon > 0.0 ? opt.epsilon : 0.01;
    Index horizon = opt.horizon == 0 ? system.size() : opt.horizon;
    auto sample = resolve_sample(opt, system.size());
    auto report = fluctuation_report(system, f, epsilon, horizon, sample, thread_count());

    if (!opt.out.empty()) {
        auto out = open_output(opt.out);
        write_fluctuation_csv(out, report);
        if (!out) throw IoError("failed writing " + opt.out);
    }
    json doc = system_summary(opt, system, warnings);
    doc["epsilon"] = report.epsilon;
    doc["horizon"] = report.horizon;
    doc["sample_size"] = sample.size();
    doc["occupancy"] = report.occupancy;
    doc["occupancy_99_at"] = report.occupancy_threshold(0.99);
    emit_json(doc, opt.json_out);
    return 0;
}

int run_gap(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    if (opt.window_k == 0 || opt.window_l == 0)
        throw ConfigError("gap needs --K and --L");
    auto sample = resolve_sample(opt, system.size());
    double gap = mean_gap(system, f, opt.window_k, opt.window_l, sample);

    json doc = system_summary(opt, system, warnings);
    doc["K"] = opt.window_k;
    doc["L"] = opt.window_l;
    doc["sample_size"] = sample.size();
    doc["max_gap"] = gap;
    emit_json(doc, opt.json_out);
    return 0;
}

int run_tail(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    if (opt.thresholds.empty()) throw ConfigError("tail needs --thresholds");
    std::vector<double> masses;
    masses.reserve(opt.thresholds.size());
    for (double threshold : opt.thresholds) masses.push_back(tail_mass(f, threshold));

    if (opt.out.empty()) throw ConfigError("tail needs --out");
    auto out = open_output(opt.out);
    write_tail_csv(out, opt.thresholds, masses);
    if (!out) throw IoError("failed writing " + opt.out);
    if (!opt.json_out.empty()) emit_json(system_summary(opt, system, warnings), opt.json_out);
    return 0;
}

int run_approx(const Options& opt) {
    // grid
    std::vector<double> grid;
    if (!opt.grid_csv.empty()) {
        std::ifstream in(opt.grid_csv);
        if (!in) throw IoError("cannot open grid CSV: " + opt.grid_csv);
        grid = read_grid_csv(in);
    } else if (opt.grid_kind == "uniform") {
        if (opt.size_m == 0) throw ConfigError("approx needs --M for the uniform grid");
        grid = uniform_grid(opt.size_m);
    } else {
        throw ConfigError("unknown grid kind: " + opt.grid_kind);
    }

    // map
    MapSpec map;
    if (!opt.images_csv.empty()) {
        std::ifstream in(opt.images_csv);
        if (!in) throw IoError("cannot open images CSV: " + opt.images_csv);
        auto images = read_grid_csv(in);
        if (images.size() != grid.size())
            throw ConfigError("images CSV size differs from the grid");
        std::map<double, double> table;
        for (Index i = 0; i < grid.size(); ++i) table[grid[i]] = images[i];
        map.evaluator = [table](double x) {
            auto it = table.find(x);
            if (it == table.end())
                throw std::domain_error("tabulated map queried off its grid");
            return it->second;
        };
        map.continuity_note = "tabulated";
    } else if (opt.map_name == "identity") {
        map.evaluator = [](double x) { return x; };
        map.continuity_note = "continuous everywhere";
    } else if (opt.map_name == "rotation") {
        double alpha = opt.map_alpha;
        map.evaluator = [alpha](double x) { return wrap_unit(x + alpha); };
        map.continuity_note = "continuous as a circle map";
    } else {
        throw ConfigError("unknown map: '" + opt.map_name + "'");
    }

    if (opt.match_delta <= 0.0) throw ConfigError("approx needs --delta > 0");
    MetricKind metric = opt.metric_name == "interval" ? MetricKind::euclidean_interval
                                                      : MetricKind::circle;
    auto result = approximate_system(map, std::move(grid), opt.match_delta,
                                     opt.transitive, metric);

    if (opt.out.empty()) throw ConfigError("approx needs --out");
    auto out = open_output(opt.out);
    write_system_csv(out, result.system);
    if (!out) throw IoError("failed writing " + opt.out);

    json doc;
    doc["M"] = result.system.size();
    doc["delta"] = result.log.delta;
    doc["matched_fraction"] = result.log.matched_fraction;
    doc["matched_count"] = result.log.matched_count;
    doc["cycle_count"] = result.log.cycle_count;
    doc["mismatch_count"] = result.log.mismatch_count;
    doc["transitivized"] = result.log.transitivized;
    if (opt.error_epsilon > 0.0)
        doc["approx_error"] = approx_error(result.system, map, opt.error_epsilon);
    emit_json(doc, opt.json_out);
    return 0;
}

int run_verify(const Options& opt) {
    FiniteSystem system = build_system(opt);
    std::vector<std::string> warnings;
    Observable f = build_observable(opt, system, warnings);
    auto tol = [&](const std::string& name, double fallback) {
        auto it = opt.tolerances.find(name);
        return it == opt.tolerances.end() ? fallback : it->second;
    };

    json criteria = json::array();
    bool all_pass = true;
    auto record = [&](const std::string& name, bool pass, double observed, double bound) {
        json row;
        row["invariant"] = name;
        row["pass"] = pass;
        row["observed"] = observed;
        row["bound"] = bound;
        criteria.push_back(row);
        all_pass = all_pass && pass;
    };

    const Index m = system.size();
    auto sample = resolve_sample(opt, m);
    MeanCalculator calc(system, f);

    {  // permutation is a bijection and the cycles partition the points
        auto dec = cycle_decompose(system.perm);
        Index covered = 0;
        for (const auto& cyc : dec.cycles) covered += cyc.size();
        record("cycle_partition", covered == m, double(covered), double(m));

        bool periods_ok = true;
        for (Index x : sample) {
            Index p = period(system.perm, x);
            bool found = false;
            for (const auto& cyc : dec.cycles)
                if (std::find(cyc.begin(), cyc.end(), x) != cyc.end())
                    found = (cyc.size() == p);
            periods_ok = periods_ok && found;
        }
        record("period_matches_cycle_length", periods_ok, periods_ok ? 1.0 : 0.0, 1.0);
    }

    const bool transitive = is_transitive(system.perm);
    if (transitive) {
        double worst = 0.0;
        double av = global_average(f);
        for (Index x : sample) {
            worst = std::max(worst, std::fabs(calc.mean(x, m) - av));
            worst = std::max(worst, std::fabs(orbit_average(system, f, x) - av));
        }
        double bound = tol("full_cycle_identity", 1e-12);
        record("full_cycle_identity", worst <= bound, worst, bound);
    }

    {  // Av(|A_n|) <= Av(|F|)
        double av_abs = tail_mass(f, 0.0);
        double slack = tol("mean_of_means_slack", 1e-12);
        bool ok = true;
        double worst = 0.0;
        for (Index n : {Index{2}, Index{17}, std::max<Index>(2, m / 2)}) {
            KahanAccumulator acc;
            for (Index x = 0; x < m; ++x) acc.add(std::fabs(calc.mean(x, n)));
            double value = acc.value() / double(m);
            worst = std::max(worst, value - av_abs);
            ok = ok && value <= av_abs + slack;
        }
        record("mean_of_means_bound", ok, worst, slack);
    }

    {  // |A_n(Tx) - A_n(x)| <= 2 max|F| / n
        double max_abs = 0.0;
        for (double v : f.values) max_abs = std::max(max_abs, std::fabs(v));
        double slack = tol("shift_bound_slack", 1e-12);
        bool ok = true;
        double worst = 0.0;
        for (Index n : {Index{2}, Index{17}, std::max<Index>(2, m / 2)}) {
            double bound = 2.0 * max_abs / double(n);
            for (Index x : sample) {
                double diff = std::fabs(calc.mean(system.perm[x], n) - calc.mean(x, n));
                worst = std::max(worst, diff - bound);
                ok = ok && diff <= bound + slack;
            }
        }
        record("shift_identity_bound", ok, worst, slack);
    }

    {  // tail_mass at zero is the mean magnitude
        KahanAccumulator acc;
        for (double v : f.values) acc.add(std::fabs(v));
        double observed = std::fabs(tail_mass(f, 0.0) - acc.value() / double(m));
        double bound = tol("tail_at_zero", 1e-12);
        record("tail_mass_at_zero", observed <= bound, observed, bound);
    }

    if (system.metric == MetricKind::circle) {
        bool ok = true;
        for (double c : system.embedding) ok = ok && c >= 0.0 && c < 1.0;
        record("circle_coordinates_in_range", ok, ok ? 1.0 : 0.0, 1.0);
    }

    json doc = system_summary(opt, system, warnings);
    doc["criteria"] = criteria;
    doc["passed"] = all_pass;
    emit_json(doc, opt.json_out);
    return all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite permutation approximations of measure-preserving systems "
                 "and their Birkhoff ergodic means"};
    app.require_subcommand(1);

    Options opt;
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config; flags override it");
        cmd->add_option("--seed", opt.seed, "RNG seed (default 0)");
        cmd->add_option("--out", opt.out, "CSV artifact path");
        cmd->add_option("--json-out", opt.json_out, "JSON summary path (default stdout)");
        cmd->add_option("--system", opt.system_name,
                        "rotation | rotation_irrational | bernoulli_block | bernoulli_debruijn");
        cmd->add_option("--M", opt.size_m, "system size / grid size");
        cmd->add_option("--N", opt.step_n, "rotation step or Bernoulli window radius");
        cmd->add_option("--alpha", opt.alpha, "irrational rotation angle in (0,1)");
        cmd->add_option("--M-max", opt.m_max, "largest convergent denominator");
        cmd->add_option("--m", opt.alphabet, "symbol alphabet size");
        cmd->add_option("--observable", opt.observable_name,
                        "delta | block | coordinate | cylinder | continuous");
        cmd->add_option("--K", opt.block_k, "block length for the block observable");
        cmd->add_option("--pattern", opt.pattern, "cylinder pattern, e.g. -1:0,0:1");
        cmd->add_option("--function", opt.function_name,
                        "registered function for continuous observables");
        cmd->add_option("--param", opt.function_param, "registered function parameter");
        cmd->add_option("--sample-size", opt.sample_size,
                        "sampled points (0 = full population, default 256)");
        return cmd;
    };

    auto* build_cmd = add_common(app.add_subcommand("build", "emit a system CSV or a measure grid"));
    build_cmd->add_option("--grid-config", opt.grid_config,
                          "JSON mixture/suite config for grid construction");

    auto* means_cmd = add_common(app.add_subcommand("means", "ergodic mean curves"));
    means_cmd->add_option("--points", [&opt](const std::vector<std::string>& vals) {
        for (const auto& v : vals) {
            std::istringstream in(v);
            std::string item;
            while (std::getline(in, item, ',')) {
                try {
                    opt.points.push_back(std::stoul(item));
                } catch (const std::exception&) {
                    throw ConfigError("--points expects comma-separated indices, got '" +
                                      item + "'");
                }
            }
        }
        return true;
    }, "comma-separated base point indices");
    means_cmd->add_option("--n-grid", opt.n_grid_spec,
                          "log:lo:hi:count | lin:lo:hi:count | comma list");

    auto* stab_cmd = add_common(app.add_subcommand("stabilize", "plateau scan"));
    stab_cmd->add_option("--epsilon", opt.epsilon, "mean oscillation tolerance");
    stab_cmd->add_option("--delta", opt.delta_param, "allowed fraction of moving points");
    stab_cmd->add_option("--n-min", opt.n_min, "smallest window length (default 16)");

    auto* fluct_cmd = add_common(app.add_subcommand("fluct", "fluctuation statistics"));
    fluct_cmd->add_option("--epsilon", opt.epsilon, "fluctuation size");
    fluct_cmd->add_option("--horizon", opt.horizon, "mean sequence length (default M)");

    auto* gap_cmd = add_common(app.add_subcommand("gap", "max |A_K - A_L| over a sample"));
    gap_cmd->add_option("--window-K", opt.window_k, "first window length");
    gap_cmd->add_option("--window-L", opt.window_l, "second window length");

    auto* tail_cmd = add_common(app.add_subcommand("tail", "uniform-integrability tail mass"));
    tail_cmd->add_option("--thresholds", [&opt](const std::vector<std::string>& vals) {
        for (const auto& v : vals) {
            std::istringstream in(v);
            std::string item;
            while (std::getline(in, item, ',')) {
                try {
                    opt.thresholds.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw ConfigError("--thresholds expects comma-separated numbers, got '" +
                                      item + "'");
                }
            }
        }
        return true;
    }, "comma-separated thresholds");

    auto* approx_cmd = add_common(app.add_subcommand("approx", "map approximation pipeline"));
    approx_cmd->add_option("--map", opt.map_name, "identity | rotation");
    approx_cmd->add_option("--map-alpha", opt.map_alpha, "rotation angle");
    approx_cmd->add_option("--images-csv", opt.images_csv, "tabulated images CSV");
    approx_cmd->add_option("--grid-kind", opt.grid_kind, "uniform (default)");
    approx_cmd->add_option("--grid-csv", opt.grid_csv, "grid CSV instead of uniform");
    approx_cmd->add_option("--delta", opt.match_delta, "matching tolerance");
    approx_cmd->add_flag("--transitive", opt.transitive, "concatenate cycles afterwards");
    approx_cmd->add_option("--metric", opt.metric_name, "circle (default) | interval");
    approx_cmd->add_option("--error-epsilon", opt.error_epsilon,
                           "also report approx_error at this epsilon");

    add_common(app.add_subcommand("verify", "invariant suite; exit 2 on failure"));

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help
            app.exit(e);
            return 3;
        }

        Options flag_values = opt;  // flags already applied by CLI11
        if (!config_path.empty()) {
            // config supplies defaults; re-apply explicitly passed flags on top
            Options from_config;
            load_config(from_config, config_path);
            Options merged = from_config;
            CLI::App* sub = app.get_subcommands().front();
            auto passed = [&](const std::string& flag) {
                const CLI::Option* option = sub->get_option_no_throw(flag);
                return option != nullptr && option->count() > 0;
            };
            if (passed("--seed")) merged.seed = flag_values.seed;
            if (passed("--out")) merged.out = flag_values.out;
            if (passed("--json-out")) merged.json_out = flag_values.json_out;
            if (passed("--system")) merged.system_name = flag_values.system_name;
            if (passed("--M")) merged.size_m = flag_values.size_m;
            if (passed("--N")) merged.step_n = flag_values.step_n;
            if (passed("--alpha")) merged.alpha = flag_values.alpha;
            if (passed("--M-max")) merged.m_max = flag_values.m_max;
            if (passed("--m")) merged.alphabet = flag_values.alphabet;
            if (passed("--observable")) merged.observable_name = flag_values.observable_name;
            if (passed("--K")) merged.block_k = flag_values.block_k;
            if (passed("--pattern")) merged.pattern = flag_values.pattern;
            if (passed("--function")) merged.function_name = flag_values.function_name;
            if (passed("--param")) merged.function_param = flag_values.function_param;
            if (passed("--sample-size")) merged.sample_size = flag_values.sample_size;
            if (!flag_values.points.empty()) merged.points = flag_values.points;
            if (!flag_values.n_grid_spec.empty()) merged.n_grid_spec = flag_values.n_grid_spec;
            if (sub->get_name() == "stabilize" || sub->get_name() == "fluct") {
                if (passed("--epsilon")) merged.epsilon = flag_values.epsilon;
                if (passed("--delta")) merged.delta_param = flag_values.delta_param;
                if (passed("--n-min")) merged.n_min = flag_values.n_min;
                if (passed("--horizon")) merged.horizon = flag_values.horizon;
            }
            if (sub->get_name() == "gap") {
                if (passed("--window-K")) merged.window_k = flag_values.window_k;
                if (passed("--window-L")) merged.window_l = flag_values.window_l;
            }
            if (!flag_values.thresholds.empty()) merged.thresholds = flag_values.thresholds;
            if (sub->get_name() == "approx") {
                if (passed("--map")) merged.map_name = flag_values.map_name;
                if (passed("--map-alpha")) merged.map_alpha = flag_values.map_alpha;
                if (passed("--images-csv")) merged.images_csv = flag_values.images_csv;
                if (passed("--grid-kind")) merged.grid_kind = flag_values.grid_kind;
                if (passed("--grid-csv")) merged.grid_csv = flag_values.grid_csv;
                if (passed("--delta")) merged.match_delta = flag_values.match_delta;
                if (passed("--transitive")) merged.transitive = flag_values.transitive;
                if (passed("--metric")) merged.metric_name = flag_values.metric_name;
                if (passed("--error-epsilon")) merged.error_epsilon = flag_values.error_epsilon;
            }
            if (passed("--grid-config")) merged.grid_config = flag_values.grid_config;
            opt = merged;
        }

        const std::string& cmd = app.get_subcommands().front()->get_name();
        if (cmd == "build") return run_build(opt);
        if (cmd == "means") return run_means(opt);
        if (cmd == "stabilize") return run_stabilize(opt);
        if (cmd == "fluct") return run_fluct(opt);
        if (cmd == "gap") return run_gap(opt);
        if (cmd == "tail") return run_tail(opt);
        if (cmd == "approx") return run_approx(opt);
        if (cmd == "verify") return run_verify(opt);
        throw ConfigError("unknown subcommand");
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::length_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ConstructionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
