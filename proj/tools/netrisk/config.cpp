#include "netrisk/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

namespace netrisk::cli {

namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string trimmed(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& text, const std::string& field, bool allow_inf = false) {
    const auto t = trimmed(text);
    if (allow_inf && (t == "inf" || t == "infinity")) {
        return kInfiniteAlpha;
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(v)) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(field + ": '" + t + "' is not a number");
    }
}

std::uint64_t to_uint(const std::string& text, const std::string& field) {
    const auto t = trimmed(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        throw ValidationError(field + ": '" + t + "' is not a non-negative integer");
    }
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ValidationError(field + ": '" + t + "' is out of range");
    }
}

bool to_bool(const std::string& text, const std::string& field) {
    const auto t = trimmed(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ValidationError(field + ": '" + t + "' is not a boolean");
}

Group to_group(const std::string& text, const std::string& field) {
    const auto t = trimmed(text);
    if (t == "1") return Group::first;
    if (t == "2") return Group::second;
    throw ValidationError(field + ": group must be 1 or 2");
}

std::optional<Group> to_measure(const std::string& text, const std::string& field) {
    if (trimmed(text) == "all") return std::nullopt;
    return to_group(text, field);
}

Partition to_partition(const std::string& text, const std::string& field) {
    Partition out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(to_group(item, field));
    }
    return out;
}

template <typename Fn>
auto wrap(const std::string& field, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(field, 0) == 0) throw;
        throw ValidationError(field + ": " + what);
    }
}

std::filesystem::path resolve_path(const std::string& value, const std::filesystem::path& base_dir) {
    std::filesystem::path p(trimmed(value));
    return p.is_absolute() ? p : base_dir / p;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"seed", "threads"}},
        {"input", {"csv", "synth_n", "synth_tail_exponent", "synth_equity_ratio", "synth_seed"}},
        {"topology", {"z", "density", "phi", "self_loops", "block", "mixing", "partition", "network"}},
        {"dynamics", {"alpha", "tol", "max_iter"}},
        {"shock", {"kind", "theta", "target", "measure"}},
        {"sweep", {"recipe", "rho", "theta", "alpha", "phi", "mixing", "block", "fixed_z", "replicates", "measure"}},
        {"output", {"dir", "trajectory"}},
    };
    return keys;
}

void check_keys(const pt::ptree& tree) {
    const auto& known = known_keys();
    for (const auto& [key, child] : tree) {
        if (child.empty()) {
            if (!known.at("").contains(key)) {
                throw ValidationError("config: unknown top-level key '" + key + "'");
            }
            continue;
        }
        const auto section = known.find(key);
        if (section == known.end() || key.empty()) {
            throw ValidationError("config: unknown section [" + key + "]");
        }
        for (const auto& [name, value] : child) {
            if (!section->second.contains(name)) {
                throw ValidationError("config: unknown key '" + key + "." + name + "'");
            }
        }
    }
}

}  // namespace

std::vector<double> parse_grid(const std::string& text, const std::string& field, bool allow_inf) {
    const auto t = trimmed(text);
    if (t.empty()) {
        throw ValidationError(field + ": grid is empty");
    }
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream in(t);
        std::string item;
        while (std::getline(in, item, ':')) parts.push_back(item);
        if (parts.size() != 3) {
            throw ValidationError(field + ": range grid must be start:stop:step");
        }
        return wrap(field, [&] {
            return linear_grid(to_double(parts[0], field), to_double(parts[1], field), to_double(parts[2], field));
        });
    }
    std::vector<double> out;
    std::stringstream in(t);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(to_double(item, field, allow_inf));
    }
    return out;
}

RunConfig parse_ini_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    check_keys(tree);

    RunConfig cfg;
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return trimmed(*v);
        return std::nullopt;
    };

    if (auto v = get("seed")) cfg.seed = to_uint(*v, "seed");
    if (auto v = get("threads")) cfg.threads = static_cast<unsigned>(to_uint(*v, "threads"));

    // [input]
    if (auto v = get("input.csv")) cfg.input.csv = resolve_path(*v, base_dir);
    const bool any_synth = get("input.synth_n") || get("input.synth_tail_exponent") || get("input.synth_equity_ratio");
    if (any_synth) {
        SynthesisOptions synth;
        if (auto v = get("input.synth_n")) synth.n = to_uint(*v, "input.synth_n");
        if (auto v = get("input.synth_tail_exponent")) synth.tail_exponent = to_double(*v, "input.synth_tail_exponent");
        if (auto v = get("input.synth_equity_ratio")) synth.equity_ratio = to_double(*v, "input.synth_equity_ratio");
        cfg.input.synth = synth;
    }
    if (auto v = get("input.synth_seed")) cfg.input.synth_seed = to_uint(*v, "input.synth_seed");

    // [topology]
    if (auto v = get("topology.z")) cfg.topology.z = to_double(*v, "topology.z");
    if (auto v = get("topology.density")) cfg.topology.density = to_double(*v, "topology.density");
    if (auto v = get("topology.phi")) cfg.topology.phi = to_double(*v, "topology.phi");
    if (auto v = get("topology.self_loops")) cfg.topology.self_loops = to_bool(*v, "topology.self_loops");
    if (auto v = get("topology.block"); v && *v != "none") {
        cfg.topology.block = wrap("topology.block", [&] { return parse_block_kind(*v); });
    }
    if (auto v = get("topology.mixing")) cfg.topology.mixing = to_double(*v, "topology.mixing");
    if (auto v = get("topology.partition"); v && *v != "random") {
        cfg.topology.partition = to_partition(*v, "topology.partition");
    }
    if (auto v = get("topology.network")) cfg.topology.network = resolve_path(*v, base_dir);

    // [dynamics]
    if (auto v = get("dynamics.alpha")) cfg.dynamics.alpha = to_double(*v, "dynamics.alpha", true);
    if (auto v = get("dynamics.tol")) cfg.dynamics.tol = to_double(*v, "dynamics.tol");
    if (auto v = get("dynamics.max_iter")) cfg.dynamics.max_iter = to_uint(*v, "dynamics.max_iter");

    // [shock]
    if (auto kind = get("shock.kind")) {
        ShockProtocol shock;
        shock.kind = wrap("shock.kind", [&] { return parse_shock_kind(*kind); });
        if (auto v = get("shock.theta")) shock.theta = to_double(*v, "shock.theta");
        if (auto v = get("shock.target")) {
            if (shock.kind == ShockKind::group_uniform) {
                shock.target_group = to_group(*v, "shock.target");
            } else {
                shock.target_bank = to_uint(*v, "shock.target");
            }
        }
        cfg.shock = shock;
    }
    if (auto v = get("shock.measure")) cfg.measure = to_measure(*v, "shock.measure");

    // [sweep]
    auto& sw = cfg.sweep;
    if (auto v = get("sweep.recipe")) sw.recipe = wrap("sweep.recipe", [&] { return parse_recipe(*v); });
    if (auto v = get("sweep.rho")) sw.rho = parse_grid(*v, "sweep.rho");
    if (auto v = get("sweep.theta")) sw.theta = parse_grid(*v, "sweep.theta");
    if (auto v = get("sweep.alpha")) sw.alpha = parse_grid(*v, "sweep.alpha", true);
    if (auto v = get("sweep.phi")) sw.phi = parse_grid(*v, "sweep.phi");
    if (auto v = get("sweep.mixing")) sw.mixing = parse_grid(*v, "sweep.mixing");
    if (auto v = get("sweep.block"); v && *v != "none") {
        sw.block = wrap("sweep.block", [&] { return parse_block_kind(*v); });
    }
    if (auto v = get("sweep.fixed_z")) sw.fixed_z = to_double(*v, "sweep.fixed_z");
    if (auto v = get("sweep.replicates")) sw.replicates = to_uint(*v, "sweep.replicates");
    if (auto v = get("sweep.measure")) sw.measure = to_measure(*v, "sweep.measure");

    // [output]
    if (auto v = get("output.dir")) cfg.out_dir = resolve_path(*v, base_dir);
    if (auto v = get("output.trajectory")) cfg.dump_trajectory = to_bool(*v, "output.trajectory");
    return cfg;
}

namespace {

json grid_json(const std::vector<double>& grid) {
    json out = json::array();
    for (double v : grid) {
        if (std::isinf(v)) {
            out.push_back("inf");
        } else {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<double> grid_from_json(const json& node, const std::string& field) {
    std::vector<double> out;
    for (const auto& v : node) {
        if (v.is_string()) {
            if (v.get<std::string>() != "inf") throw ValidationError(field + ": unexpected string in grid");
            out.push_back(kInfiniteAlpha);
        } else {
            out.push_back(v.get<double>());
        }
    }
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json group_json(const std::optional<Group>& g) {
    return g ? json(static_cast<int>(*g)) : json("all");
}

std::optional<Group> group_from_json(const json& node, const std::string& field) {
    if (node.is_string() && node.get<std::string>() == "all") return std::nullopt;
    return to_group(std::to_string(node.get<int>()), field);
}

}  // namespace

std::string format_manifest(const RunConfig& config, const SweepPlan& plan, Recipe recipe) {
    json doc;
    doc["software"] = "netrisk";
    doc["version"] = version();
    doc["command"] = "sweep";
    doc["recipe"] = std::string(to_string(recipe));
    doc["seed"] = plan.base_seed;

    json input;
    if (config.input.csv) {
        input["csv"] = std::filesystem::absolute(*config.input.csv).lexically_normal().string();
    } else if (config.input.synth) {
        const auto& s = *config.input.synth;
        input["synth_n"] = s.n;
        input["synth_tail_exponent"] = s.tail_exponent;
        input["synth_equity_ratio"] = s.equity_ratio;
        input["synth_seed"] = config.input.synth_seed.value_or(plan.base_seed);
    }
    doc["input"] = input;

    json sweep;
    sweep["rho"] = grid_json(plan.rho);
    sweep["theta"] = grid_json(plan.theta);
    sweep["alpha"] = grid_json(plan.alpha);
    sweep["phi"] = grid_json(plan.phi);
    sweep["mixing"] = grid_json(plan.mixing);
    sweep["block"] = plan.block ? std::string(to_string(*plan.block)) : std::string("none");
    sweep["fixed_z"] = optional_number(plan.fixed_z);
    sweep["self_loops"] = plan.allow_self_loops;
    sweep["replicates"] = plan.replicates;
    sweep["measure"] = group_json(plan.measure_group);
    if (plan.partition) {
        json groups = json::array();
        for (auto g : *plan.partition) groups.push_back(static_cast<int>(g));
        sweep["partition"] = groups;
    } else {
        sweep["partition"] = "random";
    }
    doc["sweep"] = sweep;
    doc["dynamics"] = {{"tol", plan.tol}, {"max_iter", plan.max_iter}};
    return doc.dump(2) + "\n";
}

RunConfig parse_manifest(const std::string& text) {
    RunConfig cfg;
    try {
        const auto doc = json::parse(text);
        cfg.seed = doc.at("seed").get<std::uint64_t>();
        cfg.sweep.recipe = parse_recipe(doc.at("recipe").get<std::string>());
        const auto& input = doc.at("input");
        if (input.contains("csv")) {
            cfg.input.csv = std::filesystem::path(input.at("csv").get<std::string>());
        } else {
            SynthesisOptions s;
            s.n = input.at("synth_n").get<std::size_t>();
            s.tail_exponent = input.at("synth_tail_exponent").get<double>();
            s.equity_ratio = input.at("synth_equity_ratio").get<double>();
            cfg.input.synth = s;
            cfg.input.synth_seed = input.at("synth_seed").get<std::uint64_t>();
        }
        const auto& sweep = doc.at("sweep");
        cfg.sweep.rho = grid_from_json(sweep.at("rho"), "sweep.rho");
        cfg.sweep.theta = grid_from_json(sweep.at("theta"), "sweep.theta");
        cfg.sweep.alpha = grid_from_json(sweep.at("alpha"), "sweep.alpha");
        cfg.sweep.phi = grid_from_json(sweep.at("phi"), "sweep.phi");
        cfg.sweep.mixing = grid_from_json(sweep.at("mixing"), "sweep.mixing");
        const auto block = sweep.at("block").get<std::string>();
        if (block != "none") cfg.sweep.block = parse_block_kind(block);
        if (!sweep.at("fixed_z").is_null()) cfg.sweep.fixed_z = sweep.at("fixed_z").get<double>();
        cfg.topology.self_loops = sweep.at("self_loops").get<bool>();
        cfg.sweep.replicates = sweep.at("replicates").get<std::size_t>();
        cfg.sweep.measure = group_from_json(sweep.at("measure"), "sweep.measure");
        const auto& partition = sweep.at("partition");
        if (partition.is_array()) {
            Partition p;
            for (const auto& g : partition) p.push_back(to_group(std::to_string(g.get<int>()), "sweep.partition"));
            cfg.topology.partition = p;
        }
        cfg.dynamics.tol = doc.at("dynamics").at("tol").get<double>();
        cfg.dynamics.max_iter = doc.at("dynamics").at("max_iter").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    const auto text = read_text(path);
    if (path.extension() == ".json") {
        return parse_manifest(text);
    }
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_ini_config(text, base);
}

BalanceSheet load_balance_sheet(const RunConfig& config) {
    const auto& in = config.input;
    if (in.csv.has_value() == in.synth.has_value()) {
        throw ValidationError("input: exactly one of input.csv and input.synth_* must be given");
    }
    if (in.csv) {
        if (!std::filesystem::exists(*in.csv)) {
            throw IoError("input.csv: file not found: " + in.csv->string());
        }
        const auto sheet = load_csv(*in.csv);
        return sheet.closed() ? sheet : close_system(sheet);
    }
    auto synth = *in.synth;
    if (in.synth_seed) {
        synth.seed = *in.synth_seed;
    } else if (config.seed) {
        synth.seed = *config.seed;
    } else {
        throw ValidationError("seed: no seed given (use --seed or a top-level seed key)");
    }
    return wrap("input.synth", [&] { return synthesize(synth); });
}

TopologySpec make_topology(const RunConfig& config, std::size_t n) {
    const auto& t = config.topology;
    TopologySpec spec;
    spec.z = t.z;
    spec.target_density = t.density;
    spec.phi = t.phi;
    spec.allow_self_loops = t.self_loops;
    if (t.block) {
        if (!config.seed && !t.partition) {
            throw ValidationError("seed: no seed given (use --seed or a top-level seed key)");
        }
        spec.block = BlockSpec{*t.block, t.mixing, t.partition ? *t.partition : random_partition(n, *config.seed)};
    }
    wrap("topology", [&] {
        spec.validate(n);
        return 0;
    });
    return spec;
}

SweepPlan make_sweep_plan(const RunConfig& config) {
    if (!config.seed) {
        throw ValidationError("seed: no seed given (use --seed or a top-level seed key)");
    }
    const auto& sw = config.sweep;
    SweepPlan plan;
    plan.rho = sw.rho;
    plan.theta = sw.theta;
    plan.alpha = sw.alpha;
    plan.phi = sw.phi;
    plan.mixing = sw.mixing;
    plan.block = sw.block;
    plan.fixed_z = sw.fixed_z;
    plan.allow_self_loops = config.topology.self_loops;
    plan.partition = config.topology.partition;
    plan.replicates = sw.replicates;
    plan.base_seed = *config.seed;
    plan.measure_group = sw.measure;
    plan.tol = config.dynamics.tol;
    plan.max_iter = config.dynamics.max_iter;
    plan.threads = config.threads == 0 ? 1 : config.threads;
    if (plan.replicates < 1) {
        throw ValidationError("sweep.replicates: must be >= 1");
    }
    return plan;
}

}  // namespace netrisk::cli
