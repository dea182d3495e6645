#include "netrisk/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace netrisk::cli {

namespace {

std::uint64_t require_seed(const RunConfig& config) {
    if (!config.seed) {
        throw ValidationError("seed: no seed given (use --seed or a top-level seed key)");
    }
    return *config.seed;
}

const std::filesystem::path& require_out(const RunConfig& config) {
    if (!config.out_dir) {
        throw ValidationError("output.dir: no output directory given (use --out or [output] dir)");
    }
    return *config.out_dir;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << text;
        if (!out) throw IoError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move output into place at '" + path.string() + "'");
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& overrides) {
    if (overrides.seed) config.seed = overrides.seed;
    if (overrides.out_dir) config.out_dir = overrides.out_dir;
    if (overrides.threads) config.threads = *overrides.threads;
    if (overrides.recipe) config.sweep.recipe = overrides.recipe;
}

void cmd_generate(const RunConfig& config, std::ostream& out) {
    const auto seed = require_seed(config);
    const auto& dir = require_out(config);
    const auto sheet = load_balance_sheet(config);
    const auto spec = make_topology(config, sheet.size());
    const auto net = sample(sheet, spec, seed);
    ensure_dir(dir);
    write_network(net, dir, "network");
    out << "wrote " << (dir / "network.csv").string() << " and " << (dir / "network.json").string() << "\n"
        << "nodes = " << net.size() << "\n"
        << "links = " << net.weights.count_nonzero() << "\n"
        << "z = " << std::setprecision(17) << net.provenance.z << "\n"
        << "density = " << realized_density(net, spec.allow_self_loops) << "\n";
}

void cmd_run(const RunConfig& config, std::ostream& out) {
    if (!config.shock) {
        throw ValidationError("shock.kind: a [shock] section is required for run");
    }
    const auto sheet = load_balance_sheet(config);

    WeightedNetwork net;
    std::optional<Partition> partition = config.topology.partition;
    if (config.topology.network) {
        const auto& edges = *config.topology.network;
        auto sidecar = edges;
        sidecar.replace_extension(".json");
        for (const auto& p : {edges, sidecar}) {
            if (!std::filesystem::exists(p)) throw IoError("topology.network: file not found: " + p.string());
        }
        net = load_network(edges, sidecar);
        if (net.size() != sheet.size()) {
            throw ValidationError("topology.network: network has " + std::to_string(net.size()) +
                                  " nodes but the balance sheet has " + std::to_string(sheet.size()));
        }
    } else {
        const auto spec = make_topology(config, sheet.size());
        net = sample(sheet, spec, require_seed(config));
    }
    if (net.provenance.block) {
        partition = net.provenance.block->partition;
    }
    const bool needs_partition = config.shock->kind == ShockKind::group_uniform || config.measure.has_value();
    if (needs_partition && !partition) {
        partition = random_partition(sheet.size(), require_seed(config));
    }

    config.dynamics.validate();
    const auto shock = make_shock(*config.shock, sheet, partition ? &*partition : nullptr);
    const auto traj = run(net, sheet, shock, config.dynamics);
    const double loss = equity_loss(traj, sheet);
    std::optional<double> loss_star;
    if (config.measure) {
        const auto group = members(*partition, *config.measure);
        loss_star = equity_loss(traj, sheet, group);
    }

    out << std::setprecision(17);
    out << "e_loss = " << loss << "\n";
    if (loss_star) out << "e_loss_star = " << *loss_star << "\n";
    out << "iterations = " << traj.iterations << "\n"
        << "converged = " << (traj.converged ? "true" : "false") << "\n"
        << "final_cond = " << traj.final_cond << "\n";

    if (config.dump_trajectory && !config.out_dir) {
        throw ValidationError("output.trajectory: needs an output directory");
    }
    if (config.out_dir) {
        ensure_dir(*config.out_dir);
        nlohmann::json report;
        report["e_loss"] = loss;
        report["e_loss_star"] = loss_star ? nlohmann::json(*loss_star) : nlohmann::json(nullptr);
        report["iterations"] = traj.iterations;
        report["converged"] = traj.converged;
        report["final_cond"] = traj.final_cond;
        report["alpha"] = std::isinf(config.dynamics.alpha) ? nlohmann::json("inf") : nlohmann::json(config.dynamics.alpha);
        if (config.dump_trajectory) {
            write_trajectory_csv(traj, sheet, *config.out_dir / "trajectory.csv");
        }
        write_text(*config.out_dir / "report.json", report.dump(2) + "\n");
    }
}

void cmd_sweep(const RunConfig& config, std::ostream& out) {
    if (!config.sweep.recipe) {
        throw ValidationError("sweep.recipe: no recipe given (use --recipe fig1|fig2|fig3|fig4)");
    }
    const auto recipe = *config.sweep.recipe;
    const auto& dir = require_out(config);
    const auto sheet = load_balance_sheet(config);
    const auto plan = prepare_plan(recipe, make_sweep_plan(config));
    const auto result = run_sweep(sheet, plan, recipe_shock(recipe), recipe);

    ensure_dir(dir);
    write_sweep_csv(result, dir / "sweep.csv");
    write_text(dir / "manifest.json", format_manifest(config, plan, recipe));

    std::size_t censored = 0;
    for (const auto& r : result.records) {
        if (!r.converged) ++censored;
    }
    out << "recipe = " << to_string(recipe) << "\n"
        << "records = " << result.records.size() << "\n"
        << "censored = " << censored << "\n"
        << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "manifest.json").string() << "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthetic interbank networks and DebtRank stress testing", "netrisk"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    std::string config_path;
    Overrides overrides;
    std::string recipe_text;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Key-value config file (or a sweep manifest .json)")->required();
        cmd->add_option("--seed", overrides.seed, "Random seed; overrides the config");
        cmd->add_option("--out", overrides.out_dir, "Output directory; overrides the config");
        cmd->add_option("--threads", overrides.threads, "Worker threads for sweeps");
    };
    auto* generate = app.add_subcommand("generate", "Sample one network and write edge list + provenance");
    auto* run_cmd = app.add_subcommand("run", "Run one contagion simulation and report the equity loss");
    auto* sweep = app.add_subcommand("sweep", "Run a recipe parameter sweep (fig1..fig4)");
    for (auto* cmd : {generate, run_cmd, sweep}) add_common(cmd);
    sweep->add_option("--recipe", recipe_text, "fig1|fig2|fig3|fig4")
        ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (!recipe_text.empty()) overrides.recipe = parse_recipe(recipe_text);
        auto config = load_config(config_path);
        apply_overrides(config, overrides);
        if (generate->parsed()) {
            cmd_generate(config, out);
        } else if (run_cmd->parsed()) {
            cmd_run(config, out);
        } else {
            cmd_sweep(config, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace netrisk::cli
