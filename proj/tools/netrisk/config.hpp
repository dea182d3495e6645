#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <netrisk/netrisk.hpp>

namespace netrisk::cli {

struct InputConfig {
    std::optional<std::filesystem::path> csv;
    std::optional<SynthesisOptions> synth;
    // Synthetic sheet seed when it should differ from the run seed.
    std::optional<std::uint64_t> synth_seed;
};

struct TopologyConfig {
    std::optional<double> z;
    std::optional<double> density;
    double phi = 1.0;
    bool self_loops = true;
    std::optional<BlockKind> block;
    double mixing = 1.0;
    std::optional<Partition> partition;  // nullopt = random equal split
    // Pre-built edge list (sidecar: same path with .json) used instead of sampling.
    std::optional<std::filesystem::path> network;
};

struct SweepConfig {
    std::optional<Recipe> recipe;
    std::vector<double> rho;
    std::vector<double> theta;
    std::vector<double> alpha;
    std::vector<double> phi;
    std::vector<double> mixing;
    std::optional<BlockKind> block;
    std::optional<double> fixed_z;
    std::size_t replicates = 10;
    std::optional<Group> measure;
};

struct RunConfig {
    InputConfig input;
    TopologyConfig topology;
    DynamicsParams dynamics;
    std::optional<ShockProtocol> shock;
    std::optional<Group> measure;  // run: restrict e_loss_star
    SweepConfig sweep;
    std::optional<std::filesystem::path> out_dir;
    bool dump_trajectory = false;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

// Declarative key-value file: top-level `seed`, sections [input], [topology],
// [dynamics], [shock], [sweep], [output]. Relative paths resolve against the
// config file's directory. A `.json` path is read as a sweep manifest.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_ini_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig parse_manifest(const std::string& text);

// Grid syntax: "a,b,c" or "start:stop:step"; `inf` accepted where allowed.
std::vector<double> parse_grid(const std::string& text, const std::string& field, bool allow_inf = false);

BalanceSheet load_balance_sheet(const RunConfig& config);
TopologySpec make_topology(const RunConfig& config, std::size_t n);
SweepPlan make_sweep_plan(const RunConfig& config);

// Full plan + input + software version; reading it back reproduces the sweep.
std::string format_manifest(const RunConfig& config, const SweepPlan& resolved_plan, Recipe recipe);

}  // namespace netrisk::cli
