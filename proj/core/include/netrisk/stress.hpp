#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "netrisk/balance_sheet.hpp"
#include "netrisk/contagion.hpp"
#include "netrisk/netgen.hpp"

namespace netrisk {

enum class ShockKind { uniform, single_default, group_uniform };

std::string_view to_string(ShockKind kind) noexcept;
ShockKind parse_shock_kind(std::string_view text);

struct ShockProtocol {
    ShockKind kind = ShockKind::uniform;
    std::optional<double> theta;
    std::optional<std::size_t> target_bank;
    std::optional<Group> target_group;

    static ShockProtocol uniform(double theta);
    static ShockProtocol single_default(std::size_t bank);
    static ShockProtocol group_uniform(Group group, double theta);

    void validate() const;
};

// uniform: theta everywhere; single_default: 1 at the target; group_uniform:
// theta on the target group. `partition` is required for group_uniform.
ShockVector make_shock(const ShockProtocol& protocol, std::size_t n, const Partition* partition = nullptr);
ShockVector make_shock(const ShockProtocol& protocol, const BalanceSheet& sheet,
                       const Partition* partition = nullptr);

// Called once per contagion run; calls are serialized by the caller.
using TrajectoryObserver = std::function<void(const Trajectory&, const DynamicsParams&)>;

struct EnsembleRow {
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double e_loss = 0.0;
    // Loss restricted to the measured group; equals e_loss when measuring all banks.
    double e_loss_star = 0.0;
    double realized_density = 0.0;
    bool converged = false;
    std::size_t iterations = 0;
};

struct LossSummary {
    double mean = 0.0;
    // Standard error of the mean; 0 for a single replicate.
    double stderr_mean = 0.0;
};

LossSummary summarize(std::span<const double> values);

struct EnsembleResult {
    std::vector<EnsembleRow> rows;
    LossSummary e_loss;
    LossSummary e_loss_star;
};

struct EnsembleOptions {
    // nullopt measures all banks.
    std::optional<Group> measure_group;
    TrajectoryObserver observer;
};

// Replicate k samples its network with seed base_seed + k.
EnsembleResult run_ensemble(const BalanceSheet& sheet, const TopologySpec& spec, const ShockProtocol& protocol,
                            const DynamicsParams& params, std::size_t replicates, std::uint64_t base_seed,
                            const EnsembleOptions& options = {});

enum class Recipe { density_shock, alpha, phi, blocks };

std::string_view to_string(Recipe recipe) noexcept;  // fig1..fig4
Recipe parse_recipe(std::string_view text);

// Parameter grids. Axes a recipe fixes are overwritten by that recipe.
struct SweepPlan {
    std::vector<double> rho;
    std::vector<double> theta;
    std::vector<double> alpha;
    std::vector<double> phi;
    std::vector<double> mixing;
    std::optional<BlockKind> block;
    // When set, every cell uses this z instead of calibrating to rho.
    std::optional<double> fixed_z;
    bool allow_self_loops = true;
    std::optional<Partition> partition;
    std::size_t replicates = 10;
    std::uint64_t base_seed = 0;
    std::optional<Group> measure_group;
    double tol = 1e-8;
    std::size_t max_iter = 1000;
    unsigned threads = 1;
    TrajectoryObserver observer;
};

struct SweepRecord {
    std::optional<double> rho_target;
    double rho_realized = 0.0;
    double theta = 0.0;
    double alpha = 0.0;
    double phi = 1.0;
    std::optional<BlockKind> block;
    std::optional<double> mixing;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    double e_loss = 0.0;
    double e_loss_star = 0.0;
    bool converged = false;
    std::size_t iterations = 0;

    friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct SweepResult {
    Recipe recipe = Recipe::density_shock;
    // Grid-major (rho, phi, mixing, theta, alpha), replicate-minor.
    std::vector<SweepRecord> records;
};

// Generic engine: grid over rho x phi x mixing x theta x alpha, one network per
// (topology cell, replicate) shared by every theta/alpha in the cell.
SweepResult run_sweep(const BalanceSheet& sheet, const SweepPlan& plan, ShockKind shock_kind, Recipe recipe);

// Loss vs density and uniform shock size; phi = 1, alpha = 0, no blocks.
SweepResult sweep_density_shock(const BalanceSheet& sheet, SweepPlan plan);
// Loss vs density and alpha at the plan's theta; phi = 1, no blocks.
SweepResult sweep_alpha(const BalanceSheet& sheet, SweepPlan plan);
// Loss vs phi at the plan's density, density recalibrated per phi; no blocks.
SweepResult sweep_phi(const BalanceSheet& sheet, SweepPlan plan);
// Shock group 1, measure group 2, grid over theta x mixing for the plan's block kind.
SweepResult sweep_blocks(const BalanceSheet& sheet, SweepPlan plan);

SweepResult run_recipe(Recipe recipe, const BalanceSheet& sheet, SweepPlan plan);

// Recipe defaults for any empty grid.
void apply_recipe_defaults(Recipe recipe, SweepPlan& plan);

// Defaults plus the axes the recipe pins (e.g. fig1 forces phi = 1, alpha = 0).
SweepPlan prepare_plan(Recipe recipe, SweepPlan plan);
ShockKind recipe_shock(Recipe recipe) noexcept;

std::vector<double> linear_grid(double start, double stop, double step);

}  // namespace netrisk
