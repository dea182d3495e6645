#include "netrisk/stress.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "netrisk/errors.hpp"

namespace netrisk {

std::string_view to_string(ShockKind kind) noexcept {
    switch (kind) {
        case ShockKind::uniform: return "uniform";
        case ShockKind::single_default: return "single_default";
        case ShockKind::group_uniform: return "group_uniform";
    }
    return "unknown";
}

ShockKind parse_shock_kind(std::string_view text) {
    if (text == "uniform") return ShockKind::uniform;
    if (text == "single_default") return ShockKind::single_default;
    if (text == "group_uniform") return ShockKind::group_uniform;
    throw ValidationError("unknown shock kind '" + std::string(text) +
                          "' (expected uniform, single_default or group_uniform)");
}

ShockProtocol ShockProtocol::uniform(double theta) {
    return {ShockKind::uniform, theta, std::nullopt, std::nullopt};
}

ShockProtocol ShockProtocol::single_default(std::size_t bank) {
    return {ShockKind::single_default, std::nullopt, bank, std::nullopt};
}

ShockProtocol ShockProtocol::group_uniform(Group group, double theta) {
    return {ShockKind::group_uniform, theta, std::nullopt, group};
}

void ShockProtocol::validate() const {
    const bool needs_theta = kind != ShockKind::single_default;
    if (needs_theta != theta.has_value()) {
        throw ValidationError(needs_theta ? "shock: theta is required for this kind"
                                          : "shock: theta is not used by single_default");
    }
    if (theta && !(*theta >= 0.0 && *theta <= 1.0)) {
        throw ValidationError("shock: theta must lie in [0, 1]");
    }
    if ((kind == ShockKind::single_default) != target_bank.has_value()) {
        throw ValidationError("shock: target bank is required exactly for single_default");
    }
    if ((kind == ShockKind::group_uniform) != target_group.has_value()) {
        throw ValidationError("shock: target group is required exactly for group_uniform");
    }
}

ShockVector make_shock(const ShockProtocol& protocol, std::size_t n, const Partition* partition) {
    protocol.validate();
    std::vector<double> h(n, 0.0);
    switch (protocol.kind) {
        case ShockKind::uniform:
            std::fill(h.begin(), h.end(), *protocol.theta);
            break;
        case ShockKind::single_default:
            if (*protocol.target_bank >= n) {
                throw ValidationError("shock: target bank " + std::to_string(*protocol.target_bank) +
                                      " out of range for " + std::to_string(n) + " banks");
            }
            h[*protocol.target_bank] = 1.0;
            break;
        case ShockKind::group_uniform:
            if (!partition || partition->size() != n) {
                throw ValidationError("shock: group_uniform needs a partition covering every bank");
            }
            for (std::size_t i = 0; i < n; ++i) {
                if ((*partition)[i] == *protocol.target_group) {
                    h[i] = *protocol.theta;
                }
            }
            break;
    }
    return ShockVector(std::move(h));
}

ShockVector make_shock(const ShockProtocol& protocol, const BalanceSheet& sheet, const Partition* partition) {
    return make_shock(protocol, sheet.size(), partition);
}

LossSummary summarize(std::span<const double> values) {
    LossSummary out;
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) sq += (v - out.mean) * (v - out.mean);
        const double var = sq / static_cast<double>(values.size() - 1);
        out.stderr_mean = std::sqrt(var / static_cast<double>(values.size()));
    }
    return out;
}

namespace {

std::vector<std::size_t> measured_banks(std::size_t n, const std::optional<Group>& group, const Partition* partition) {
    if (!group) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    if (!partition) {
        throw ValidationError("measuring a group requires a partition");
    }
    auto out = members(*partition, *group);
    if (out.empty()) {
        throw ValidationError("measured group is empty");
    }
    return out;
}

// Runs fn(k) for k in [0, count) on up to `threads` workers. The first exception
// stops further work and is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) break;
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto n_workers = std::min<std::size_t>(threads, count);
    for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
    try {
        throw;
    } catch (const ValidationError& e) {
        throw ValidationError(context + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(context + ": " + e.what());
    } catch (const std::exception& e) {
        throw NumericError(context + ": " + e.what());
    }
}

}  // namespace

EnsembleResult run_ensemble(const BalanceSheet& sheet, const TopologySpec& spec, const ShockProtocol& protocol,
                            const DynamicsParams& params, std::size_t replicates, std::uint64_t base_seed,
                            const EnsembleOptions& options) {
    if (replicates < 1) {
        throw ValidationError("ensemble: replicates must be >= 1");
    }
    params.validate();
    const auto topology = resolve(sheet, spec);
    const Partition* partition = spec.block ? &spec.block->partition : nullptr;
    const auto shock = make_shock(protocol, sheet, partition);
    const auto measured = measured_banks(sheet.size(), options.measure_group, partition);
    const auto equities = sheet.equities();

    EnsembleResult result;
    std::vector<double> losses;
    std::vector<double> losses_star;
    for (std::size_t k = 0; k < replicates; ++k) {
        const std::uint64_t seed = base_seed + k;
        const auto net = sample(sheet, topology, seed);
        const auto traj = run(leverage_matrix(net.weights, equities), equities, shock, params);
        if (options.observer) options.observer(traj, params);
        EnsembleRow row;
        row.replicate = k;
        row.seed = seed;
        row.e_loss = equity_loss(traj, equities);
        row.e_loss_star = options.measure_group ? equity_loss(traj, equities, measured) : row.e_loss;
        row.realized_density = realized_density(net, spec.allow_self_loops);
        row.converged = traj.converged;
        row.iterations = traj.iterations;
        losses.push_back(row.e_loss);
        losses_star.push_back(row.e_loss_star);
        result.rows.push_back(row);
    }
    result.e_loss = summarize(losses);
    result.e_loss_star = summarize(losses_star);
    return result;
}

std::string_view to_string(Recipe recipe) noexcept {
    switch (recipe) {
        case Recipe::density_shock: return "fig1";
        case Recipe::alpha: return "fig2";
        case Recipe::phi: return "fig3";
        case Recipe::blocks: return "fig4";
    }
    return "unknown";
}

Recipe parse_recipe(std::string_view text) {
    if (text == "fig1") return Recipe::density_shock;
    if (text == "fig2") return Recipe::alpha;
    if (text == "fig3") return Recipe::phi;
    if (text == "fig4") return Recipe::blocks;
    throw ValidationError("unknown recipe '" + std::string(text) + "' (expected fig1, fig2, fig3 or fig4)");
}

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) {
        throw ValidationError("grid: need step > 0 and stop >= start");
    }
    std::vector<double> out;
    // Index-based to avoid accumulating rounding; values snapped to 12 decimals.
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
    return out;
}

namespace {

void check_grid(const std::vector<double>& grid, const char* name, double lo, double hi, bool open) {
    if (grid.empty()) {
        throw ValidationError(std::string("sweep: grid '") + name + "' is empty");
    }
    for (double v : grid) {
        const bool ok = open ? (v > lo && v < hi) : (v >= lo && v <= hi);
        if (!ok) {
            std::ostringstream msg;
            msg << "sweep: " << name << " value " << v << " outside " << (open ? "(" : "[") << lo << ", " << hi
                << (open ? ")" : "]");
            throw ValidationError(msg.str());
        }
    }
}

std::string cell_context(const SweepRecord& r) {
    std::ostringstream out;
    out << "grid point (";
    if (r.rho_target) out << "rho=" << *r.rho_target << ", ";
    out << "phi=" << r.phi;
    if (r.mixing) out << ", mixing=" << *r.mixing;
    out << ")";
    return out.str();
}

}  // namespace

SweepResult run_sweep(const BalanceSheet& sheet, const SweepPlan& plan, ShockKind shock_kind, Recipe recipe) {
    if (plan.replicates < 1) {
        throw ValidationError("sweep: replicates must be >= 1");
    }
    if (plan.fixed_z) {
        if (!(*plan.fixed_z >= 0.0) || !std::isfinite(*plan.fixed_z)) {
            throw ValidationError("sweep: fixed z must be finite and >= 0");
        }
    } else {
        check_grid(plan.rho, "rho", 0.0, 1.0, true);
    }
    check_grid(plan.theta, "theta", 0.0, 1.0, false);
    check_grid(plan.phi, "phi", 0.0, 1.0, false);
    check_grid(plan.alpha, "alpha", 0.0, kInfiniteAlpha, false);
    if (plan.block) {
        check_grid(plan.mixing, "mixing", 0.0, 1.0, false);
    }
    DynamicsParams base_params{0.0, plan.tol, plan.max_iter};
    base_params.validate();

    const std::size_t n = sheet.size();
    const bool needs_partition = plan.block || shock_kind == ShockKind::group_uniform || plan.measure_group;
    Partition partition;
    if (needs_partition) {
        partition = plan.partition ? *plan.partition : random_partition(n, plan.base_seed);
        BlockSpec{BlockKind::modular, 1.0, partition}.validate(n);
    }
    const Partition* partition_ptr = needs_partition ? &partition : nullptr;
    const auto measured = measured_banks(n, plan.measure_group, partition_ptr);
    const auto equities = sheet.equities();

    std::vector<std::optional<double>> rho_axis;
    if (plan.fixed_z) {
        rho_axis.emplace_back(std::nullopt);
    } else {
        rho_axis.assign(plan.rho.begin(), plan.rho.end());
    }
    std::vector<std::optional<double>> mix_axis;
    if (plan.block) {
        mix_axis.assign(plan.mixing.begin(), plan.mixing.end());
    } else {
        mix_axis.emplace_back(std::nullopt);
    }

    struct Cell {
        SweepRecord prototype;
        TopologySpec spec;
        ResolvedTopology topology;
    };
    std::vector<Cell> cells;
    for (const auto& rho : rho_axis) {
        for (double phi : plan.phi) {
            for (const auto& mix : mix_axis) {
                Cell cell;
                cell.prototype.rho_target = rho;
                cell.prototype.phi = phi;
                cell.prototype.block = plan.block;
                cell.prototype.mixing = mix;
                cell.spec.phi = phi;
                cell.spec.allow_self_loops = plan.allow_self_loops;
                if (rho) {
                    cell.spec.target_density = *rho;
                } else {
                    cell.spec.z = *plan.fixed_z;
                }
                if (plan.block) {
                    cell.spec.block = BlockSpec{*plan.block, *mix, partition};
                }
                cells.push_back(std::move(cell));
            }
        }
    }

    parallel_for(cells.size(), plan.threads, [&](std::size_t c) {
        try {
            cells[c].topology = resolve(sheet, cells[c].spec);
        } catch (...) {
            rethrow_with_context(cell_context(cells[c].prototype));
        }
    });

    const std::size_t per_cell = plan.theta.size() * plan.alpha.size();
    const std::size_t reps = plan.replicates;
    SweepResult result;
    result.recipe = recipe;
    result.records.resize(cells.size() * per_cell * reps);
    std::mutex observer_mutex;

    parallel_for(cells.size() * reps, plan.threads, [&](std::size_t item) {
        const std::size_t c = item / reps;
        const std::size_t k = item % reps;
        const auto& cell = cells[c];
        const std::uint64_t seed = plan.base_seed + k;
        try {
            const auto net = sample(sheet, cell.topology, seed);
            const double density = realized_density(net, plan.allow_self_loops);
            const auto lambda = leverage_matrix(net.weights, equities);
            for (std::size_t ti = 0; ti < plan.theta.size(); ++ti) {
                ShockProtocol protocol;
                protocol.kind = shock_kind;
                protocol.theta = plan.theta[ti];
                if (shock_kind == ShockKind::group_uniform) {
                    protocol.target_group = Group::first;
                } else if (shock_kind == ShockKind::single_default) {
                    throw ValidationError("sweeps use uniform or group_uniform shocks");
                }
                const auto shock = make_shock(protocol, n, partition_ptr);
                for (std::size_t ai = 0; ai < plan.alpha.size(); ++ai) {
                    auto params = base_params;
                    params.alpha = plan.alpha[ai];
                    const auto traj = run(lambda, equities, shock, params);
                    if (plan.observer) {
                        std::lock_guard lock(observer_mutex);
                        plan.observer(traj, params);
                    }
                    auto record = cell.prototype;
                    record.rho_realized = density;
                    record.theta = plan.theta[ti];
                    record.alpha = params.alpha;
                    record.replicate = k;
                    record.seed = seed;
                    record.e_loss = equity_loss(traj, equities);
                    record.e_loss_star =
                        plan.measure_group ? equity_loss(traj, equities, measured) : record.e_loss;
                    record.converged = traj.converged;
                    record.iterations = traj.iterations;
                    result.records[(c * per_cell + ti * plan.alpha.size() + ai) * reps + k] = record;
                }
            }
        } catch (...) {
            rethrow_with_context(cell_context(cell.prototype) + ", replicate " + std::to_string(k));
        }
    });
    return result;
}

void apply_recipe_defaults(Recipe recipe, SweepPlan& plan) {
    auto fill = [](std::vector<double>& grid, std::vector<double> values) {
        if (grid.empty()) grid = std::move(values);
    };
    const auto all_alpha = std::vector<double>{0, 2, 3, 4, 5, 6, 7, kInfiniteAlpha};
    switch (recipe) {
        case Recipe::density_shock:
            fill(plan.rho, linear_grid(0.05, 0.95, 0.05));
            fill(plan.theta, linear_grid(0.0, 0.6, 0.05));
            break;
        case Recipe::alpha:
            fill(plan.rho, linear_grid(0.05, 0.95, 0.05));
            fill(plan.theta, {0.4});
            fill(plan.alpha, all_alpha);
            break;
        case Recipe::phi:
            fill(plan.rho, {0.06, 0.21});
            fill(plan.theta, {0.4});
            fill(plan.phi, linear_grid(0.0, 1.0, 0.1));
            fill(plan.alpha, {0.0});
            break;
        case Recipe::blocks:
            fill(plan.rho, {0.1});
            fill(plan.theta, linear_grid(0.0, 0.6, 0.05));
            fill(plan.mixing, linear_grid(0.0, 1.0, 0.1));
            fill(plan.alpha, {0.0});
            fill(plan.phi, {1.0});
            if (!plan.block) plan.block = BlockKind::modular;
            break;
    }
}

SweepPlan prepare_plan(Recipe recipe, SweepPlan plan) {
    apply_recipe_defaults(recipe, plan);
    switch (recipe) {
        case Recipe::density_shock:
            plan.phi = {1.0};
            plan.alpha = {0.0};
            plan.block.reset();
            plan.mixing.clear();
            break;
        case Recipe::alpha:
            plan.phi = {1.0};
            plan.block.reset();
            plan.mixing.clear();
            break;
        case Recipe::phi:
            plan.block.reset();
            plan.mixing.clear();
            break;
        case Recipe::blocks:
            plan.measure_group = Group::second;
            break;
    }
    return plan;
}

ShockKind recipe_shock(Recipe recipe) noexcept {
    return recipe == Recipe::blocks ? ShockKind::group_uniform : ShockKind::uniform;
}

SweepResult sweep_density_shock(const BalanceSheet& sheet, SweepPlan plan) {
    return run_sweep(sheet, prepare_plan(Recipe::density_shock, std::move(plan)), ShockKind::uniform,
                     Recipe::density_shock);
}

SweepResult sweep_alpha(const BalanceSheet& sheet, SweepPlan plan) {
    return run_sweep(sheet, prepare_plan(Recipe::alpha, std::move(plan)), ShockKind::uniform, Recipe::alpha);
}

SweepResult sweep_phi(const BalanceSheet& sheet, SweepPlan plan) {
    return run_sweep(sheet, prepare_plan(Recipe::phi, std::move(plan)), ShockKind::uniform, Recipe::phi);
}

SweepResult sweep_blocks(const BalanceSheet& sheet, SweepPlan plan) {
    return run_sweep(sheet, prepare_plan(Recipe::blocks, std::move(plan)), ShockKind::group_uniform,
                     Recipe::blocks);
}

SweepResult run_recipe(Recipe recipe, const BalanceSheet& sheet, SweepPlan plan) {
    switch (recipe) {
        case Recipe::density_shock: return sweep_density_shock(sheet, std::move(plan));
        case Recipe::alpha: return sweep_alpha(sheet, std::move(plan));
        case Recipe::phi: return sweep_phi(sheet, std::move(plan));
        case Recipe::blocks: return sweep_blocks(sheet, std::move(plan));
    }
    throw ValidationError("unknown recipe");
}

}  // namespace netrisk
