// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>

#include <netrisk/netrisk.hpp>

#include "netrisk/commands.hpp"
#include "oracles.hpp"

using namespace netrisk;

namespace {

// Trajectory invariant checks shared by every suite.
struct InvariantLog {
    std::mutex mutex;
    std::size_t runs = 0;
    std::size_t violations = 0;
    std::string first;

    void check(const Trajectory& traj, const DynamicsParams& params) {
        const auto problem = check_trajectory(traj, params);
        std::lock_guard lock(mutex);
        ++runs;
        if (problem) {
            if (violations++ == 0) first = *problem;
        }
    }

    TrajectoryObserver observer() {
        return [this](const Trajectory& t, const DynamicsParams& p) { check(t, p); };
    }
};

InvariantLog invariants;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = budget_s <= 0 || secs <= budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  %-28s %s (%.2fs%s)\n", pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Trajectory observed_run(const SquareMatrix& lambda, std::span<const double> e, const ShockVector& shock,
                        const DynamicsParams& params) {
    auto traj = run(lambda, e, shock, params);
    invariants.check(traj, params);
    return traj;
}

Outcome furfine_oracle() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    DynamicsParams params;
    params.alpha = kInfiniteAlpha;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const auto inst = oracle::random_instance(n, 0.2 + 0.7 * u(rng), 0.5 + 2.0 * u(rng), rng);
        SquareMatrix w(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w(i, j) = inst.weights[i * n + j];
        const auto lambda = leverage_matrix(w, inst.equity);
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            std::vector<double> shock(n);
            std::vector<bool> init(n);
            for (std::size_t i = 0; i < n; ++i) {
                init[i] = (mask >> i) & 1u;
                shock[i] = init[i] ? 1.0 : 0.0;
            }
            const auto expect = oracle::furfine_default_set(inst.weights, inst.equity, init);
            const auto traj = observed_run(lambda, inst.equity, ShockVector(shock), params);
            ++cases;
            for (std::size_t i = 0; i < n; ++i) {
                if ((traj.final()[i] >= 1.0) != static_cast<bool>(expect[i])) {
                    ++mismatches;
                    break;
                }
            }
        }
    }
    return {mismatches == 0, fmt("%zu instance/shock cases, %zu mismatches", cases, mismatches)};
}

Outcome analytic_fixed_point() {
    SquareMatrix lambda(2);
    lambda(0, 1) = lambda(1, 0) = 0.5;
    const std::vector<double> e = {1, 1};
    const auto traj = observed_run(lambda, e, ShockVector({0.4, 0.4}), DynamicsParams{});
    const double target = oracle::geometric_fixed_point(0.4, 0.5);
    const double err_h = std::max(std::abs(traj.final()[0] - target), std::abs(traj.final()[1] - target));
    const double loss = equity_loss(traj, e);
    const bool ok = traj.converged && err_h <= 1e-6 && std::abs(loss - 0.4) <= 1e-6;
    return {ok, fmt("h=(%.9f, %.9f) loss=%.9f", traj.final()[0], traj.final()[1], loss)};
}

Outcome strength_conservation() {
    const auto sheet = synthesize(50, 2.5, 1);
    const auto resolved = resolve(sheet, TopologySpec::with_density(0.2, 1.0));
    const std::size_t samples = 2000;
    std::vector<std::vector<double>> strength(50);
    for (std::uint64_t s = 0; s < samples; ++s) {
        const auto net = sample(sheet, resolved, s);
        for (std::size_t i = 0; i < 50; ++i) {
            double total = 0.0;
            for (double w : net.weights.row(i)) total += w;
            strength[i].push_back(total);
        }
    }
    std::size_t outside = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto m = oracle::mean_and_error(strength[i]);
        const double z = std::abs(m.mean - sheet[i].assets) / m.stderr_mean;
        worst = std::max(worst, z);
        if (z > 3.0) ++outside;
    }
    return {outside == 0, fmt("max |mean - A_i| / SE = %.2f over 50 banks", worst)};
}

Outcome density_calibration() {
    const auto sheet = synthesize(100, 2.5, 1);
    double worst = 0.0;
    for (double rho : {0.05, 0.1, 0.3, 0.7}) {
        for (double phi : {0.0, 0.5, 1.0}) {
            const auto resolved = resolve(sheet, TopologySpec::with_density(rho, phi));
            double total = 0.0;
            for (std::uint64_t s = 0; s < 200; ++s) total += realized_density(sample(sheet, resolved, s));
            worst = std::max(worst, std::abs(total / 200.0 - rho));
        }
    }
    return {worst <= 0.005, fmt("max |mean density - target| = %.5f over 12 cells", worst)};
}

Outcome density_directionality() {
    const auto sheet = synthesize(100, 2.5, 1);
    SweepPlan plan;
    plan.theta = {0.4};
    plan.replicates = 10;
    plan.base_seed = 1;
    plan.observer = invariants.observer();
    const auto res = sweep_density_shock(sheet, plan);
    std::map<double, double> sum;
    for (const auto& r : res.records) sum[*r.rho_target] += r.e_loss;
    std::vector<double> rho;
    std::vector<double> loss;
    for (const auto& [k, v] : sum) {
        rho.push_back(k);
        loss.push_back(v / 10.0);
    }
    const double rs = oracle::spearman(rho, loss);
    return {rho.size() == 19 && rs >= 0.95,
            fmt("Spearman(rho, mean loss) = %.4f over %zu densities", rs, rho.size())};
}

Outcome alpha_monotonicity() {
    const auto sheet = synthesize(100, 2.5, 2);
    const double alphas[] = {0, 0.5, 1, 2, 5, kInfiniteAlpha};
    const auto shock = make_shock(ShockProtocol::uniform(0.4), sheet);
    std::size_t violations = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const double rho = 0.05 + 0.045 * static_cast<double>(k);
        const auto net = sample(sheet, TopologySpec::with_density(rho), 100 + k);
        const auto lambda = leverage_matrix(net, sheet);
        const auto e = sheet.equities();
        double prev = 2.0;
        for (double alpha : alphas) {
            DynamicsParams params;
            params.alpha = alpha;
            const double loss = equity_loss(observed_run(lambda, e, shock, params), e);
            if (loss > prev) ++violations;
            prev = loss;
        }
    }
    return {violations == 0, fmt("20 instances x 6 alphas, %zu ordering violations", violations)};
}

Outcome phi_directionality() {
    const auto sheet = synthesize(100, 2.5, 1);
    SweepPlan plan;
    plan.rho = {0.1};
    plan.theta = {0.4};
    plan.phi = {0.0, 0.5, 1.0};
    plan.replicates = 10;
    plan.base_seed = 1;
    plan.observer = invariants.observer();
    const auto res = sweep_phi(sheet, plan);
    std::map<double, std::vector<double>> by_phi;
    for (const auto& r : res.records) by_phi[r.phi].push_back(r.e_loss_star);
    const auto lo = summarize(by_phi.at(0.0));
    const auto mid = summarize(by_phi.at(0.5));
    const auto hi = summarize(by_phi.at(1.0));
    const double pooled = std::sqrt(lo.stderr_mean * lo.stderr_mean + hi.stderr_mean * hi.stderr_mean);
    const double gap = (hi.mean - lo.mean) / pooled;
    return {gap > 2.0, fmt("mean loss phi=0: %.4f, 0.5: %.4f, 1: %.4f; gap = %.2f pooled SE", lo.mean, mid.mean,
                           hi.mean, gap)};
}

Outcome disconnection_limit() {
    const auto sheet = synthesize(100, 2.5, 1);
    SweepPlan plan;
    plan.mixing = {0.0};
    plan.replicates = 10;
    plan.base_seed = 1;
    plan.observer = invariants.observer();
    const auto res = sweep_blocks(sheet, plan);
    std::size_t nonzero = 0;
    for (const auto& r : res.records) nonzero += r.e_loss_star != 0.0;
    return {nonzero == 0 && !res.records.empty(),
            fmt("%zu records at mixing 0, %zu with nonzero group-2 loss", res.records.size(), nonzero)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome manifest_determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "netrisk_acceptance";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "sweep.ini") << "seed = 5\n[input]\nsynth_n = 100\n[topology]\ndensity = 0.1\n"
                                        "[sweep]\nrecipe = fig2\nrho = 0.1,0.3\nalpha = 0,2,inf\nreplicates = 3\n";
    std::ostringstream out;
    std::ostringstream err;
    auto call = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "netrisk");
        return cli::run_cli(args, out, err);
    };
    if (call({"sweep", "--config", (dir / "sweep.ini").string(), "--out", (dir / "a").string()}) != 0 ||
        call({"sweep", "--config", (dir / "a/manifest.json").string(), "--out", (dir / "b").string(), "--threads",
              "3"}) != 0) {
        return {false, "sweep failed: " + err.str()};
    }
    const auto a = slurp(dir / "a/sweep.csv");
    const auto b = slurp(dir / "b/sweep.csv");
    std::filesystem::remove_all(dir);
    return {a == b && !a.empty(), fmt("rerun from manifest: %zu bytes, %s", a.size(), a == b ? "identical" : "differs")};
}

}  // namespace

int main() {
    report("furfine-oracle", 30, furfine_oracle);
    report("analytic-fixed-point", 1, analytic_fixed_point);
    report("strength-conservation", 60, strength_conservation);
    report("density-calibration", 60, density_calibration);
    report("density-directionality", 300, density_directionality);
    report("alpha-monotonicity", 60, alpha_monotonicity);
    report("phi-directionality", 300, phi_directionality);
    report("disconnection-limit", 60, disconnection_limit);
    report("trajectory-invariants", 0, [] {
        return Outcome{invariants.violations == 0 && invariants.runs > 0,
                       fmt("%zu runs checked, %zu violations%s%s", invariants.runs, invariants.violations,
                           invariants.first.empty() ? "" : ": ", invariants.first.c_str())};
    });
    report("manifest-determinism", 0, manifest_determinism);
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
