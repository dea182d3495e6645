#include "netrisk/contagion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netrisk/errors.hpp"
#include "text_io.hpp"

namespace netrisk {

void DynamicsParams::validate() const {
    if (!(alpha >= 0.0)) {
        throw ValidationError("dynamics: alpha must be >= 0 (or inf)");
    }
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw ValidationError("dynamics: tol must be > 0");
    }
    if (max_iter < 1) {
        throw ValidationError("dynamics: max_iter must be >= 1");
    }
}

ShockVector::ShockVector(std::vector<double> h1) : h1_(std::move(h1)) {
    for (std::size_t i = 0; i < h1_.size(); ++i) {
        if (!(h1_[i] >= 0.0 && h1_[i] <= 1.0)) {
            throw ValidationError("shock entry " + std::to_string(i) + " outside [0, 1]");
        }
    }
}

SquareMatrix leverage_matrix(const SquareMatrix& weights, std::span<const double> equities) {
    const std::size_t n = weights.size();
    if (equities.size() != n) {
        throw ValidationError("leverage_matrix: network has " + std::to_string(n) + " nodes but " +
                              std::to_string(equities.size()) + " equities given");
    }
    SquareMatrix lambda(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(equities[i] > 0.0)) {
            throw ValidationError("leverage_matrix: equity of bank " + std::to_string(i) + " must be > 0");
        }
        for (std::size_t j = 0; j < n; ++j) {
            lambda(i, j) = weights(i, j) / equities[i];
        }
    }
    return lambda;
}

SquareMatrix leverage_matrix(const WeightedNetwork& net, const BalanceSheet& sheet) {
    return leverage_matrix(net.weights, sheet.equities());
}

double default_probability(double h, double alpha) {
    if (!(h >= 0.0 && h <= 1.0)) {
        throw ValidationError("default_probability: h must lie in [0, 1]");
    }
    if (!(alpha >= 0.0)) {
        throw ValidationError("default_probability: alpha must be >= 0");
    }
    if (std::isinf(alpha)) {
        return h >= 1.0 ? 1.0 : 0.0;
    }
    return h * std::exp(alpha * (h - 1.0));
}

namespace {

void require_finite(std::span<const double> v, const char* name) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw NumericError(std::string("step: non-finite value in ") + name);
        }
    }
}

double weighted_change(std::span<const double> next, std::span<const double> curr,
                       std::span<const double> weights) {
    double sq = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
        const double d = (next[i] - curr[i]) * weights[i];
        sq += d * d;
    }
    return std::sqrt(sq);
}

}  // namespace

StepResult step(std::span<const double> h_curr, std::span<const double> p_curr, std::span<const double> p_prev,
                const SquareMatrix& lambda, const std::vector<bool>& defaulted, double alpha) {
    const std::size_t n = lambda.size();
    if (h_curr.size() != n || p_curr.size() != n || p_prev.size() != n || defaulted.size() != n) {
        throw ValidationError("step: vector lengths do not match the leverage matrix");
    }
    require_finite(h_curr, "h");
    require_finite(p_curr, "p(t)");
    require_finite(p_prev, "p(t-1)");
    require_finite(lambda.values(), "leverage matrix");

    // Only columns with a nonzero increment contribute.
    std::vector<std::size_t> active;
    std::vector<double> delta;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = p_curr[j] - p_prev[j];
        if (d != 0.0 && !defaulted[j]) {
            active.push_back(j);
            delta.push_back(d);
        }
    }

    StepResult out{std::vector<double>(h_curr.begin(), h_curr.end()), std::vector<double>(n), defaulted};
    for (std::size_t i = 0; i < n; ++i) {
        if (!active.empty()) {
            const auto row = lambda.row(i);
            double increment = 0.0;
            for (std::size_t k = 0; k < active.size(); ++k) {
                increment += row[active[k]] * delta[k];
            }
            out.h[i] = std::min(1.0, h_curr[i] + increment);
        }
        out.p[i] = default_probability(out.h[i], alpha);
        if (out.h[i] >= kDefaultThreshold) {
            out.defaulted[i] = true;
        }
    }
    return out;
}

Trajectory run(const SquareMatrix& lambda, std::span<const double> equities, const ShockVector& shock,
               const DynamicsParams& params) {
    params.validate();
    const std::size_t n = lambda.size();
    if (shock.size() != n || equities.size() != n) {
        throw ValidationError("run: shock, equities and network sizes differ");
    }
    double total_equity = 0.0;
    for (double e : equities) {
        total_equity += e;
    }
    if (!(total_equity > 0.0)) {
        throw ValidationError("run: total equity must be positive");
    }
    std::vector<double> weights(equities.begin(), equities.end());
    for (auto& w : weights) {
        w /= total_equity;
    }

    Trajectory traj;
    traj.h.emplace_back(shock.values().begin(), shock.values().end());
    std::vector<double> p_prev(n, 0.0);
    std::vector<double> p_curr(n);
    for (std::size_t i = 0; i < n; ++i) {
        p_curr[i] = default_probability(traj.h[0][i], params.alpha);
    }
    // Lambda(t) drops column j once j has defaulted up to time t-1, so the mask
    // used for a step lags the newest defaults by one step.
    std::vector<bool> mask_lagged(n, false);
    std::vector<bool> mask_curr(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        mask_curr[i] = traj.h[0][i] >= kDefaultThreshold;
    }
    traj.final_cond = weighted_change(traj.h[0], std::vector<double>(n, 0.0), weights);

    while (traj.h.size() < params.max_iter) {
        auto next = step(traj.h.back(), p_curr, p_prev, lambda, mask_lagged, params.alpha);
        traj.final_cond = weighted_change(next.h, traj.h.back(), weights);
        mask_lagged = std::move(mask_curr);
        mask_curr = std::move(next.defaulted);
        p_prev = std::move(p_curr);
        p_curr = std::move(next.p);
        traj.h.push_back(std::move(next.h));
        if (traj.final_cond < params.tol) {
            traj.converged = true;
            break;
        }
    }
    traj.iterations = traj.h.size();
    return traj;
}

Trajectory run(const WeightedNetwork& net, const BalanceSheet& sheet, const ShockVector& shock,
               const DynamicsParams& params) {
    const auto equities = sheet.equities();
    return run(leverage_matrix(net.weights, equities), equities, shock, params);
}

double equity_loss(const Trajectory& traj, std::span<const double> equities,
                   std::optional<std::span<const std::size_t>> restrict) {
    if (traj.h.empty()) {
        throw ValidationError("equity_loss: empty trajectory");
    }
    const auto& first = traj.initial();
    const auto& last = traj.final();
    if (equities.size() != last.size()) {
        throw ValidationError("equity_loss: equities and trajectory sizes differ");
    }
    double loss = 0.0;
    double total = 0.0;
    auto add = [&](std::size_t i) {
        if (i >= last.size()) {
            throw ValidationError("equity_loss: restriction index out of range");
        }
        loss += (last[i] - first[i]) * equities[i];
        total += equities[i];
    };
    if (restrict) {
        if (restrict->empty()) {
            throw ValidationError("equity_loss: empty restriction set");
        }
        for (auto i : *restrict) {
            add(i);
        }
    } else {
        for (std::size_t i = 0; i < last.size(); ++i) {
            add(i);
        }
    }
    return loss / total;
}

double equity_loss(const Trajectory& traj, const BalanceSheet& sheet,
                   std::optional<std::span<const std::size_t>> restrict) {
    return equity_loss(traj, sheet.equities(), restrict);
}

std::optional<std::string> check_trajectory(const Trajectory& traj, const DynamicsParams& params) {
    if (traj.h.empty()) {
        return "empty trajectory";
    }
    if (traj.iterations != traj.h.size()) {
        return "iteration count does not match stored states";
    }
    for (std::size_t t = 0; t < traj.h.size(); ++t) {
        for (std::size_t i = 0; i < traj.h[t].size(); ++i) {
            const double v = traj.h[t][i];
            if (!(v >= 0.0 && v <= 1.0)) {
                return "h out of [0,1] at t=" + std::to_string(t + 1) + ", bank " + std::to_string(i);
            }
            if (t > 0 && v < traj.h[t - 1][i]) {
                return "h decreased at t=" + std::to_string(t + 1) + ", bank " + std::to_string(i);
            }
        }
    }
    if (traj.converged && !(traj.final_cond <= params.tol)) {
        return "converged run has final_cond above tol";
    }
    return std::nullopt;
}

std::string format_trajectory_csv(const Trajectory& traj, const BalanceSheet& sheet) {
    std::string out = "t,bank_id,h\n";
    for (std::size_t t = 0; t < traj.h.size(); ++t) {
        for (std::size_t i = 0; i < traj.h[t].size(); ++i) {
            out += std::to_string(t + 1);
            out += ',';
            out += sheet[i].id;
            out += ',';
            out += detail::format_double(traj.h[t][i]);
            out += '\n';
        }
    }
    return out;
}

void write_trajectory_csv(const Trajectory& traj, const BalanceSheet& sheet, const std::filesystem::path& path) {
    if (!traj.h.empty() && traj.h.front().size() != sheet.size()) {
        throw ValidationError("trajectory dump: sheet and trajectory sizes differ");
    }
    detail::write_file_atomic(path, format_trajectory_csv(traj, sheet));
}

}  // namespace netrisk
