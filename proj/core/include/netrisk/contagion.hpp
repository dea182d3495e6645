#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netrisk/balance_sheet.hpp"
#include "netrisk/matrix.hpp"
#include "netrisk/netgen.hpp"

namespace netrisk {

inline constexpr double kInfiniteAlpha = std::numeric_limits<double>::infinity();

// A bank counts as defaulted once h >= this value.
inline constexpr double kDefaultThreshold = 1.0 - 1e-12;

struct DynamicsParams {
    // 0 = linear DebtRank, infinity = Furfine threshold cascade.
    double alpha = 0.0;
    // Threshold on || (h(t) - h(t-1)) * E / sum E ||_2.
    double tol = 1e-8;
    std::size_t max_iter = 1000;

    void validate() const;
};

// Initial relative equity losses h(1), each in [0, 1].
class ShockVector {
public:
    explicit ShockVector(std::vector<double> h1);
    static ShockVector zeros(std::size_t n) { return ShockVector(std::vector<double>(n, 0.0)); }

    [[nodiscard]] std::size_t size() const noexcept { return h1_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return h1_; }
    double operator[](std::size_t i) const noexcept { return h1_[i]; }

private:
    std::vector<double> h1_;
};

struct Trajectory {
    // h[0] is h(1), the shock; h.back() is h(T).
    std::vector<std::vector<double>> h;
    bool converged = false;
    std::size_t iterations = 0;  // T
    double final_cond = 0.0;

    [[nodiscard]] const std::vector<double>& initial() const { return h.front(); }
    [[nodiscard]] const std::vector<double>& final() const { return h.back(); }
};

// Lambda_ij = weights(i, j) / E_i.
SquareMatrix leverage_matrix(const SquareMatrix& weights, std::span<const double> equities);
SquareMatrix leverage_matrix(const WeightedNetwork& net, const BalanceSheet& sheet);

// h e^{alpha (h - 1)}; for alpha = infinity, 1 at h >= 1 and 0 below.
double default_probability(double h, double alpha);

struct StepResult {
    std::vector<double> h;
    std::vector<double> p;
    // Input mask plus every bank whose h_next reached the default threshold.
    std::vector<bool> defaulted;
};

// h_next = min(1, h + Lambda [p_curr - p_prev]) with the columns of `defaulted`
// banks zeroed. Throws NumericError on NaN/Inf input.
StepResult step(std::span<const double> h_curr, std::span<const double> p_curr, std::span<const double> p_prev,
                const SquareMatrix& lambda, const std::vector<bool>& defaulted, double alpha);

// Iterates from h(0) = 0, h(1) = shock, p(0) = 0 until the equity-weighted change
// drops below tol or max_iter states have been produced.
Trajectory run(const SquareMatrix& lambda, std::span<const double> equities, const ShockVector& shock,
               const DynamicsParams& params);
Trajectory run(const WeightedNetwork& net, const BalanceSheet& sheet, const ShockVector& shock,
               const DynamicsParams& params);

// sum_{i in S} (h_i(T) - h_i(1)) E_i / sum_{i in S} E_i; S = all banks when `restrict` is empty.
double equity_loss(const Trajectory& traj, std::span<const double> equities,
                   std::optional<std::span<const std::size_t>> restrict = std::nullopt);
double equity_loss(const Trajectory& traj, const BalanceSheet& sheet,
                   std::optional<std::span<const std::size_t>> restrict = std::nullopt);

// Checks boundedness, monotonicity and (when converged) final_cond <= tol.
// Returns a description of the first violation.
std::optional<std::string> check_trajectory(const Trajectory& traj, const DynamicsParams& params);

// `t,bank_id,h` rows, t starting at 1.
std::string format_trajectory_csv(const Trajectory& traj, const BalanceSheet& sheet);
void write_trajectory_csv(const Trajectory& traj, const BalanceSheet& sheet, const std::filesystem::path& path);

}  // namespace netrisk
