#pragma once

// Independent reference computations used only by tests. None of these call
// into the code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace netrisk::oracle {

// Neumaier compensated summation.
inline double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double c = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

// Maximum-likelihood Pareto tail index with x_min = min(sample).
inline double hill_tail_index(std::span<const double> sample) {
    const double x_min = *std::min_element(sample.begin(), sample.end());
    double log_sum = 0.0;
    for (double x : sample) log_sum += std::log(x / x_min);
    return static_cast<double>(sample.size()) / log_sum;
}

// Furfine cascade by breadth-first rounds: bank i defaults once the summed
// exposure to defaulted counterparties reaches its equity. weights is row-major
// n x n, weights[i*n+j] = exposure of i to j.
inline std::vector<bool> furfine_default_set(std::span<const double> weights, std::span<const double> equity,
                                             std::vector<bool> initially_defaulted) {
    const std::size_t n = equity.size();
    auto defaulted = std::move(initially_defaulted);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<bool> next = defaulted;
        for (std::size_t i = 0; i < n; ++i) {
            if (defaulted[i]) continue;
            double loss = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (defaulted[j]) loss += weights[i * n + j];
            }
            if (loss >= equity[i]) {
                next[i] = true;
                changed = true;
            }
        }
        defaulted = std::move(next);
    }
    return defaulted;
}

// Fixed point of the symmetric 2-bank linear system: h* = theta * sum_k l^k.
inline double geometric_fixed_point(double theta, double leverage, int terms = 2000) {
    double total = 0.0;
    double term = theta;
    for (int k = 0; k < terms; ++k) {
        total += term;
        term *= leverage;
    }
    return total;
}

inline std::vector<double> average_ranks(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// Spearman rank correlation with average ranks for ties.
inline double spearman(std::span<const double> a, std::span<const double> b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    return pearson(ra, rb);
}

inline double binomial_pmf(std::size_t n, std::size_t k, double p) {
    const double log_c = std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
                         std::lgamma(static_cast<double>(n - k) + 1);
    return std::exp(log_c + static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * std::log1p(-p));
}

struct MeanAndError {
    double mean = 0.0;
    double stderr_mean = 0.0;
};

inline MeanAndError mean_and_error(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / (n - 1.0) / n)};
}

// Random weighted digraph on n nodes with roughly `link_prob` of ordered pairs
// linked (self-loops included) and equities in [0.5, 2).
struct SmallInstance {
    std::size_t n = 0;
    std::vector<double> weights;
    std::vector<double> equity;
};

inline SmallInstance random_instance(std::size_t n, double link_prob, double weight_scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SmallInstance out;
    out.n = n;
    out.weights.assign(n * n, 0.0);
    out.equity.resize(n);
    for (auto& e : out.equity) e = 0.5 + 1.5 * unit(rng);
    for (auto& w : out.weights) {
        if (unit(rng) < link_prob) w = weight_scale * unit(rng);
    }
    return out;
}

}  // namespace netrisk::oracle
