#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "netrisk/balance_sheet.hpp"
#include "netrisk/matrix.hpp"

namespace netrisk {

enum class BlockKind { modular, bipartite, core_periphery };

std::string_view to_string(BlockKind kind) noexcept;
BlockKind parse_block_kind(std::string_view text);

enum class Group : std::uint8_t { first = 1, second = 2 };

// partition[i] is the group of bank i.
using Partition = std::vector<Group>;

// Random equal-size split (first group gets the extra node when n is odd).
Partition random_partition(std::size_t n, std::uint64_t seed);

std::vector<std::size_t> members(const Partition& partition, Group group);

// Per-block density parameters z_nm, n = source group, m = target group.
struct ZMatrix {
    double z11 = 0.0;
    double z12 = 0.0;
    double z21 = 0.0;
    double z22 = 0.0;

    [[nodiscard]] double at(Group from, Group to) const noexcept;

    friend bool operator==(const ZMatrix&, const ZMatrix&) = default;
};

// Two-group block structure. mixing is lambda (modular), beta (bipartite) or
// gamma (core-periphery); group `first` is the core for core-periphery.
struct BlockSpec {
    BlockKind kind = BlockKind::modular;
    double mixing = 1.0;
    Partition partition;

    void validate(std::size_t n) const;

    friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

// modular (z, lz, lz, z); bipartite (bz, z, z, bz); core-periphery (z, gz, gz, g^2 z).
ZMatrix block_z(BlockKind kind, double mixing, double z);

struct TopologySpec {
    std::optional<double> z;
    std::optional<double> target_density;
    double phi = 1.0;
    std::optional<BlockSpec> block;
    bool allow_self_loops = true;

    static TopologySpec with_z(double z, double phi = 1.0);
    static TopologySpec with_density(double rho, double phi = 1.0);

    void validate(std::size_t n) const;
};

// z (a A_i L_j)^phi-style connection probability: z x / (1 + z x) with
// x = (a l)^phi. At phi = 0 the base is taken as 1 even when a l = 0.
double edge_probability(double a, double l, double z, double phi);

// Per-pair fitness y_ij = f_ij (A_i L_j)^phi with f_ij the block factor
// (z_nm / z); p_ij = z y_ij / (1 + z y_ij). Diagonal is 0 when self-loops are off.
class PairFitness {
public:
    PairFitness(const BalanceSheet& sheet, double phi, const BlockSpec* block, bool allow_self_loops);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return y_(i, j); }
    [[nodiscard]] bool allowed(std::size_t i, std::size_t j) const noexcept {
        return allow_self_loops_ || i != j;
    }
    [[nodiscard]] std::size_t pair_count() const noexcept;
    // Density approached as z -> infinity.
    [[nodiscard]] double density_supremum() const noexcept;
    [[nodiscard]] double expected_density(double z) const noexcept;

private:
    std::size_t n_;
    bool allow_self_loops_;
    SquareMatrix y_;
    std::size_t positive_pairs_ = 0;
};

// Mean edge probability over the N^2 (or N^2 - N) ordered pairs.
double expected_density(const BalanceSheet& sheet, double z, double phi, bool allow_self_loops,
                        const BlockSpec* block = nullptr);

// Solves expected_density(z) = target by bisection on log z, |error| <= 1e-8.
// With a block spec the block factors scale each pair's z and the single
// overall z is calibrated on the full pair set.
double calibrate_z(const BalanceSheet& sheet, double target_density, double phi, bool allow_self_loops,
                   const BlockSpec* block = nullptr);

inline constexpr double kCalibrationTolerance = 1e-8;
inline constexpr int kMaxBisectionSteps = 200;

// Replaces target_density by the calibrated z (target kept for provenance).
struct ResolvedTopology {
    TopologySpec spec;  // z always set
    std::optional<double> target_density;
};
ResolvedTopology resolve(const BalanceSheet& sheet, const TopologySpec& spec);

struct NetworkProvenance {
    std::uint64_t seed = 0;
    double z = 0.0;
    std::optional<double> target_density;
    double phi = 1.0;
    bool allow_self_loops = true;
    std::optional<BlockSpec> block;
    std::optional<ZMatrix> block_z;

    friend bool operator==(const NetworkProvenance&, const NetworkProvenance&) = default;
};

// Asset matrix: weights(i, j) = exposure of i to j.
struct WeightedNetwork {
    SquareMatrix weights;
    NetworkProvenance provenance;

    [[nodiscard]] std::size_t size() const noexcept { return weights.size(); }

    friend bool operator==(const WeightedNetwork&, const WeightedNetwork&) = default;
};

// Bernoulli adjacency per ordered pair, weight A_i L_j / (W p_ij) on present links,
// W = sqrt(sum A * sum L). Requires a closed sheet.
WeightedNetwork sample(const BalanceSheet& sheet, const TopologySpec& spec, std::uint64_t seed);
WeightedNetwork sample(const BalanceSheet& sheet, const ResolvedTopology& topology, std::uint64_t seed);

double realized_density(const WeightedNetwork& net, bool count_self_loops = true);
double realized_density(const SquareMatrix& weights, bool count_self_loops = true);

}  // namespace netrisk
