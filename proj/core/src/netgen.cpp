#include "netrisk/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "netrisk/errors.hpp"

namespace netrisk {

std::string_view to_string(BlockKind kind) noexcept {
    switch (kind) {
        case BlockKind::modular: return "modular";
        case BlockKind::bipartite: return "bipartite";
        case BlockKind::core_periphery: return "core_periphery";
    }
    return "unknown";
}

BlockKind parse_block_kind(std::string_view text) {
    if (text == "modular") return BlockKind::modular;
    if (text == "bipartite") return BlockKind::bipartite;
    if (text == "core_periphery") return BlockKind::core_periphery;
    throw ValidationError("unknown block kind '" + std::string(text) +
                          "' (expected modular, bipartite or core_periphery)");
}

Partition random_partition(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    Partition partition(n, Group::second);
    const std::size_t first_size = (n + 1) / 2;
    for (std::size_t k = 0; k < first_size; ++k) {
        partition[order[k]] = Group::first;
    }
    return partition;
}

std::vector<std::size_t> members(const Partition& partition, Group group) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (partition[i] == group) {
            out.push_back(i);
        }
    }
    return out;
}

double ZMatrix::at(Group from, Group to) const noexcept {
    if (from == Group::first) {
        return to == Group::first ? z11 : z12;
    }
    return to == Group::first ? z21 : z22;
}

void BlockSpec::validate(std::size_t n) const {
    if (!(mixing >= 0.0 && mixing <= 1.0)) {
        throw ValidationError("block mixing must lie in [0, 1]");
    }
    if (partition.size() != n) {
        throw ValidationError("block partition covers " + std::to_string(partition.size()) +
                              " nodes, expected " + std::to_string(n));
    }
    bool has_first = false;
    bool has_second = false;
    for (auto g : partition) {
        if (g == Group::first) {
            has_first = true;
        } else if (g == Group::second) {
            has_second = true;
        } else {
            throw ValidationError("block partition entries must be group 1 or 2");
        }
    }
    if (!has_first || !has_second) {
        throw ValidationError("block partition leaves a group empty");
    }
}

ZMatrix block_z(BlockKind kind, double mixing, double z) {
    if (!(mixing >= 0.0 && mixing <= 1.0)) {
        throw ValidationError("block mixing must lie in [0, 1]");
    }
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw ValidationError("z must be finite and >= 0");
    }
    switch (kind) {
        case BlockKind::modular: return {z, mixing * z, mixing * z, z};
        case BlockKind::bipartite: return {mixing * z, z, z, mixing * z};
        case BlockKind::core_periphery: return {z, mixing * z, mixing * z, mixing * mixing * z};
    }
    throw ValidationError("unknown block kind");
}

TopologySpec TopologySpec::with_z(double z, double phi) {
    TopologySpec spec;
    spec.z = z;
    spec.phi = phi;
    return spec;
}

TopologySpec TopologySpec::with_density(double rho, double phi) {
    TopologySpec spec;
    spec.target_density = rho;
    spec.phi = phi;
    return spec;
}

void TopologySpec::validate(std::size_t n) const {
    if (z.has_value() == target_density.has_value()) {
        throw ValidationError("topology: exactly one of z and target density must be set");
    }
    if (z && (!(*z >= 0.0) || !std::isfinite(*z))) {
        throw ValidationError("topology: z must be finite and >= 0");
    }
    if (target_density && !(*target_density > 0.0 && *target_density < 1.0)) {
        throw ValidationError("topology: target density must lie in (0, 1)");
    }
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw ValidationError("topology: phi must lie in [0, 1]");
    }
    if (block) {
        block->validate(n);
    }
}

namespace {

void check_phi(double phi) {
    if (!(phi >= 0.0 && phi <= 1.0)) {
        throw ValidationError("phi must lie in [0, 1]");
    }
}

// (a l)^phi with 0^0 = 1.
double fitness(double a, double l, double phi) {
    if (phi == 0.0) {
        return 1.0;
    }
    const double product = a * l;
    if (product == 0.0) {
        return 0.0;
    }
    return phi == 1.0 ? product : std::pow(product, phi);
}

double probability(double z, double y) noexcept {
    const double q = z * y;
    return q / (1.0 + q);
}

}  // namespace

double edge_probability(double a, double l, double z, double phi) {
    check_phi(phi);
    if (!(a >= 0.0) || !(l >= 0.0) || !(z >= 0.0)) {
        throw ValidationError("edge_probability: inputs must be non-negative");
    }
    return probability(z, fitness(a, l, phi));
}

PairFitness::PairFitness(const BalanceSheet& sheet, double phi, const BlockSpec* block, bool allow_self_loops)
    : n_(sheet.size()), allow_self_loops_(allow_self_loops), y_(sheet.size()) {
    check_phi(phi);
    if (block) {
        block->validate(n_);
    }
    const auto factors = block ? block_z(block->kind, block->mixing, 1.0) : ZMatrix{1.0, 1.0, 1.0, 1.0};
    const auto a = sheet.assets();
    const auto l = sheet.liabilities();
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (!allowed(i, j)) {
                continue;
            }
            double y = fitness(a[i], l[j], phi);
            if (block) {
                y *= factors.at(block->partition[i], block->partition[j]);
            }
            y_(i, j) = y;
            if (y > 0.0) {
                ++positive_pairs_;
            }
        }
    }
}

std::size_t PairFitness::pair_count() const noexcept {
    return allow_self_loops_ ? n_ * n_ : n_ * n_ - n_;
}

double PairFitness::density_supremum() const noexcept {
    return static_cast<double>(positive_pairs_) / static_cast<double>(pair_count());
}

double PairFitness::expected_density(double z) const noexcept {
    double total = 0.0;
    for (double y : y_.values()) {
        total += probability(z, y);
    }
    return total / static_cast<double>(pair_count());
}

double expected_density(const BalanceSheet& sheet, double z, double phi, bool allow_self_loops,
                        const BlockSpec* block) {
    if (!(z >= 0.0) || !std::isfinite(z)) {
        throw ValidationError("z must be finite and >= 0");
    }
    return PairFitness(sheet, phi, block, allow_self_loops).expected_density(z);
}

double calibrate_z(const BalanceSheet& sheet, double target_density, double phi, bool allow_self_loops,
                   const BlockSpec* block) {
    if (!(target_density > 0.0 && target_density < 1.0)) {
        throw ValidationError("target density must lie in (0, 1)");
    }
    const PairFitness fitness(sheet, phi, block, allow_self_loops);
    if (target_density >= fitness.density_supremum() - kCalibrationTolerance) {
        throw ValidationError("target density " + std::to_string(target_density) +
                              " unreachable: at most " + std::to_string(fitness.density_supremum()) +
                              " of pairs can carry a link");
    }

    // Bracket in log z by factor-16 steps, then bisect on the geometric midpoint.
    constexpr double kStep = 16.0;
    double lo = 1.0;
    double hi = 1.0;
    double f = fitness.expected_density(1.0);
    if (std::abs(f - target_density) <= kCalibrationTolerance) {
        return 1.0;
    }
    if (f < target_density) {
        while (f < target_density) {
            lo = hi;
            hi *= kStep;
            if (!std::isfinite(hi) || hi > 1e300) {
                throw NumericError("calibrate_z: could not bracket the target density from above");
            }
            f = fitness.expected_density(hi);
        }
    } else {
        while (f > target_density) {
            hi = lo;
            lo /= kStep;
            if (lo < 1e-300) {
                throw NumericError("calibrate_z: could not bracket the target density from below");
            }
            f = fitness.expected_density(lo);
        }
    }
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
        const double mid = std::sqrt(lo * hi);
        const double value = fitness.expected_density(mid);
        if (std::abs(value - target_density) <= kCalibrationTolerance) {
            return mid;
        }
        if (value < target_density) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw NumericError("calibrate_z: bisection did not reach tolerance within " +
                       std::to_string(kMaxBisectionSteps) + " steps");
}

ResolvedTopology resolve(const BalanceSheet& sheet, const TopologySpec& spec) {
    spec.validate(sheet.size());
    ResolvedTopology out{spec, spec.target_density};
    if (spec.target_density) {
        const auto* block = spec.block ? &*spec.block : nullptr;
        out.spec.z = calibrate_z(sheet, *spec.target_density, spec.phi, spec.allow_self_loops, block);
        out.spec.target_density.reset();
    }
    return out;
}

WeightedNetwork sample(const BalanceSheet& sheet, const ResolvedTopology& topology, std::uint64_t seed) {
    const auto& spec = topology.spec;
    spec.validate(sheet.size());
    if (!spec.z) {
        throw ValidationError("sample: topology must carry a resolved z");
    }
    if (!sheet.closed()) {
        throw ValidationError("sample: balance sheet must be closed first");
    }
    const double z = *spec.z;
    const auto* block = spec.block ? &*spec.block : nullptr;
    const PairFitness fitness(sheet, spec.phi, block, spec.allow_self_loops);
    const auto a = sheet.assets();
    const auto l = sheet.liabilities();
    const double scale = sheet.scale();
    const std::size_t n = sheet.size();

    WeightedNetwork net{SquareMatrix(n), {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!fitness.allowed(i, j)) {
                continue;
            }
            // Draw for every allowed pair so the stream stays aligned across specs.
            const double u = unit(rng);
            const double p = probability(z, fitness(i, j));
            if (u < p) {
                net.weights(i, j) = a[i] * l[j] / (scale * p);
            }
        }
    }

    auto& prov = net.provenance;
    prov.seed = seed;
    prov.z = z;
    prov.target_density = topology.target_density;
    prov.phi = spec.phi;
    prov.allow_self_loops = spec.allow_self_loops;
    prov.block = spec.block;
    if (spec.block) {
        prov.block_z = block_z(spec.block->kind, spec.block->mixing, z);
    }
    return net;
}

WeightedNetwork sample(const BalanceSheet& sheet, const TopologySpec& spec, std::uint64_t seed) {
    return sample(sheet, resolve(sheet, spec), seed);
}

double realized_density(const SquareMatrix& weights, bool count_self_loops) {
    const std::size_t n = weights.size();
    if (n == 0) {
        return 0.0;
    }
    std::size_t links = weights.count_nonzero();
    std::size_t pairs = n * n;
    if (!count_self_loops) {
        for (std::size_t i = 0; i < n; ++i) {
            if (weights(i, i) != 0.0) {
                --links;
            }
        }
        pairs -= n;
    }
    return pairs == 0 ? 0.0 : static_cast<double>(links) / static_cast<double>(pairs);
}

double realized_density(const WeightedNetwork& net, bool count_self_loops) {
    return realized_density(net.weights, count_self_loops);
}

}  // namespace netrisk
