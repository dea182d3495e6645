#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace netrisk {

// One bank's interbank position. assets = money lent to other banks,
// liabilities = money borrowed from them, equity = loss-absorbing capital.
struct Bank {
    std::string id;
    double assets = 0.0;
    double liabilities = 0.0;
    double equity = 0.0;

    friend bool operator==(const Bank&, const Bank&) = default;
};

// Ordered set of banks; index in `banks()` is the node index used by every
// network and dynamics routine. Immutable once built.
class BalanceSheet {
public:
    // Validates every bank and N >= 2. Throws ValidationError.
    explicit BalanceSheet(std::vector<Bank> banks, bool closed = false);

    [[nodiscard]] std::size_t size() const noexcept { return banks_.size(); }
    [[nodiscard]] bool closed() const noexcept { return closed_; }
    [[nodiscard]] std::span<const Bank> banks() const noexcept { return banks_; }
    [[nodiscard]] const Bank& operator[](std::size_t i) const { return banks_[i]; }

    [[nodiscard]] double total_assets() const noexcept;
    [[nodiscard]] double total_liabilities() const noexcept;
    [[nodiscard]] double total_equity() const noexcept;

    // sqrt(sum A * sum L); the weight normaliser of the fitness model.
    [[nodiscard]] double scale() const noexcept;

    [[nodiscard]] std::vector<double> assets() const;
    [[nodiscard]] std::vector<double> liabilities() const;
    [[nodiscard]] std::vector<double> equities() const;

    friend bool operator==(const BalanceSheet&, const BalanceSheet&) = default;

private:
    std::vector<Bank> banks_;
    bool closed_ = false;
};

// Parses `id,assets,liabilities,equity` CSV. Lines starting with '#' and blank
// lines are skipped. Errors carry the 1-based data row number.
BalanceSheet load_csv(const std::filesystem::path& path);
BalanceSheet parse_csv(std::string_view text);

void write_csv(const BalanceSheet& sheet, const std::filesystem::path& path);
std::string format_csv(const BalanceSheet& sheet);

// Rescales assets by sqrt(sum L / sum A) and liabilities by its inverse so both
// totals meet at sqrt(sum A * sum L). Equities are untouched. Applying it to an
// already closed sheet is a no-op up to rounding.
BalanceSheet close_system(const BalanceSheet& sheet);

struct SynthesisOptions {
    std::size_t n = 100;
    double tail_exponent = 2.5;
    double equity_ratio = 1.5;
    std::uint64_t seed = 0;
};

// Independent Pareto(tail_exponent, x_min = 1) assets and liabilities, closed,
// with equity = equity_ratio * closed assets. Deterministic in the seed.
BalanceSheet synthesize(const SynthesisOptions& options);
BalanceSheet synthesize(std::size_t n, double tail_exponent, std::uint64_t seed);

}  // namespace netrisk
