#include "netrisk/balance_sheet.hpp"

#include <cmath>
#include <random>
#include <string>
#include <unordered_set>

#include "netrisk/errors.hpp"
#include "text_io.hpp"

namespace netrisk {

namespace {

void validate_bank(const Bank& bank, const std::string& where) {
    if (bank.id.empty()) {
        throw ValidationError(where + ": missing id");
    }
    if (!std::isfinite(bank.assets) || !std::isfinite(bank.liabilities) || !std::isfinite(bank.equity)) {
        throw ValidationError(where + ": non-finite value for bank '" + bank.id + "'");
    }
    if (bank.assets < 0.0) {
        throw ValidationError(where + ": negative assets for bank '" + bank.id + "'");
    }
    if (bank.liabilities < 0.0) {
        throw ValidationError(where + ": negative liabilities for bank '" + bank.id + "'");
    }
    if (bank.equity <= 0.0) {
        throw ValidationError(where + ": equity must be > 0 for bank '" + bank.id + "' (already defaulted)");
    }
}

double sum(const std::vector<Bank>& banks, double Bank::*field) {
    double total = 0.0;
    for (const auto& b : banks) {
        total += b.*field;
    }
    return total;
}

}  // namespace

BalanceSheet::BalanceSheet(std::vector<Bank> banks, bool closed) : banks_(std::move(banks)), closed_(closed) {
    if (banks_.size() < 2) {
        throw ValidationError("balance sheet needs at least 2 banks, got " + std::to_string(banks_.size()));
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < banks_.size(); ++i) {
        const auto where = "bank " + std::to_string(i + 1);
        validate_bank(banks_[i], where);
        if (!seen.insert(banks_[i].id).second) {
            throw ValidationError(where + ": duplicate id '" + banks_[i].id + "'");
        }
    }
    if (closed_) {
        const double a = total_assets();
        if (std::abs(a - total_liabilities()) > 1e-9 * a) {
            throw ValidationError("balance sheet flagged closed but total assets != total liabilities");
        }
    }
}

double BalanceSheet::total_assets() const noexcept { return sum(banks_, &Bank::assets); }
double BalanceSheet::total_liabilities() const noexcept { return sum(banks_, &Bank::liabilities); }
double BalanceSheet::total_equity() const noexcept { return sum(banks_, &Bank::equity); }

double BalanceSheet::scale() const noexcept { return std::sqrt(total_assets() * total_liabilities()); }

std::vector<double> BalanceSheet::assets() const {
    std::vector<double> out;
    out.reserve(banks_.size());
    for (const auto& b : banks_) out.push_back(b.assets);
    return out;
}

std::vector<double> BalanceSheet::liabilities() const {
    std::vector<double> out;
    out.reserve(banks_.size());
    for (const auto& b : banks_) out.push_back(b.liabilities);
    return out;
}

std::vector<double> BalanceSheet::equities() const {
    std::vector<double> out;
    out.reserve(banks_.size());
    for (const auto& b : banks_) out.push_back(b.equity);
    return out;
}

BalanceSheet parse_csv(std::string_view text) {
    const auto all = detail::lines(text);
    std::size_t idx = 0;
    auto skippable = [](std::string_view line) {
        const auto t = detail::trim(line);
        return t.empty() || t.front() == '#';
    };
    while (idx < all.size() && skippable(all[idx])) {
        ++idx;
    }
    if (idx == all.size()) {
        throw ValidationError("balance sheet CSV is empty");
    }
    {
        const auto header = detail::split(all[idx], ',');
        const char* expected[] = {"id", "assets", "liabilities", "equity"};
        bool ok = header.size() == 4;
        for (std::size_t k = 0; ok && k < 4; ++k) {
            ok = detail::trim(header[k]) == expected[k];
        }
        if (!ok) {
            throw ValidationError("balance sheet CSV header must be 'id,assets,liabilities,equity'");
        }
    }
    ++idx;

    std::vector<Bank> banks;
    std::unordered_set<std::string> seen;
    std::size_t row = 0;
    for (; idx < all.size(); ++idx) {
        if (skippable(all[idx])) {
            continue;
        }
        ++row;
        const auto where = "row " + std::to_string(row) + " (line " + std::to_string(idx + 1) + ")";
        const auto fields = detail::split(all[idx], ',');
        if (fields.size() != 4) {
            throw ValidationError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
        }
        Bank bank;
        bank.id = std::string(detail::trim(fields[0]));
        try {
            bank.assets = detail::parse_double(fields[1]);
            bank.liabilities = detail::parse_double(fields[2]);
            bank.equity = detail::parse_double(fields[3]);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(where + ": " + e.what());
        }
        validate_bank(bank, where);
        if (!seen.insert(bank.id).second) {
            throw ValidationError(where + ": duplicate id '" + bank.id + "'");
        }
        banks.push_back(std::move(bank));
    }
    if (banks.size() < 2) {
        throw ValidationError("balance sheet needs at least 2 banks, got " + std::to_string(banks.size()));
    }
    return BalanceSheet(std::move(banks), false);
}

BalanceSheet load_csv(const std::filesystem::path& path) {
    const auto text = detail::read_file(path);
    try {
        return parse_csv(text);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string format_csv(const BalanceSheet& sheet) {
    std::string out = "id,assets,liabilities,equity\n";
    for (const auto& b : sheet.banks()) {
        out += b.id;
        out += ',';
        out += detail::format_double17(b.assets);
        out += ',';
        out += detail::format_double17(b.liabilities);
        out += ',';
        out += detail::format_double17(b.equity);
        out += '\n';
    }
    return out;
}

void write_csv(const BalanceSheet& sheet, const std::filesystem::path& path) {
    detail::write_file_atomic(path, format_csv(sheet));
}

BalanceSheet close_system(const BalanceSheet& sheet) {
    const double total_a = sheet.total_assets();
    const double total_l = sheet.total_liabilities();
    if (total_a <= 0.0 || total_l <= 0.0) {
        throw ValidationError("cannot close a system with zero total assets or liabilities");
    }
    const double s = std::sqrt(total_l / total_a);
    std::vector<Bank> banks(sheet.banks().begin(), sheet.banks().end());
    for (auto& b : banks) {
        b.assets *= s;
        b.liabilities /= s;
    }
    return BalanceSheet(std::move(banks), true);
}

BalanceSheet synthesize(const SynthesisOptions& options) {
    if (options.n < 2) {
        throw ValidationError("synthesize: n must be >= 2");
    }
    if (!(options.tail_exponent > 1.0) || !std::isfinite(options.tail_exponent)) {
        throw ValidationError("synthesize: tail_exponent must be > 1");
    }
    if (!(options.equity_ratio > 0.0) || !std::isfinite(options.equity_ratio)) {
        throw ValidationError("synthesize: equity_ratio must be > 0");
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Inverse CDF of Pareto(k, 1): (1 - U)^(-1/k), 1 - U in (0, 1].
    auto pareto = [&] { return std::pow(1.0 - unit(rng), -1.0 / options.tail_exponent); };

    std::vector<Bank> banks(options.n);
    for (std::size_t i = 0; i < options.n; ++i) {
        banks[i].id = "b" + std::to_string(i);
        banks[i].assets = pareto();
        banks[i].liabilities = pareto();
        banks[i].equity = 1.0;  // placeholder until assets are closed
    }
    auto closed = close_system(BalanceSheet(std::move(banks)));
    std::vector<Bank> out(closed.banks().begin(), closed.banks().end());
    for (auto& b : out) {
        b.equity = options.equity_ratio * b.assets;
    }
    return BalanceSheet(std::move(out), true);
}

BalanceSheet synthesize(std::size_t n, double tail_exponent, std::uint64_t seed) {
    return synthesize(SynthesisOptions{.n = n, .tail_exponent = tail_exponent, .seed = seed});
}

}  // namespace netrisk
