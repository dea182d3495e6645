#include "netrisk/sweep_io.hpp"

#include <cmath>

#include "netrisk/errors.hpp"
#include "text_io.hpp"

namespace netrisk {

namespace {

std::string format_alpha(double alpha) {
    return std::isinf(alpha) ? std::string("inf") : detail::format_double(alpha);
}

double parse_alpha(std::string_view text) {
    return detail::trim(text) == "inf" ? kInfiniteAlpha : detail::parse_double(text);
}

std::optional<double> parse_optional(std::string_view text) {
    if (detail::trim(text).empty()) return std::nullopt;
    return detail::parse_double(text);
}

}  // namespace

std::string format_sweep_csv(const SweepResult& result) {
    std::string out(kSweepCsvHeader);
    out += '\n';
    for (const auto& r : result.records) {
        out += r.rho_target ? detail::format_double(*r.rho_target) : std::string();
        out += ',' + detail::format_double(r.rho_realized);
        out += ',' + detail::format_double(r.theta);
        out += ',' + format_alpha(r.alpha);
        out += ',' + detail::format_double(r.phi);
        out += ',' + std::string(r.block ? to_string(*r.block) : "none");
        out += ',' + (r.mixing ? detail::format_double(*r.mixing) : std::string());
        out += ',' + std::to_string(r.replicate);
        out += ',' + std::to_string(r.seed);
        out += ',' + detail::format_double(r.e_loss);
        out += ',' + detail::format_double(r.e_loss_star);
        out += r.converged ? ",1" : ",0";
        out += ',' + std::to_string(r.iterations);
        out += '\n';
    }
    return out;
}

std::vector<SweepRecord> parse_sweep_csv(std::string_view text) {
    const auto rows = detail::lines(text);
    if (rows.empty() || rows.front() != kSweepCsvHeader) {
        throw ValidationError("sweep CSV: unexpected header");
    }
    std::vector<SweepRecord> out;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto f = detail::split(rows[k], ',');
        if (f.size() != 13) {
            throw ValidationError("sweep CSV line " + std::to_string(k + 1) + ": expected 13 fields");
        }
        try {
            SweepRecord r;
            r.rho_target = parse_optional(f[0]);
            r.rho_realized = detail::parse_double(f[1]);
            r.theta = detail::parse_double(f[2]);
            r.alpha = parse_alpha(f[3]);
            r.phi = detail::parse_double(f[4]);
            if (f[5] != "none") r.block = parse_block_kind(f[5]);
            r.mixing = parse_optional(f[6]);
            r.replicate = detail::parse_uint(f[7]);
            r.seed = detail::parse_uint(f[8]);
            r.e_loss = detail::parse_double(f[9]);
            r.e_loss_star = detail::parse_double(f[10]);
            r.converged = detail::parse_uint(f[11]) != 0;
            r.iterations = detail::parse_uint(f[12]);
            out.push_back(r);
        } catch (const std::invalid_argument& e) {
            throw ValidationError("sweep CSV line " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return out;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
    detail::write_file_atomic(path, format_sweep_csv(result));
}

}  // namespace netrisk
