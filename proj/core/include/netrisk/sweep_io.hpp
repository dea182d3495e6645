#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "netrisk/stress.hpp"

namespace netrisk {

inline constexpr std::string_view kSweepCsvHeader =
    "rho_target,rho_realized,theta,alpha,phi,block_kind,mixing,replicate,seed,e_loss,e_loss_star,converged,"
    "iterations";

// Long format, one row per record. alpha = infinity is written as `inf`; absent
// rho_target / mixing are empty fields and a missing block is `none`.
std::string format_sweep_csv(const SweepResult& result);
std::vector<SweepRecord> parse_sweep_csv(std::string_view text);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);

}  // namespace netrisk
