#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "netrisk/netgen.hpp"

namespace netrisk {

// Sparse `source,target,weight` edge list, 0-based node indices, row-major order.
std::string format_edge_list(const WeightedNetwork& net);

// Provenance sidecar: n, seed, z, target_density, phi, self_loops, block kind,
// mixing, block z values and partition (groups as 1/2).
std::string format_provenance_json(const WeightedNetwork& net);

WeightedNetwork parse_network(std::string_view edge_list_csv, std::string_view provenance_json);

// Writes `<stem>.csv` and `<stem>.json` into `dir`, each atomically.
void write_network(const WeightedNetwork& net, const std::filesystem::path& dir, const std::string& stem = "network");
WeightedNetwork load_network(const std::filesystem::path& edge_list, const std::filesystem::path& provenance);

}  // namespace netrisk
