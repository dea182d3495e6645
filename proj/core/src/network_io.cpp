#include "netrisk/network_io.hpp"

#include <nlohmann/json.hpp>

#include "netrisk/errors.hpp"
#include "text_io.hpp"

namespace netrisk {

using nlohmann::json;

std::string format_edge_list(const WeightedNetwork& net) {
    std::string out = "source,target,weight\n";
    const std::size_t n = net.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = net.weights(i, j);
            if (w == 0.0) {
                continue;
            }
            out += std::to_string(i);
            out += ',';
            out += std::to_string(j);
            out += ',';
            out += detail::format_double(w);
            out += '\n';
        }
    }
    return out;
}

std::string format_provenance_json(const WeightedNetwork& net) {
    const auto& p = net.provenance;
    json doc;
    doc["n"] = net.size();
    doc["seed"] = p.seed;
    doc["z"] = p.z;
    doc["target_density"] = p.target_density ? json(*p.target_density) : json(nullptr);
    doc["phi"] = p.phi;
    doc["self_loops"] = p.allow_self_loops;
    if (p.block) {
        doc["block"] = std::string(to_string(p.block->kind));
        doc["mixing"] = p.block->mixing;
        json groups = json::array();
        for (auto g : p.block->partition) {
            groups.push_back(static_cast<int>(g));
        }
        doc["partition"] = std::move(groups);
    } else {
        doc["block"] = "none";
        doc["mixing"] = nullptr;
        doc["partition"] = nullptr;
    }
    if (p.block_z) {
        doc["block_z"] = {p.block_z->z11, p.block_z->z12, p.block_z->z21, p.block_z->z22};
    } else {
        doc["block_z"] = nullptr;
    }
    return doc.dump(2) + "\n";
}

WeightedNetwork parse_network(std::string_view edge_list_csv, std::string_view provenance_json) {
    json doc;
    try {
        doc = json::parse(provenance_json);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("network provenance: ") + e.what());
    }

    WeightedNetwork net;
    try {
        const auto n = doc.at("n").get<std::size_t>();
        net.weights = SquareMatrix(n);
        auto& p = net.provenance;
        p.seed = doc.at("seed").get<std::uint64_t>();
        p.z = doc.at("z").get<double>();
        if (!doc.at("target_density").is_null()) {
            p.target_density = doc.at("target_density").get<double>();
        }
        p.phi = doc.at("phi").get<double>();
        p.allow_self_loops = doc.at("self_loops").get<bool>();
        const auto kind = doc.at("block").get<std::string>();
        if (kind != "none") {
            BlockSpec block;
            block.kind = parse_block_kind(kind);
            block.mixing = doc.at("mixing").get<double>();
            for (const auto& g : doc.at("partition")) {
                const int v = g.get<int>();
                if (v != 1 && v != 2) {
                    throw ValidationError("network provenance: partition entries must be 1 or 2");
                }
                block.partition.push_back(static_cast<Group>(v));
            }
            block.validate(n);
            p.block = std::move(block);
            const auto& bz = doc.at("block_z");
            p.block_z = ZMatrix{bz.at(0).get<double>(), bz.at(1).get<double>(), bz.at(2).get<double>(),
                                bz.at(3).get<double>()};
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("network provenance: ") + e.what());
    }

    const auto rows = detail::lines(edge_list_csv);
    if (rows.empty() || detail::trim(rows.front()) != "source,target,weight") {
        throw ValidationError("edge list header must be 'source,target,weight'");
    }
    const std::size_t n = net.size();
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto line = detail::trim(rows[k]);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto where = "edge list line " + std::to_string(k + 1);
        const auto fields = detail::split(line, ',');
        if (fields.size() != 3) {
            throw ValidationError(where + ": expected 3 fields");
        }
        std::size_t i = 0;
        std::size_t j = 0;
        double w = 0.0;
        try {
            i = detail::parse_uint(fields[0]);
            j = detail::parse_uint(fields[1]);
            w = detail::parse_double(fields[2]);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(where + ": " + e.what());
        }
        if (i >= n || j >= n) {
            throw ValidationError(where + ": node index out of range");
        }
        if (!(w > 0.0)) {
            throw ValidationError(where + ": weight must be positive");
        }
        net.weights(i, j) = w;
    }
    return net;
}

void write_network(const WeightedNetwork& net, const std::filesystem::path& dir, const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
    detail::write_file_atomic(dir / (stem + ".csv"), format_edge_list(net));
    detail::write_file_atomic(dir / (stem + ".json"), format_provenance_json(net));
}

WeightedNetwork load_network(const std::filesystem::path& edge_list, const std::filesystem::path& provenance) {
    return parse_network(detail::read_file(edge_list), detail::read_file(provenance));
}

}  // namespace netrisk
