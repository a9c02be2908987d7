#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "pagraph/graph.hpp"

namespace pagraph {

std::string_view version();
/// git-describe style id captured at configure time ("unknown" outside a checkout).
std::string_view build_id();

struct RunInfo {
  std::string command;
  ModelParams params;
  std::uint64_t seed = 0;
};

/// {version, build_id, command, params: {edges_per_arrival, delta}, seed}
nlohmann::json metadata_block(const RunInfo& info);
/// The same block as "# key=value" lines, prefixed to CSV outputs.
void write_metadata_comment(std::ostream& out, const RunInfo& info);

/// source,target,multiplicity. Node 1 contributes (1,1,C); every later node v
/// one row per distinct target t of its arrival.
void write_edge_list(std::ostream& out, const GraphState& g);
/// node,degree
void write_degrees(std::ostream& out, const GraphState& g);

/// Opens `path` for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace pagraph
