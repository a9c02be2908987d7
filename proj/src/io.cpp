#include "pagraph/io.hpp"

#include <fstream>

#include "pagraph/errors.hpp"

#ifndef PAGRAPH_VERSION
#define PAGRAPH_VERSION "0.0.0"
#endif
#ifndef PAGRAPH_BUILD_ID
#define PAGRAPH_BUILD_ID "unknown"
#endif

namespace pagraph {

std::string_view version() { return PAGRAPH_VERSION; }
std::string_view build_id() { return PAGRAPH_BUILD_ID; }

nlohmann::json metadata_block(const RunInfo& info) {
  return {{"version", std::string(version())},
          {"build_id", std::string(build_id())},
          {"command", info.command},
          {"params", {{"edges_per_arrival", info.params.edges_per_arrival}, {"delta", info.params.delta}}},
          {"seed", info.seed}};
}

void write_metadata_comment(std::ostream& out, const RunInfo& info) {
  out << "# version=" << version() << " build_id=" << build_id() << " command=" << info.command
      << " edges_per_arrival=" << info.params.edges_per_arrival << " delta=" << info.params.delta
      << " seed=" << info.seed << '\n';
}

void write_edge_list(std::ostream& out, const GraphState& g) {
  out << "source,target,multiplicity\n";
  for (NodeId v = 1; v <= g.n(); ++v) {
    const auto targets = g.arrival_targets(v);  // sorted
    std::size_t k = 0;
    while (k < targets.size()) {
      std::size_t run = 1;
      while (k + run < targets.size() && targets[k + run] == targets[k]) ++run;
      out << v << ',' << targets[k] << ',' << run << '\n';
      k += run;
    }
  }
}

void write_degrees(std::ostream& out, const GraphState& g) {
  out << "node,degree\n";
  const auto d = g.degrees();
  for (std::size_t k = 0; k < d.size(); ++k) out << k + 1 << ',' << d[k] << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace pagraph
