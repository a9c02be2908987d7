#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pagraph/graph.hpp"

namespace pagraph {

// Versioned binary image of a GraphState. Layout (all little-endian):
//
//   magic "PAGRAPH\0" | u32 version | u32 C | f64 delta | u64 n
//   u8 keep_adjacency | u64 rebuild_period | u64 steps_since_rebuild
//   rng: u64 seed | u64 stream | u64 next_block | u32 pos
//   u64 degree[1..n] | u32 arrival_target[1..n][C] | f64 weight_cell[0..n]
//   u64 FNV-1a checksum of everything above
//
// Adjacency is rebuilt from the arrival targets; the raw weight cells keep the
// continuation bit-identical even when delta is not a dyadic rational.
struct Snapshot {
  static constexpr std::uint32_t kVersion = 1;
  std::vector<std::uint8_t> bytes;
};

Snapshot snapshot(const GraphState& state);
GraphState restore(const Snapshot& snap);

void save_snapshot(const GraphState& state, const std::filesystem::path& path);
GraphState load_snapshot(const std::filesystem::path& path);

}  // namespace pagraph
