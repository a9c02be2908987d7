#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pagraph/rng.hpp"
#include "pagraph/weight_index.hpp"

namespace pagraph {

using NodeId = std::uint32_t;  // 1-based

struct ModelParams {
  std::uint32_t edges_per_arrival = 2;  // C
  double delta = 0.0;

  /// Throws DomainError unless C >= 1 and delta > -C.
  void validate() const;
  /// The common-friend limit theory needs C >= 2; C == 1 is simulated but flagged.
  bool in_theorem_range() const { return edges_per_arrival >= 2; }
  /// 2C + delta, the per-node share of the total attachment weight.
  double weight_per_node() const { return 2.0 * edges_per_arrival + delta; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct GraphOptions {
  bool keep_adjacency = true;
  std::uint64_t rebuild_period = std::uint64_t{1} << 20;
};

struct Hit {
  NodeId node;
  std::uint32_t stubs;
  friend bool operator==(const Hit&, const Hit&) = default;
};

// The arrival of one node: its C endpoint draws and the per-node stub counts
// (Delta_i(n+1)) they induce.
struct StepOutcome {
  NodeId new_node = 0;
  std::vector<NodeId> targets;  // sorted, size C
  std::vector<Hit> hits;        // sorted by node, distinct

  std::uint32_t stubs_on(NodeId node) const;
};

class GraphState {
 public:
  GraphState(ModelParams params, Philox rng, GraphOptions options = {});

  const ModelParams& params() const { return params_; }
  const GraphOptions& options() const { return options_; }
  std::uint64_t n() const { return n_; }

  std::uint64_t degree(NodeId i) const { return degrees_[i]; }
  double shifted_degree(NodeId i) const { return static_cast<double>(degrees_[i]) + params_.delta; }
  /// Degrees of nodes 1..n (element 0 is node 1).
  std::span<const std::uint64_t> degrees() const { return std::span(degrees_).subspan(1); }

  /// The C endpoints chosen by node v on arrival. Node 1 reports itself C
  /// times for its initial self-loops.
  std::span<const NodeId> arrival_targets(NodeId v) const;

  bool has_adjacency() const { return options_.keep_adjacency; }
  /// Distinct neighbours of i in ascending order; node 1 lists itself.
  std::span<const NodeId> neighbors(NodeId i) const;

  /// (2C + delta) n.
  double total_weight() const { return params_.weight_per_node() * static_cast<double>(n_); }
  double attach_probability(NodeId i) const { return shifted_degree(i) / total_weight(); }
  const WeightIndex& weight_index() const { return weights_; }

  Philox& rng() { return rng_; }
  const Philox& rng() const { return rng_; }

  /// Draws the next arrival from the current state without changing it.
  void draw_outcome(Philox& rng, StepOutcome& out) const;
  StepOutcome draw_outcome(Philox& rng) const;
  /// Commits an outcome produced by draw_outcome on this state.
  void apply(const StepOutcome& outcome);

  StepOutcome step();
  void step_into(StepOutcome& out);

  /// Recomputes the weight index exactly from integer degrees.
  void rebuild_weights();
  std::uint64_t steps_since_rebuild() const { return steps_since_rebuild_; }

 private:
  friend class SnapshotCodec;
  GraphState() = default;

  ModelParams params_;
  GraphOptions options_;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> degrees_;          // [0] unused
  std::vector<NodeId> stubs_;                   // C per node, node v at [(v-1)C, vC)
  std::vector<std::vector<NodeId>> adjacency_;  // [0] unused
  WeightIndex weights_;
  Philox rng_;
  std::uint64_t steps_since_rebuild_ = 0;
};

/// PA_1: a single node with C self-loops. Replicate streams use
/// GraphState(params, Philox::for_stream(seed, id)); this is stream 0.
GraphState new_graph(const ModelParams& params, std::uint64_t seed, GraphOptions options = {});

using StepObserver = std::function<void(const StepOutcome&, const GraphState& pre)>;

/// Steps until n == target_n, handing each outcome and the pre-step state to f.
template <typename F>
void evolve_with(GraphState& state, std::uint64_t target_n, F&& f) {
  StepOutcome outcome;
  while (state.n() < target_n) {
    state.draw_outcome(state.rng(), outcome);
    f(outcome, static_cast<const GraphState&>(state));
    state.apply(outcome);
  }
}

void evolve(GraphState& state, std::uint64_t target_n, std::span<const StepObserver> observers = {});

}  // namespace pagraph
