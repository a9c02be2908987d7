#include "pagraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pagraph/errors.hpp"

namespace pagraph {

void ModelParams::validate() const {
  if (edges_per_arrival < 1) throw DomainError("C must be at least 1");
  if (!std::isfinite(delta) || !(delta > -static_cast<double>(edges_per_arrival))) {
    throw DomainError("delta must satisfy delta > -C (got delta=" + std::to_string(delta) +
                      ", C=" + std::to_string(edges_per_arrival) + ")");
  }
}

std::uint32_t StepOutcome::stubs_on(NodeId node) const {
  for (const Hit& h : hits) {
    if (h.node == node) return h.stubs;
  }
  return 0;
}

GraphState::GraphState(ModelParams params, Philox rng, GraphOptions options)
    : params_(params), options_(options), rng_(rng) {
  params_.validate();
  if (options_.rebuild_period == 0) throw DomainError("rebuild period must be positive");
  const std::uint32_t c = params_.edges_per_arrival;
  n_ = 1;
  degrees_ = {0, 2ull * c};
  stubs_.assign(c, NodeId{1});
  if (options_.keep_adjacency) adjacency_ = {{}, {NodeId{1}}};
  weights_.append(static_cast<double>(2 * c) + params_.delta);
}

GraphState new_graph(const ModelParams& params, std::uint64_t seed, GraphOptions options) {
  return GraphState(params, Philox::for_stream(seed, 0), options);
}

std::span<const NodeId> GraphState::arrival_targets(NodeId v) const {
  if (v < 1 || v > n_) throw DomainError("node id out of range");
  const std::size_t c = params_.edges_per_arrival;
  return std::span(stubs_).subspan((v - 1) * c, c);
}

std::span<const NodeId> GraphState::neighbors(NodeId i) const {
  if (!options_.keep_adjacency) throw DomainError("adjacency is not retained for this graph");
  if (i < 1 || i > n_) throw DomainError("node id out of range");
  return adjacency_[i];
}

void GraphState::draw_outcome(Philox& rng, StepOutcome& out) const {
  const std::uint32_t c = params_.edges_per_arrival;
  const double total = total_weight();
  out.new_node = static_cast<NodeId>(n_ + 1);
  out.targets.resize(c);
  // All C draws use the pre-arrival weights.
  for (std::uint32_t s = 0; s < c; ++s) {
    out.targets[s] = sample_weighted(weights_, rng.uniform01() * total);
  }
  std::sort(out.targets.begin(), out.targets.end());
  out.hits.clear();
  for (NodeId t : out.targets) {
    if (!out.hits.empty() && out.hits.back().node == t) {
      ++out.hits.back().stubs;
    } else {
      out.hits.push_back({t, 1});
    }
  }
}

StepOutcome GraphState::draw_outcome(Philox& rng) const {
  StepOutcome out;
  draw_outcome(rng, out);
  return out;
}

void GraphState::apply(const StepOutcome& outcome) {
  if (outcome.new_node != n_ + 1) throw DomainError("outcome does not extend the current graph");
  if (n_ + 1 >= std::numeric_limits<NodeId>::max()) throw ResourceError("node id space exhausted");
  const std::uint32_t c = params_.edges_per_arrival;
  const NodeId v = outcome.new_node;

  for (const Hit& h : outcome.hits) {
    degrees_[h.node] += h.stubs;
    weights_.add(h.node, static_cast<double>(h.stubs));
  }
  degrees_.push_back(c);
  weights_.append(static_cast<double>(c) + params_.delta);
  stubs_.insert(stubs_.end(), outcome.targets.begin(), outcome.targets.end());

  if (options_.keep_adjacency) {
    std::vector<NodeId> own;
    own.reserve(outcome.hits.size());
    for (const Hit& h : outcome.hits) {
      adjacency_[h.node].push_back(v);  // v exceeds every existing id, order is kept
      own.push_back(h.node);
    }
    adjacency_.push_back(std::move(own));
  }

  ++n_;
  if (++steps_since_rebuild_ >= options_.rebuild_period) rebuild_weights();
}

StepOutcome GraphState::step() {
  StepOutcome out;
  step_into(out);
  return out;
}

void GraphState::step_into(StepOutcome& out) {
  draw_outcome(rng_, out);
  apply(out);
}

void GraphState::rebuild_weights() {
  std::vector<double> w(n_);
  for (std::uint64_t i = 1; i <= n_; ++i) w[i - 1] = static_cast<double>(degrees_[i]) + params_.delta;
  weights_.rebuild(w);
  steps_since_rebuild_ = 0;
}

void evolve(GraphState& state, std::uint64_t target_n, std::span<const StepObserver> observers) {
  if (target_n < state.n()) throw DomainError("evolve target is behind the current graph");
  evolve_with(state, target_n, [&](const StepOutcome& outcome, const GraphState& pre) {
    for (const auto& observer : observers) observer(outcome, pre);
  });
}

}  // namespace pagraph
