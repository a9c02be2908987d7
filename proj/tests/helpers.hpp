#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "pagraph/graph.hpp"

namespace testing {

inline pagraph::StepOutcome make_outcome(pagraph::NodeId new_node, std::vector<pagraph::NodeId> targets) {
  pagraph::StepOutcome out;
  out.new_node = new_node;
  std::sort(targets.begin(), targets.end());
  out.targets = targets;
  for (pagraph::NodeId t : targets) {
    if (!out.hits.empty() && out.hits.back().node == t) {
      ++out.hits.back().stubs;
    } else {
      out.hits.push_back({t, 1});
    }
  }
  return out;
}

// Builds a graph from explicit arrival targets for nodes 2, 3, ...
inline pagraph::GraphState build_graph(const pagraph::ModelParams& params,
                                       const std::vector<std::vector<pagraph::NodeId>>& arrivals,
                                       bool keep_adjacency = true) {
  pagraph::GraphOptions options;
  options.keep_adjacency = keep_adjacency;
  pagraph::GraphState g(params, pagraph::Philox(1, 0), options);
  for (const auto& targets : arrivals) g.apply(make_outcome(static_cast<pagraph::NodeId>(g.n() + 1), targets));
  return g;
}

inline double binomial_pmf(unsigned c, unsigned k, double p) {
  return std::exp(std::lgamma(c + 1.0) - std::lgamma(k + 1.0) - std::lgamma(c - k + 1.0)) * std::pow(p, k) *
         std::pow(1.0 - p, c - k);
}

}  // namespace testing
