#include "pagraph/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "pagraph/errors.hpp"

namespace pagraph {

PairTracker::PairTracker(NodeId i, NodeId j, const ModelParams& params, std::uint64_t n, std::uint64_t n_ij,
                         std::uint64_t degree_i, std::uint64_t degree_j, TrajectoryOptions trajectory)
    : i_(i),
      j_(j),
      edges_(params.edges_per_arrival),
      delta_(params.delta),
      weight_per_node_(params.weight_per_node()),
      start_n_(n),
      n_(n),
      n_ij_(n_ij),
      initial_n_ij_(n_ij),
      degree_i_(degree_i),
      degree_j_(degree_j),
      options_(trajectory) {
  if (i < 1 || j <= i) throw DomainError("pair requires 1 <= i < j");
  if (n < j) throw DomainError("pair (i, j) needs n >= j");
  if (options_.spacing == Spacing::linear && options_.stride == 0) throw DomainError("stride must be positive");
  next_geometric_ = j;
  while (next_geometric_ < n) next_geometric_ *= 2;
  add_cesaro_terms();
  if (scheduled(n_)) record();
}

bool PairTracker::scheduled(std::uint64_t n) const {
  switch (options_.spacing) {
    case Spacing::none:
      return false;
    case Spacing::geometric:
      return n == next_geometric_;
    case Spacing::linear:
      return (n - j_) % options_.stride == 0;
  }
  return false;
}

void PairTracker::record() {
  trajectory_.push_back({n_, n_ij_, degree_i_, degree_j_});
  if (options_.spacing == Spacing::geometric) next_geometric_ *= 2;
}

void PairTracker::add_cesaro_terms() {
  const double k = static_cast<double>(n_);
  const double y = y_ij();
  const double correction = 1.0 - (edges_ - 2.0) / 2.0 * (x_i() + x_j()) / (weight_per_node_ * k);
  cesaro_y_ += y / (k * k);
  cesaro_ystar_ += y * correction / (k * k);
}

void PairTracker::on_step(const StepOutcome& outcome) {
  if (outcome.new_node != n_ + 1) throw DomainError("tracker received an out-of-order arrival");

  const double total = weight_per_node_ * static_cast<double>(n_);
  const double p_i = x_i() / total;
  const double p_j = x_j() / total;
  const auto bounds = theory::increment_bounds(p_i, p_j, edges_);
  sum_lower_ += bounds.lower;
  sum_upper_ += bounds.upper;
  sum_exact_ += theory::increment_probability(p_i, p_j, edges_);

  std::uint32_t hit_i = 0;
  std::uint32_t hit_j = 0;
  for (const Hit& h : outcome.hits) {
    if (h.node == i_) hit_i = h.stubs;
    if (h.node == j_) hit_j = h.stubs;
  }
  // One new common friend however many stubs land on each side.
  if (hit_i > 0 && hit_j > 0) ++n_ij_;
  degree_i_ += hit_i;
  degree_j_ += hit_j;
  ++n_;

  add_cesaro_terms();
  if (scheduled(n_)) record();
}

namespace {

void require_pair_in(const GraphState& state, NodeId i, NodeId j) {
  if (i < 1 || j <= i) throw DomainError("pair requires 1 <= i < j");
  if (j > state.n()) throw DomainError("pair node " + std::to_string(j) + " does not exist yet");
}

// Neighbour set of v rebuilt by scanning every arrival record.
std::set<NodeId> neighbors_from_targets(const GraphState& state, NodeId v) {
  std::set<NodeId> out;
  for (NodeId t : state.arrival_targets(v)) out.insert(t);
  for (std::uint64_t w = std::max<std::uint64_t>(v + 1, 2); w <= state.n(); ++w) {
    const auto targets = state.arrival_targets(static_cast<NodeId>(w));
    if (std::find(targets.begin(), targets.end(), v) != targets.end()) out.insert(static_cast<NodeId>(w));
  }
  return out;
}

}  // namespace

PairTracker init_pair(const GraphState& state, NodeId i, NodeId j, TrajectoryOptions trajectory) {
  require_pair_in(state, i, j);
  std::uint64_t common = 0;
  if (state.has_adjacency()) {
    const auto a = state.neighbors(i);
    const auto b = state.neighbors(j);
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        if (*ia != i && *ia != j) ++common;
        ++ia;
        ++ib;
      }
    }
  } else {
    common = common_friends_bruteforce(state, i, j);
  }
  return PairTracker(i, j, state.params(), state.n(), common, state.degree(i), state.degree(j), trajectory);
}

std::uint64_t common_friends_bruteforce(const GraphState& state, NodeId i, NodeId j) {
  require_pair_in(state, i, j);
  std::set<NodeId> a;
  std::set<NodeId> b;
  if (state.has_adjacency()) {
    a.insert(state.neighbors(i).begin(), state.neighbors(i).end());
    b.insert(state.neighbors(j).begin(), state.neighbors(j).end());
  } else {
    a = neighbors_from_targets(state, i);
    b = neighbors_from_targets(state, j);
  }
  std::uint64_t count = 0;
  for (NodeId k : a) {
    if (k != i && k != j && b.count(k) > 0) ++count;
  }
  return count;
}

ScaledStatistic scaled(std::uint64_t n_ij, std::uint64_t n, const theory::RegimeConstants& rc) {
  const double norm = theory::regime_normalizer(n, rc);
  return {rc.regime, norm, static_cast<double>(n_ij) / norm};
}

LimitEstimate limit_estimate(const PairTracker& t, const theory::RegimeConstants& rc) {
  const double scale = std::pow(static_cast<double>(t.n()), rc.gamma);
  const double di = t.x_i() / scale;
  const double dj = t.x_j() / scale;
  return {di, dj, di * dj};
}

double estimate(std::uint64_t n_ij_at_subsample, double k, const theory::RegimeConstants& rc) {
  return static_cast<double>(n_ij_at_subsample) * theory::estimator_factor(k, rc);
}

void write_trajectory_header(std::ostream& out) { out << "n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled\n"; }

void write_trajectory_rows(std::ostream& out, const PairTracker& tracker, const theory::RegimeConstants& rc) {
  const auto old_precision = out.precision(12);
  for (const TrajectoryPoint& p : tracker.trajectory()) {
    const double xi = static_cast<double>(p.degree_i) + rc.delta;
    const double xj = static_cast<double>(p.degree_j) + rc.delta;
    out << p.n << ',' << tracker.i() << ',' << tracker.j() << ',' << p.n_ij << ',' << xi << ',' << xj << ','
        << xi * xj << ',' << scaled(p.n_ij, p.n, rc).value << '\n';
  }
  out.precision(old_precision);
}

}  // namespace pagraph
