#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "pagraph/graph.hpp"
#include "pagraph/theory.hpp"

namespace pagraph {

enum class Spacing { none, geometric, linear };

// Which times a tracker writes to its trajectory. Geometric spacing records
// n = j * 2^m; linear spacing records every `stride`-th n starting at j.
struct TrajectoryOptions {
  Spacing spacing = Spacing::none;
  std::uint64_t stride = 1;
};

struct TrajectoryPoint {
  std::uint64_t n = 0;
  std::uint64_t n_ij = 0;
  std::uint64_t degree_i = 0;
  std::uint64_t degree_j = 0;
};

struct ScaledStatistic {
  theory::Regime regime = theory::Regime::logarithmic;
  double normalizer = 1.0;
  double value = 0.0;
};

// Plug-in estimates of D_i(inf), D_j(inf) and Y_ij(inf).
struct LimitEstimate {
  double d_i_inf_hat = 0.0;
  double d_j_inf_hat = 0.0;
  double y_inf_hat = 0.0;
};

// Running common-friend count and shifted degrees of one node pair (i < j),
// updated from step outcomes without touching the graph.
//
// Alongside N_ij it accumulates, over the arrivals it has observed, the sums
// of the exact increment probability Q_k and its bounds L_k <= Q_k <= R_k, and
// the Cesaro sums sum Y(k)/k^2 and sum Y*(k)/k^2 over k from the start time.
class PairTracker {
 public:
  PairTracker(NodeId i, NodeId j, const ModelParams& params, std::uint64_t n, std::uint64_t n_ij,
              std::uint64_t degree_i, std::uint64_t degree_j, TrajectoryOptions trajectory = {});

  NodeId i() const { return i_; }
  NodeId j() const { return j_; }
  std::uint64_t n() const { return n_; }
  std::uint64_t start_n() const { return start_n_; }

  std::uint64_t n_ij() const { return n_ij_; }
  std::uint64_t initial_n_ij() const { return initial_n_ij_; }
  std::uint64_t degree_i() const { return degree_i_; }
  std::uint64_t degree_j() const { return degree_j_; }
  double x_i() const { return static_cast<double>(degree_i_) + delta_; }
  double x_j() const { return static_cast<double>(degree_j_) + delta_; }
  double y_ij() const { return x_i() * x_j(); }

  double sum_lower() const { return sum_lower_; }
  double sum_exact() const { return sum_exact_; }
  double sum_upper() const { return sum_upper_; }
  double cesaro_y() const { return cesaro_y_; }
  double cesaro_ystar() const { return cesaro_ystar_; }

  /// Consumes the arrival of node n + 1.
  void on_step(const StepOutcome& outcome);

  std::span<const TrajectoryPoint> trajectory() const { return trajectory_; }

 private:
  bool scheduled(std::uint64_t n) const;
  void record();
  void add_cesaro_terms();

  NodeId i_;
  NodeId j_;
  std::uint32_t edges_;
  double delta_;
  double weight_per_node_;
  std::uint64_t start_n_;
  std::uint64_t n_;
  std::uint64_t n_ij_;
  std::uint64_t initial_n_ij_;
  std::uint64_t degree_i_;
  std::uint64_t degree_j_;
  double sum_lower_ = 0.0;
  double sum_exact_ = 0.0;
  double sum_upper_ = 0.0;
  double cesaro_y_ = 0.0;
  double cesaro_ystar_ = 0.0;
  TrajectoryOptions options_;
  std::uint64_t next_geometric_ = 0;
  std::vector<TrajectoryPoint> trajectory_;
};

/// Starts tracking (i, j) on a graph with n >= j; the initial count is the
/// sorted intersection of the two neighbour sets minus {i, j}.
PairTracker init_pair(const GraphState& state, NodeId i, NodeId j, TrajectoryOptions trajectory = {});

/// Recount of |N(i) ∩ N(j) \ {i, j}| from scratch. Works from the adjacency
/// lists when present, else from the arrival-target records.
std::uint64_t common_friends_bruteforce(const GraphState& state, NodeId i, NodeId j);

/// N_ij(n) divided by the regime normalizer at n.
ScaledStatistic scaled(std::uint64_t n_ij, std::uint64_t n, const theory::RegimeConstants& rc);
inline ScaledStatistic scaled(const PairTracker& t, const theory::RegimeConstants& rc) {
  return scaled(t.n_ij(), t.n(), rc);
}

LimitEstimate limit_estimate(const PairTracker& t, const theory::RegimeConstants& rc);

/// Subsample estimator of N_ij(n) from the count at floor(n / k):
/// N_ij(floor(n/k)) when delta >= 0, N_ij(floor(n/k)) k^(2 gamma - 1) otherwise.
double estimate(std::uint64_t n_ij_at_subsample, double k, const theory::RegimeConstants& rc);
inline double estimate(const PairTracker& at_subsample, double k, const theory::RegimeConstants& rc) {
  return estimate(at_subsample.n_ij(), k, rc);
}

/// Header "n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled", one row per recorded point.
void write_trajectory_header(std::ostream& out);
void write_trajectory_rows(std::ostream& out, const PairTracker& tracker, const theory::RegimeConstants& rc);

}  // namespace pagraph
