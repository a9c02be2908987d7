#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "json.hpp"
#include "pagraph/graph.hpp"
#include "pagraph/stats.hpp"
#include "pagraph/theory.hpp"
#include "pagraph/tracker.hpp"

namespace pagraph::montecarlo {

struct PairSpec {
  NodeId i = 10;
  NodeId j = 20;
  friend bool operator==(const PairSpec&, const PairSpec&) = default;
};

struct ExperimentConfig {
  ModelParams params;
  std::vector<PairSpec> pairs{{10, 20}};
  std::uint64_t n_max = 500;
  std::vector<std::uint64_t> checkpoints;  // empty means {n_max}
  std::uint64_t replicates = 1;
  std::uint64_t master_seed = 0;
  std::vector<double> estimator_k;
  std::size_t trajectory_count = 0;
  TrajectoryOptions trajectory{Spacing::geometric, 1};
  bool allow_node_one = false;
  std::size_t stat_bins = 50;
  std::size_t ratio_bins = 50;
  double ratio_max = 3.0;

  void validate() const;
  std::vector<std::uint64_t> effective_checkpoints() const;
};

// Tracker state of one pair at one recorded time.
struct PairRecord {
  std::uint64_t n = 0;
  std::uint64_t n_ij = 0;
  std::uint64_t degree_i = 0;
  std::uint64_t degree_j = 0;
  double sum_lower = 0.0;
  double sum_exact = 0.0;
  double sum_upper = 0.0;
  double cesaro_y = 0.0;
  double cesaro_ystar = 0.0;
};

struct ReplicateResult {
  std::uint64_t id = 0;
  std::vector<std::vector<PairRecord>> records;  // [pair][time], ascending n, first at n = j
  std::vector<PairTracker> trajectories;         // kept for the first trajectory_count replicates

  /// Record of pair p at time n (must be a recorded time).
  const PairRecord& at(std::size_t pair, std::uint64_t n) const;
};

struct RatioSummary {
  double k = 2.0;
  std::uint64_t subsample_n = 0;
  std::uint64_t conditioned = 0;  // replicates with N-hat > 0
  std::uint64_t excluded = 0;     // N-hat == 0, or floor(n/k) < j
  double conditioning_rate = 0.0;
  stats::Moments moments;
  stats::Quartiles quartiles;
  stats::Histogram histogram;
};

struct CheckpointSummary {
  std::uint64_t n = 0;
  stats::Moments n_ij;
  stats::Moments increment;  // N_ij(n) - N_ij(j)
  stats::Moments x_i;
  stats::Moments x_j;
  stats::Moments y_ij;
  stats::Moments scaled;
  stats::Moments y_inf_hat;
  stats::Moments sum_lower;
  stats::Moments sum_exact;
  stats::Moments sum_upper;
  stats::Moments cesaro_y;      // sum_{k=j}^n Y(k)/k^2 over the regime normalizer
  stats::Moments cesaro_ystar;  // same with the Y* correction factor
  stats::IntegerHistogram n_ij_histogram;
  stats::Histogram scaled_histogram;
  stats::Histogram y_inf_hat_histogram;
  std::vector<RatioSummary> ratios;
};

struct PairSummary {
  PairSpec pair;
  stats::Moments initial_n_ij;
  std::vector<CheckpointSummary> checkpoints;
};

enum class Field { n_ij, increment, x_i, x_j, y_ij, scaled, y_inf_hat, sum_lower, sum_exact, sum_upper };

struct ReplicationSummary {
  ExperimentConfig config;
  theory::RegimeConstants constants;
  std::vector<PairSummary> pairs;
  std::vector<ReplicateResult> replicates;  // indexed by replicate id

  /// Per-replicate values of `field` for pair p at checkpoint c.
  std::vector<double> column(std::size_t pair, std::size_t checkpoint, Field field) const;
  /// N(n) / N-hat for replicates with N-hat > 0.
  std::vector<double> ratios(std::size_t pair, std::size_t checkpoint, double k) const;
  /// Index of checkpoint n, throws if absent.
  std::size_t checkpoint_index(std::uint64_t n) const;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Replicate `id` on stream (master_seed, id), run to n_max with trackers attached.
ReplicateResult run_replicate(const ExperimentConfig& config, std::uint64_t id);

/// All replicates plus aggregation. The result does not depend on the thread count.
ReplicationSummary run(const ExperimentConfig& config, RunOptions options = {});

/// Aggregates already computed replicates (ordered by id).
ReplicationSummary summarize(const ExperimentConfig& config, std::vector<ReplicateResult> replicates);

nlohmann::json summary_to_json(const ReplicationSummary& summary);

/// n,pair_i,pair_j,quantity,k,bin_lo,bin_hi,count
void write_histogram_csv(std::ostream& out, const ReplicationSummary& summary);

/// replicate,n,pair_i,pair_j,n_ij,x_i,x_j,y_ij,scaled for the first `count` replicates.
void write_trajectories_csv(std::ostream& out, const ReplicationSummary& summary, std::size_t count);

}  // namespace pagraph::montecarlo
