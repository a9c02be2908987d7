#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pagraph {

// Binary indexed tree over strictly positive per-node weights, 1-based.
// Supports O(log n) append, point update, prefix sum and inverse-CDF lookup.
class WeightIndex {
 public:
  WeightIndex() = default;
  explicit WeightIndex(std::span<const double> weights) { rebuild(weights); }

  std::size_t size() const { return tree_.size() - 1; }

  void append(double weight);
  void add(std::size_t index, double delta);
  double prefix(std::size_t index) const;
  double total() const { return prefix(size()); }
  double weight(std::size_t index) const { return prefix(index) - prefix(index - 1); }

  /// Smallest i with prefix(i) > u, i.e. cumsum(i-1) <= u < cumsum(i).
  /// Values at or past the total clamp to size().
  std::size_t find(double u) const;

  void rebuild(std::span<const double> weights);
  void clear() { tree_.assign(1, 0.0); }

  // Raw tree cells (index 0 unused), for snapshots.
  std::span<const double> cells() const { return tree_; }
  void assign_cells(std::vector<double> cells);

 private:
  std::vector<double> tree_ = std::vector<double>(1, 0.0);
};

/// Node id drawn by inverse CDF for u in [0, total).
std::uint32_t sample_weighted(const WeightIndex& index, double u);

}  // namespace pagraph
