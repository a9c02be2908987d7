#include "pagraph/weight_index.hpp"

#include <bit>
#include <cassert>
#include <utility>

#include "pagraph/errors.hpp"

namespace pagraph {

namespace {
std::size_t lowbit(std::size_t k) { return k & (~k + 1); }
}  // namespace

void WeightIndex::append(double weight) {
  const std::size_t k = tree_.size();
  double cell = weight;
  // Cell k covers (k - lowbit(k), k]; its children are k-1, k-2, k-4, ...
  for (std::size_t step = 1; step < lowbit(k); step <<= 1) cell += tree_[k - step];
  tree_.push_back(cell);
}

void WeightIndex::add(std::size_t index, double delta) {
  assert(index >= 1 && index <= size());
  for (std::size_t k = index; k < tree_.size(); k += lowbit(k)) tree_[k] += delta;
}

double WeightIndex::prefix(std::size_t index) const {
  double sum = 0.0;
  for (std::size_t k = index; k > 0; k -= lowbit(k)) sum += tree_[k];
  return sum;
}

std::size_t WeightIndex::find(double u) const {
  const std::size_t n = size();
  if (n == 0) throw DomainError("weighted sample from an empty index");
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(n); step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= n && tree_[next] <= u) {
      pos = next;
      u -= tree_[next];
    }
  }
  return pos < n ? pos + 1 : n;
}

void WeightIndex::rebuild(std::span<const double> weights) {
  tree_.assign(weights.size() + 1, 0.0);
  for (std::size_t k = 1; k <= weights.size(); ++k) {
    tree_[k] += weights[k - 1];
    const std::size_t parent = k + lowbit(k);
    if (parent <= weights.size()) tree_[parent] += tree_[k];
  }
}

void WeightIndex::assign_cells(std::vector<double> cells) {
  if (cells.empty()) throw FormatError("weight index needs a sentinel cell");
  tree_ = std::move(cells);
}

std::uint32_t sample_weighted(const WeightIndex& index, double u) {
  assert(u >= 0.0);
  return static_cast<std::uint32_t>(index.find(u));
}

}  // namespace pagraph
