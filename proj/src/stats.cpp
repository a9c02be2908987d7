#include "pagraph/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pagraph/errors.hpp"

namespace pagraph::stats {

Moments moments(std::span<const double> xs) {
  Moments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  m.min = *std::min_element(xs.begin(), xs.end());
  m.max = *std::max_element(xs.begin(), xs.end());
  double m2 = 0.0;
  double m3 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  if (xs.size() > 1) {
    m.sd = std::sqrt(m2 / (n - 1.0));
    m.se = m.sd / std::sqrt(n);
  }
  m2 /= n;
  m3 /= n;
  m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return m;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Quartiles quartiles(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return {quantile_sorted(xs, 0.25), quantile_sorted(xs, 0.5), quantile_sorted(xs, 0.75)};
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson needs two equal samples of size >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Histogram::Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {
  if (bins == 0 || !(hi_ > lo_)) throw DomainError("histogram needs bins > 0 and hi > lo");
}

void Histogram::add(double x) {
  if (x < lo) {
    ++underflow;
  } else if (x >= hi) {
    ++overflow;
  } else {
    auto b = static_cast<std::size_t>((x - lo) / width());
    ++counts[std::min(b, counts.size() - 1)];
  }
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), underflow + overflow);
}

Histogram auto_histogram(std::span<const double> xs, std::size_t bins) {
  double top = 0.0;
  for (double x : xs) top = std::max(top, x);
  // Widen by one part in 1e9 so the maximum falls inside the last bin.
  Histogram h(0.0, top > 0.0 ? top * (1.0 + 1e-9) : 1.0, bins);
  for (double x : xs) h.add(x);
  return h;
}

void IntegerHistogram::add(std::uint64_t v) {
  if (v >= counts.size()) counts.resize(v + 1, 0);
  ++counts[v];
}

std::uint64_t IntegerHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

}  // namespace pagraph::stats
