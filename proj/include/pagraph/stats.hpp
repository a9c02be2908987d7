#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pagraph::stats {

struct Moments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;  // sd / sqrt(count)
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;  // g1 = m3 / m2^(3/2)
};

Moments moments(std::span<const double> xs);

/// Linear-interpolation quantile (R type 7) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double p);

struct Quartiles {
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double iqr() const { return q75 - q25; }
};

Quartiles quartiles(std::vector<double> xs);

double pearson(std::span<const double> x, std::span<const double> y);

// Uniform bins over [lo, hi) with explicit under/overflow counters.
struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;

  Histogram() = default;
  Histogram(double lo, double hi, std::size_t bins);
  double width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  void add(double x);
  std::uint64_t total() const;
};

/// 50 bins over [0, max] of the sample (or [0, 1) when the sample is all zero).
Histogram auto_histogram(std::span<const double> xs, std::size_t bins);

// One bin per integer value 0..max.
struct IntegerHistogram {
  std::vector<std::uint64_t> counts;
  void add(std::uint64_t v);
  std::uint64_t total() const;
};

}  // namespace pagraph::stats
