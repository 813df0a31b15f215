#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kmer {

// Exactly rounded floating-point sum (Shewchuk partials). Merging is exact,
// so totals do not depend on the order in which pieces are combined.
class ExactSum {
 public:
  void add(double x);
  void merge(const ExactSum& other);
  double value() const;

 private:
  std::vector<double> partials_;
};

// Mergeable count / sum / sum-of-squares.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);
  std::size_t count() const noexcept { return n_; }
  double mean() const;
  double variance() const;  // unbiased; 0 for n < 2

 private:
  std::size_t n_ = 0;
  ExactSum sum_;
  ExactSum sum_sq_;
};

struct ObservableSeries {
  std::string name;
  std::vector<long> sweeps;
  std::vector<double> values;

  void push(long sweep, double value) {
    sweeps.push_back(sweep);
    values.push_back(value);
  }
  std::size_t size() const noexcept { return values.size(); }
};

struct BlockingLevel {
  std::size_t bin_size;
  std::size_t bins;
  double standard_error;
  double uncertainty;  // statistical error of standard_error itself
};

struct BlockingResult {
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<BlockingLevel> levels;
  std::size_t plateau_level = 0;
  bool plateau_found = false;
};

inline constexpr std::size_t kMinSeriesLength = 16;

// Error of the mean by repeated pairwise binning. Reports the first level
// whose successors stop rising beyond their own uncertainty; if none
// qualifies, the largest estimate among levels with enough bins.
// Throws ValidationError for series shorter than kMinSeriesLength.
BlockingResult blocking_error(std::span<const double> values);
BlockingResult blocking_error(const ObservableSeries& series);

struct JackknifeResult {
  double estimate = 0.0;  // bias-corrected
  double standard_error = 0.0;
  double plain = 0.0;     // estimator applied to all data
};

// Delete-one-block jackknife. Each block is a vector of sums of the same
// length; `estimator` maps (summed block vectors, frame count) to a value.
using BlockEstimator = std::function<double(std::span<const double> sums, double frames)>;

struct BlockSums {
  std::vector<double> sums;
  double frames = 0.0;
};

JackknifeResult jackknife(std::span<const BlockSums> blocks, const BlockEstimator& estimator);

// Jackknife for f(mean(a), mean(b)) on two aligned series, binned into
// `blocks` contiguous blocks.
JackknifeResult jackknife_ratio(std::span<const double> a, std::span<const double> b,
                                const std::function<double(double, double)>& f,
                                std::size_t blocks = 32);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double intercept_error = 0.0;
  double chi2 = 0.0;
  std::size_t points = 0;
};

// Weighted least squares y = intercept + slope * x with weights 1/sigma^2.
// Parameter errors come from the inverse normal matrix (sigmas taken as
// absolute). Throws ValidationError with fewer than 2 points or a
// degenerate design.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> sigma);

}  // namespace kmer
