#include "kmer/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kmer/errors.hpp"

namespace kmer {

void ExactSum::add(double x) {
  std::size_t i = 0;
  for (double y : partials_) {
    if (std::abs(x) < std::abs(y)) std::swap(x, y);
    const double hi = x + y;
    const double lo = y - (hi - x);
    if (lo != 0.0) partials_[i++] = lo;
    x = hi;
  }
  partials_.resize(i);
  partials_.push_back(x);
}

void ExactSum::merge(const ExactSum& other) {
  for (double p : other.partials_) add(p);
}

double ExactSum::value() const {
  if (partials_.empty()) return 0.0;
  std::size_t n = partials_.size();
  double hi = partials_[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials_[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Round-half-even correction across the remaining partials.
  if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

void RunningStats::add(double x) {
  ++n_;
  sum_.add(x);
  sum_sq_.add(x * x);
}

void RunningStats::merge(const RunningStats& other) {
  n_ += other.n_;
  sum_.merge(other.sum_);
  sum_sq_.merge(other.sum_sq_);
}

double RunningStats::mean() const { return n_ == 0 ? 0.0 : sum_.value() / static_cast<double>(n_); }

double RunningStats::variance() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double m = sum_.value() / n;
  return std::max(0.0, (sum_sq_.value() - n * m * m) / (n - 1.0));
}

namespace {

double standard_error_of(std::span<const double> v, double mean) {
  const double n = static_cast<double>(v.size());
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n * (n - 1.0)));
}

}  // namespace

BlockingResult blocking_error(std::span<const double> values) {
  if (values.size() < kMinSeriesLength)
    throw ValidationError("error_bars: series needs at least " +
                          std::to_string(kMinSeriesLength) + " values");
  BlockingResult r;
  ExactSum total;
  for (double v : values) total.add(v);
  r.mean = total.value() / static_cast<double>(values.size());

  constexpr std::size_t kMinBins = 16;
  std::vector<double> bins(values.begin(), values.end());
  std::size_t bin_size = 1;
  while (bins.size() >= kMinBins) {
    const double se = standard_error_of(bins, r.mean);
    const double nb = static_cast<double>(bins.size());
    r.levels.push_back({bin_size, bins.size(), se, se / std::sqrt(2.0 * (nb - 1.0))});
    std::vector<double> next(bins.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = 0.5 * (bins[2 * i] + bins[2 * i + 1]);
    bins.swap(next);
    bin_size *= 2;
  }

  // Plateau: every later level stays within the current level's estimate plus
  // its combined uncertainty with that level.
  for (std::size_t l = 0; l + 1 < r.levels.size(); ++l) {
    bool flat = true;
    for (std::size_t m = l + 1; m < r.levels.size(); ++m) {
      const double tol = 1.5 * std::hypot(r.levels[l].uncertainty, r.levels[m].uncertainty);
      if (r.levels[m].standard_error > r.levels[l].standard_error + tol) {
        flat = false;
        break;
      }
    }
    if (flat) {
      r.plateau_level = l;
      r.plateau_found = true;
      break;
    }
  }
  if (r.plateau_found) {
    // Average the plateau region to damp level-to-level noise.
    double acc = 0.0, wsum = 0.0;
    for (std::size_t m = r.plateau_level; m < r.levels.size(); ++m) {
      const double w = 1.0 / std::max(r.levels[m].uncertainty * r.levels[m].uncertainty, 1e-300);
      acc += w * r.levels[m].standard_error;
      wsum += w;
    }
    r.standard_error = std::max(r.levels[r.plateau_level].standard_error, acc / wsum);
  } else {
    r.plateau_level = r.levels.size() - 1;
    for (const auto& lv : r.levels) r.standard_error = std::max(r.standard_error, lv.standard_error);
  }
  return r;
}

BlockingResult blocking_error(const ObservableSeries& series) { return blocking_error(series.values); }

JackknifeResult jackknife(std::span<const BlockSums> blocks, const BlockEstimator& estimator) {
  if (blocks.size() < 2) throw ValidationError("jackknife: need at least 2 blocks");
  const std::size_t width = blocks.front().sums.size();
  std::vector<double> total(width, 0.0);
  double frames = 0.0;
  for (const auto& b : blocks) {
    if (b.sums.size() != width) throw ValidationError("jackknife: ragged blocks");
    for (std::size_t i = 0; i < width; ++i) total[i] += b.sums[i];
    frames += b.frames;
  }
  JackknifeResult r;
  r.plain = estimator(total, frames);
  const double nb = static_cast<double>(blocks.size());
  std::vector<double> loo(width);
  std::vector<double> est;
  est.reserve(blocks.size());
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < width; ++i) loo[i] = total[i] - b.sums[i];
    est.push_back(estimator(loo, frames - b.frames));
  }
  double mean = 0.0;
  for (double e : est) mean += e;
  mean /= nb;
  double ss = 0.0;
  for (double e : est) ss += (e - mean) * (e - mean);
  r.standard_error = std::sqrt((nb - 1.0) / nb * ss);
  r.estimate = nb * r.plain - (nb - 1.0) * mean;
  return r;
}

JackknifeResult jackknife_ratio(std::span<const double> a, std::span<const double> b,
                                const std::function<double(double, double)>& f,
                                std::size_t blocks) {
  if (a.size() != b.size()) throw ValidationError("jackknife_ratio: series lengths differ");
  blocks = std::min(blocks, a.size());
  if (blocks < 2) throw ValidationError("jackknife_ratio: series too short");
  std::vector<BlockSums> bs(blocks, BlockSums{{0.0, 0.0}, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto& blk = bs[i * blocks / a.size()];
    blk.sums[0] += a[i];
    blk.sums[1] += b[i];
    blk.frames += 1.0;
  }
  return jackknife(bs, [&](std::span<const double> s, double n) { return f(s[0] / n, s[1] / n); });
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y,
                              std::span<const double> sigma) {
  if (x.size() != y.size() || x.size() != sigma.size())
    throw ValidationError("fit: input lengths differ");
  if (x.size() < 2) throw ValidationError("fit: need at least 2 points");
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(sigma[i] > 0.0)) throw ValidationError("fit: sigma must be > 0");
    const double w = 1.0 / (sigma[i] * sigma[i]);
    s += w;
    sx += w * x[i];
    sy += w * y[i];
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * y[i];
  }
  const double det = s * sxx - sx * sx;
  if (!(std::abs(det) > 1e-300)) throw ValidationError("fit: degenerate abscissae");
  LinearFit f;
  f.points = x.size();
  f.slope = (s * sxy - sx * sy) / det;
  f.intercept = (sxx * sy - sx * sxy) / det;
  f.slope_error = std::sqrt(s / det);
  f.intercept_error = std::sqrt(sxx / det);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = (y[i] - f.intercept - f.slope * x[i]) / sigma[i];
    f.chi2 += r * r;
  }
  return f;
}

}  // namespace kmer
