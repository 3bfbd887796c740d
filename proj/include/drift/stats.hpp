#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "drift/types.hpp"

namespace drift::stats {

/// One-sample Hoeffding deviation bound for the mean of n independent values
/// confined to the unit interval:
///
///   epsilon(n, alpha) = sqrt(ln(1/alpha) / (2n))
///
/// P{ mean - E[mean] >= epsilon } <= alpha. For values spanning an interval
/// of width w, multiply the result by w (RunningBoundedMean::bound does).
/// Throws std::domain_error on n == 0 or alpha outside (0, 1).
double hoeffding_epsilon(std::size_t n, double alpha);

/// Deviation bound for comparing a mean over n "reference" values against the
/// mean over the same n values plus m more recent ones:
///
///   epsilon(n, m, alpha, w) = w * sqrt( m * ln(1/alpha) / (2n(n+m)) )
///
/// The gap between the full-run mean and a frozen reference mean exceeding
/// this bound is significant at level alpha. Shrinks to 0 as m -> 0 (no
/// recent samples means no detectable gap). Throws std::domain_error on
/// non-positive n, m or range width, or alpha outside (0, 1).
double hoeffding_split_epsilon(std::size_t n, std::size_t m, double alpha, double range_width);

/// Incremental mean of values known to live in an interval of the given
/// width, with the matching Hoeffding deviation bound.
class RunningBoundedMean {
 public:
  explicit RunningBoundedMean(double range_width = 1.0);

  void add(double value);
  void reset();

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double range_width() const { return range_width_; }

  /// range_width * hoeffding_epsilon(count, alpha); requires count >= 1.
  double bound(double alpha) const;

 private:
  double mean_ = 0.0;
  std::size_t count_ = 0;
  double range_width_ = 1.0;
};

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
};

/// Critical-value scale s(alpha) = sqrt(-ln(alpha/2) / 2) for the two-sample
/// Kolmogorov-Smirnov test; the rejection threshold at sample sizes (n, m) is
/// s(alpha) * sqrt((n+m)/(n*m)).
double ks_critical_scale(double alpha);

/// Two-sample Kolmogorov-Smirnov test. The statistic is the supremum over x
/// of |F_a(x) - F_b(x)| where F_c is the right-continuous empirical CDF
/// F_c(x) = #{v in c : v <= x} / |c|; rejection is strict (statistic >
/// threshold). Both samples must be nonempty; ties across and within samples
/// are handled exactly. O((n+m) log(n+m)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha);

/// Same test for inputs already sorted ascending (hot path for sliding
/// windows); O(n+m).
KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b, double alpha);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Ks2dResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject = false;
};

/// Two-sample two-dimensional KS statistic in Peacock's construction: for an
/// anchor point p, the four closed quadrants {X<=x,Y<=y}, {X<=x,Y>=y},
/// {X>=x,Y<=y}, {X>=x,Y>=y} each get an empirical mass under both samples;
/// the per-anchor discrepancy is the largest absolute mass difference. The
/// statistic averages the maximal discrepancy over a's anchors with the
/// maximal discrepancy over b's anchors. Always in [0, 1].
double ks2d_statistic(std::span<const Point2> a, std::span<const Point2> b);

/// 2D KS test with the p-value estimated by pooled permutation resampling:
/// the pool a+b is reassigned into sizes (|a|, |b|) uniformly at random
/// `permutations` times, and p = (1 + #{resampled statistic >= observed}) /
/// (permutations + 1), so the smallest reachable p is 1/(permutations+1).
/// Rejection is strict (p < alpha). Deterministic for a given seed.
/// Memory is O((|a|+|b|)^2 / 8) for the precomputed quadrant tables.
Ks2dResult ks2d_two_sample(std::span<const Point2> a, std::span<const Point2> b, double alpha,
                           std::size_t permutations = 200, std::uint64_t seed = 1);

/// Loss functional for permutation_test: fit on the first span, evaluate on
/// the second, return a loss (higher = worse transfer).
using SplitLossFn = std::function<double(std::span<const Sample>, std::span<const Sample>)>;

/// One-sided permutation test for whether the ordered split of `pool` at
/// `split_index` transfers worse than random splits: p = (1 + #{shuffled
/// loss >= observed_loss}) / (permutations + 1). Ties count toward the >=
/// side, and the add-one smoothing keeps p above zero, so the result is
/// super-uniform under exchangeability. Returns std::nullopt when the pool
/// is untestable (every sample carries the same label); callers must treat
/// that as a non-rejection. Deterministic for a given seed.
std::optional<double> permutation_test(std::span<const Sample> pool, std::size_t split_index,
                                       double observed_loss, std::size_t permutations,
                                       std::uint64_t seed, const SplitLossFn& loss_fn);

}  // namespace drift::stats
