#include "drift/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "drift/rng.hpp"

namespace drift::stats {

namespace {

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error(std::string(who) + ": alpha must lie in (0, 1)");
  }
}

}  // namespace

double hoeffding_epsilon(std::size_t n, double alpha) {
  if (n == 0) throw std::domain_error("hoeffding_epsilon: n must be positive");
  check_alpha(alpha, "hoeffding_epsilon");
  return std::sqrt(std::log(1.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double hoeffding_split_epsilon(std::size_t n, std::size_t m, double alpha, double range_width) {
  if (n == 0 || m == 0) {
    throw std::domain_error("hoeffding_split_epsilon: n and m must be positive");
  }
  check_alpha(alpha, "hoeffding_split_epsilon");
  if (!(range_width > 0.0)) {
    throw std::domain_error("hoeffding_split_epsilon: range_width must be positive");
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return range_width * std::sqrt(dm * std::log(1.0 / alpha) / (2.0 * dn * (dn + dm)));
}

RunningBoundedMean::RunningBoundedMean(double range_width) : range_width_(range_width) {
  if (!(range_width > 0.0)) {
    throw std::domain_error("RunningBoundedMean: range_width must be positive");
  }
}

void RunningBoundedMean::add(double value) {
  ++count_;
  mean_ += (value - mean_) / static_cast<double>(count_);
}

void RunningBoundedMean::reset() {
  mean_ = 0.0;
  count_ = 0;
}

double RunningBoundedMean::bound(double alpha) const {
  if (count_ == 0) throw std::domain_error("RunningBoundedMean::bound: no values yet");
  return range_width_ * hoeffding_epsilon(count_, alpha);
}

double ks_critical_scale(double alpha) {
  check_alpha(alpha, "ks_critical_scale");
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

KsResult ks_two_sample_sorted(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_two_sample: both samples must be nonempty");
  }
  check_alpha(alpha, "ks_two_sample");

  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const double n = static_cast<double>(na);
  const double m = static_cast<double>(nb);

  // Merge walk over the pooled distinct values; the supremum of the ECDF
  // difference is attained at pooled sample points.
  double d = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < na || ib < nb) {
    double v;
    if (ia >= na) {
      v = b[ib];
    } else if (ib >= nb) {
      v = a[ia];
    } else {
      v = std::min(a[ia], b[ib]);
    }
    while (ia < na && a[ia] <= v) ++ia;
    while (ib < nb && b[ib] <= v) ++ib;
    d = std::max(d, std::fabs(static_cast<double>(ia) / n - static_cast<double>(ib) / m));
  }

  KsResult result;
  result.statistic = d;
  result.threshold = ks_critical_scale(alpha) * std::sqrt((n + m) / (n * m));
  result.reject = result.statistic > result.threshold;
  return result;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return ks_two_sample_sorted(sa, sb, alpha);
}

namespace {

// Precomputed closed-quadrant membership for every (anchor, point) pair of a
// pooled sample, stored as bit rows. A permutation of the pool into samples
// A/B only changes a membership mask, so each resampled statistic reduces to
// masked popcounts: countB = poolCount - countA.
class QuadrantTable {
 public:
  explicit QuadrantTable(std::span<const Point2> pool)
      : size_(pool.size()), words_((pool.size() + 63) / 64) {
    for (auto& rows : bits_) rows.assign(size_ * words_, 0);
    for (auto& counts : pool_count_) counts.assign(size_, 0);
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < size_; ++j) {
        const bool le_x = pool[j].x <= pool[i].x;
        const bool ge_x = pool[j].x >= pool[i].x;
        const bool le_y = pool[j].y <= pool[i].y;
        const bool ge_y = pool[j].y >= pool[i].y;
        if (le_x && le_y) set_bit(0, i, j);
        if (le_x && ge_y) set_bit(1, i, j);
        if (ge_x && le_y) set_bit(2, i, j);
        if (ge_x && ge_y) set_bit(3, i, j);
      }
    }
    for (int q = 0; q < 4; ++q) {
      for (std::size_t i = 0; i < size_; ++i) {
        std::uint32_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(bits_[q][i * words_ + w]);
        pool_count_[q][i] = c;
      }
    }
  }

  /// Peacock statistic for the split given by mask_a (bit set = point belongs
  /// to sample A, |A| = n_a).
  double statistic(const std::vector<std::uint64_t>& mask_a, std::size_t n_a) const {
    const double n = static_cast<double>(n_a);
    const double m = static_cast<double>(size_ - n_a);
    double max_a = 0.0;
    double max_b = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      double best = 0.0;
      for (int q = 0; q < 4; ++q) {
        const std::uint64_t* row = bits_[q].data() + i * words_;
        std::uint32_t in_a = 0;
        for (std::size_t w = 0; w < words_; ++w) in_a += std::popcount(row[w] & mask_a[w]);
        const double fa = static_cast<double>(in_a) / n;
        const double fb = static_cast<double>(pool_count_[q][i] - in_a) / m;
        best = std::max(best, std::fabs(fa - fb));
      }
      const bool anchor_in_a = (mask_a[i / 64] >> (i % 64)) & 1u;
      if (anchor_in_a) {
        max_a = std::max(max_a, best);
      } else {
        max_b = std::max(max_b, best);
      }
    }
    return 0.5 * (max_a + max_b);
  }

  std::size_t words() const { return words_; }

 private:
  void set_bit(int q, std::size_t i, std::size_t j) {
    bits_[q][i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }

  std::size_t size_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_[4];
  std::vector<std::uint32_t> pool_count_[4];
};

std::vector<Point2> make_pool(std::span<const Point2> a, std::span<const Point2> b) {
  std::vector<Point2> pool;
  pool.reserve(a.size() + b.size());
  pool.insert(pool.end(), a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  return pool;
}

std::vector<std::uint64_t> mask_from_membership(const std::vector<std::uint8_t>& member,
                                                std::size_t words) {
  std::vector<std::uint64_t> mask(words, 0);
  for (std::size_t i = 0; i < member.size(); ++i) {
    if (member[i]) mask[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return mask;
}

}  // namespace

double ks2d_statistic(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks2d_statistic: both samples must be nonempty");
  }
  const auto pool = make_pool(a, b);
  QuadrantTable table(pool);
  std::vector<std::uint8_t> member(pool.size(), 0);
  std::fill(member.begin(), member.begin() + static_cast<std::ptrdiff_t>(a.size()), 1);
  return table.statistic(mask_from_membership(member, table.words()), a.size());
}

Ks2dResult ks2d_two_sample(std::span<const Point2> a, std::span<const Point2> b, double alpha,
                           std::size_t permutations, std::uint64_t seed) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks2d_two_sample: both samples must be nonempty");
  }
  check_alpha(alpha, "ks2d_two_sample");
  if (permutations == 0) {
    throw std::invalid_argument("ks2d_two_sample: permutations must be positive");
  }

  const auto pool = make_pool(a, b);
  QuadrantTable table(pool);

  std::vector<std::uint8_t> member(pool.size(), 0);
  std::fill(member.begin(), member.begin() + static_cast<std::ptrdiff_t>(a.size()), 1);
  const double observed = table.statistic(mask_from_membership(member, table.words()), a.size());

  Rng rng(seed);
  std::size_t count_ge = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.shuffle(member);
    const double d = table.statistic(mask_from_membership(member, table.words()), a.size());
    if (d >= observed) ++count_ge;
  }

  Ks2dResult result;
  result.statistic = observed;
  result.p_value = (1.0 + static_cast<double>(count_ge)) / (static_cast<double>(permutations) + 1.0);
  result.reject = result.p_value < alpha;
  return result;
}

std::optional<double> permutation_test(std::span<const Sample> pool, std::size_t split_index,
                                       double observed_loss, std::size_t permutations,
                                       std::uint64_t seed, const SplitLossFn& loss_fn) {
  if (pool.empty()) throw std::invalid_argument("permutation_test: empty pool");
  if (split_index == 0 || split_index >= pool.size()) {
    throw std::invalid_argument("permutation_test: split_index must lie strictly inside the pool");
  }
  if (permutations == 0) throw std::invalid_argument("permutation_test: permutations must be positive");
  if (!std::isfinite(observed_loss)) {
    throw std::invalid_argument("permutation_test: observed_loss must be finite");
  }
  if (!loss_fn) throw std::invalid_argument("permutation_test: missing loss function");

  bool single_class = true;
  for (const auto& s : pool) {
    if (s.y != pool.front().y) {
      single_class = false;
      break;
    }
  }
  if (single_class) return std::nullopt;  // untestable: no label variation to resplit

  std::vector<Sample> shuffled(pool.begin(), pool.end());
  Rng rng(seed);
  std::size_t count_ge = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    rng.shuffle(shuffled);
    const std::span<const Sample> all(shuffled);
    const double loss = loss_fn(all.first(split_index), all.subspan(split_index));
    if (loss >= observed_loss) ++count_ge;
  }
  return (1.0 + static_cast<double>(count_ge)) / (static_cast<double>(permutations) + 1.0);
}

}  // namespace drift::stats
