#pragma once

// Per-scanline discriminability: Fisher criterion and histogram mutual
// information between the same scanline of different motion classes,
// accumulated one-vs-rest per class, trial-averaged and row-normalized.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smg/error.hpp"
#include "smg/seqio.hpp"

namespace smg {

inline constexpr double fc_epsilon = 1e-12;

struct MiConfig {
  std::size_t bin_count = 32;

  void validate() const {
    require(bin_count >= 2, Errc::invalid_argument, "MI needs at least two bins");
  }
};

namespace detail {

inline void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(Errc::dimension_mismatch, "scanline lengths differ: " + std::to_string(a.size()) +
                                       " vs " + std::to_string(b.size()));
  require(!a.empty(), Errc::invalid_argument, "empty scanline");
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double population_variance(std::span<const double> v, double mu) {
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / double(v.size());
}

/// Equal-width bin over [0, 1]; 1.0 lands in the last bin.
inline std::size_t bin_of(double v, std::size_t bins) {
  if (!(v >= 0.0 && v <= 1.0))
    fail(Errc::out_of_range, "value " + std::to_string(v) + " outside histogram range [0, 1]");
  return std::min(bins - 1, static_cast<std::size_t>(v * double(bins)));
}

// Occupied cells are summed in sorted order, so a transposed joint histogram
// gives the same bits (mi_pair is exactly symmetric).
inline double entropy_of_counts(std::span<const std::size_t> counts, std::size_t total) {
  std::vector<std::size_t> occupied;
  for (std::size_t c : counts)
    if (c != 0) occupied.push_back(c);
  std::sort(occupied.begin(), occupied.end());
  double h = 0.0;
  for (std::size_t c : occupied) {
    const double p = double(c) / double(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

/// (mu1 - mu2)^2 / (var1 + var2 + eps), population variances.
inline double fc_pair(std::span<const double> c1, std::span<const double> c2) {
  detail::require_same_length(c1, c2);
  const double m1 = detail::mean(c1), m2 = detail::mean(c2);
  const double v1 = detail::population_variance(c1, m1);
  const double v2 = detail::population_variance(c2, m2);
  return (m1 - m2) * (m1 - m2) / (v1 + v2 + fc_epsilon);
}

/// Plug-in Shannon entropy in bits of the histogram of `v`.
inline double entropy(std::span<const double> v, const MiConfig& cfg = {}) {
  cfg.validate();
  require(!v.empty(), Errc::invalid_argument, "entropy of empty scanline");
  std::vector<std::size_t> counts(cfg.bin_count, 0);
  for (double x : v) ++counts[detail::bin_of(x, cfg.bin_count)];
  return detail::entropy_of_counts(counts, v.size());
}

/// Entropy of the 2-D histogram of depth-aligned pairs (v1[i], v2[i]).
inline double joint_entropy(std::span<const double> v1, std::span<const double> v2,
                            const MiConfig& cfg = {}) {
  cfg.validate();
  detail::require_same_length(v1, v2);
  const std::size_t b = cfg.bin_count;
  std::vector<std::size_t> counts(b * b, 0);
  for (std::size_t i = 0; i < v1.size(); ++i)
    ++counts[detail::bin_of(v1[i], b) * b + detail::bin_of(v2[i], b)];
  return detail::entropy_of_counts(counts, v1.size());
}

/// H(v1) + H(v2) - H(v1, v2), rounding residue below zero clamped away.
inline double mi_pair(std::span<const double> v1, std::span<const double> v2,
                      const MiConfig& cfg = {}) {
  detail::require_same_length(v1, v2);
  const double mi = entropy(v1, cfg) + entropy(v2, cfg) - joint_entropy(v1, v2, cfg);
  return (mi < 0.0 && mi > -1e-12) ? 0.0 : mi;
}

inline double pair_score(ScoreMethod method, std::span<const double> a,
                         std::span<const double> b, const MiConfig& cfg) {
  return method == ScoreMethod::fc ? fc_pair(a, b) : mi_pair(a, b, cfg);
}

/// Divides by the maximum; an all-zero vector stays all-zero.
inline std::vector<double> max_normalized(std::vector<double> v) {
  const double peak = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  if (peak > 0.0)
    for (double& x : v) x /= peak;
  return v;
}

/// One-vs-rest score matrix. For every class i, trial t and scanline j the
/// score of (i, t, j) against scanline j of trial t of each other class is
/// summed in ascending class order; the k sums are averaged and each class
/// row divided by its maximum.
inline ScoreMatrix score_matrix(const EndStateDataset& ds, ScoreMethod method,
                                const MiConfig& cfg = {}) {
  if (method == ScoreMethod::mi) cfg.validate();
  const std::size_t n = ds.classes(), k = ds.trials(), m = ds.scanlines();

  std::vector<double> per_trial(n * m * k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      const Frame& own = ds.frame(i, t);
      for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t o = 0; o < n; ++o)
          if (o != i) sum += pair_score(method, own.scanline(j), ds.frame(o, t).scanline(j), cfg);
        per_trial[(i * m + j) * k + t] = sum;
      }
    }

  std::vector<double> averaged;
  averaged.reserve(n * m);
  std::vector<double> slice(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) {
      // Sorted summation makes the mean independent of trial order.
      std::copy_n(per_trial.begin() + std::ptrdiff_t((i * m + j) * k), k, slice.begin());
      std::sort(slice.begin(), slice.end());
      double sum = 0.0;
      for (double v : slice) sum += v;
      row[j] = sum / double(k);
    }
    row = max_normalized(std::move(row));
    averaged.insert(averaged.end(), row.begin(), row.end());
  }
  return ScoreMatrix(method, ds.labels(), m, k, std::move(per_trial), std::move(averaged));
}

/// Class-summed, max-normalized per-scanline score.
struct AggregatedScore {
  ScoreMethod method;
  std::vector<double> values;
};

inline AggregatedScore aggregate(const ScoreMatrix& scores) {
  std::vector<double> sums(scores.scanlines(), 0.0);
  for (std::size_t i = 0; i < scores.classes(); ++i)
    for (std::size_t j = 0; j < scores.scanlines(); ++j) sums[j] += scores.averaged(i, j);
  return {scores.method(), max_normalized(std::move(sums))};
}

/// Mean over positions of the population standard deviation across vectors.
inline double mean_spread(std::span<const std::vector<double>> vectors) {
  require(vectors.size() >= 2, Errc::invalid_argument, "spread needs at least two vectors");
  const std::size_t m = vectors.front().size();
  require(m >= 1, Errc::invalid_argument, "spread of empty vectors");
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double mu = 0.0;
    for (const auto& v : vectors) {
      require(v.size() == m, Errc::dimension_mismatch, "spread vectors differ in length");
      mu += v[j];
    }
    mu /= double(vectors.size());
    double var = 0.0;
    for (const auto& v : vectors) var += (v[j] - mu) * (v[j] - mu);
    total += std::sqrt(var / double(vectors.size()));
  }
  return total / double(m);
}

/// Inter-trial consistency: builds, for each trial alone, the aggregated
/// profile (class rows max-normalized, summed, max-normalized) and returns the
/// mean per-scanline standard deviation of those k profiles.
inline double trial_consistency(const ScoreMatrix& scores) {
  const std::size_t n = scores.classes(), m = scores.scanlines(), k = scores.trials();
  require(k >= 2, Errc::invalid_argument,
          "trial consistency needs k >= 2 trials with per-trial scores");
  std::vector<std::vector<double>> profiles;
  for (std::size_t t = 0; t < k; ++t) {
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(m);
      for (std::size_t j = 0; j < m; ++j) row[j] = scores.per_trial(i, j, t);
      row = max_normalized(std::move(row));
      for (std::size_t j = 0; j < m; ++j) sums[j] += row[j];
    }
    profiles.push_back(max_normalized(std::move(sums)));
  }
  return mean_spread(profiles);
}

}  // namespace smg
