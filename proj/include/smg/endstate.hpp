#pragma once

// Motion end-state extraction: correlate every frame with the rest frame and
// take the valleys of that trace as the frames of maximum engagement.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smg/error.hpp"
#include "smg/seqio.hpp"

namespace smg {

/// Pearson correlation over all paired samples of two equal-length signals.
inline double pearson(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), Errc::dimension_mismatch,
          "correlation of signals with different lengths");
  require(!a.empty(), Errc::invalid_argument, "correlation of empty signals");
  const double n = double(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a, db = b[i] - mean_b;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  require(saa > 0.0 && sbb > 0.0, Errc::undefined_correlation,
          "correlation undefined: zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline double pearson_cc(const Frame& a, const Frame& b) {
  require(a.same_shape(b), Errc::dimension_mismatch, "frames differ in shape");
  return pearson(a.values(), b.values());
}

class CorrelationTrace {
 public:
  CorrelationTrace(std::vector<double> values, double frame_rate)
      : values_(std::move(values)), frame_rate_(frame_rate) {
    require(!values_.empty(), Errc::invalid_argument, "empty correlation trace");
    require(std::isfinite(frame_rate_) && frame_rate_ > 0.0, Errc::invalid_argument,
            "frame rate must be positive");
    for (double v : values_) {
      require(std::isfinite(v), Errc::non_finite, "trace contains a non-finite value");
      require(v >= -1.0 && v <= 1.0, Errc::out_of_range, "trace value outside [-1, 1]");
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double frame_rate() const noexcept { return frame_rate_; }

 private:
  std::vector<double> values_;
  double frame_rate_;
};

inline CorrelationTrace cc_trace(const Sequence& seq) {
  const Frame& rest = seq.frame(0);
  std::vector<double> values(seq.size());
  values[0] = 1.0;
  for (std::size_t t = 1; t < seq.size(); ++t) {
    try {
      values[t] = pearson_cc(seq.frame(t), rest);
    } catch (const Error& e) {
      fail(e.code(), "frame " + std::to_string(t) + " vs rest frame: " + e.what());
    }
  }
  return CorrelationTrace(std::move(values), seq.frame_rate());
}

struct ValleyParams {
  std::size_t n_motions = 1;
  std::size_t smoothing_window = 5;
  std::size_t min_separation = 1;
  double min_prominence = 0.1;

  void validate() const {
    require(n_motions >= 1, Errc::invalid_argument, "n_motions must be >= 1");
    require(smoothing_window % 2 == 1, Errc::invalid_argument,
            "smoothing window must be odd and >= 1");
    require(min_separation >= 1, Errc::invalid_argument, "min_separation must be >= 1");
    require(min_prominence >= 0.0 && min_prominence <= 1.0, Errc::invalid_argument,
            "min_prominence must lie in [0, 1]");
  }
};

/// ceil(period/2 * rate) frames when a metronome period is known, otherwise
/// ceil(length / (2 n_motions)).
inline std::size_t default_min_separation(std::size_t trace_length, double frame_rate,
                                          std::size_t n_motions,
                                          std::optional<double> metronome_period_s) {
  if (metronome_period_s)
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(0.5 * *metronome_period_s * frame_rate)));
  return std::max<std::size_t>(
      1, (trace_length + 2 * n_motions - 1) / (2 * std::max<std::size_t>(1, n_motions)));
}

inline ValleyParams default_valley_params(const Sequence& seq, std::size_t n_motions) {
  ValleyParams p;
  p.n_motions = n_motions;
  p.min_separation = default_min_separation(seq.size(), seq.frame_rate(), n_motions,
                                            seq.meta().metronome_period_s);
  return p;
}

/// Centered moving average; near the ends only the samples that exist are
/// averaged.
inline std::vector<double> moving_average(std::span<const double> x, std::size_t window) {
  require(window % 2 == 1, Errc::invalid_argument, "smoothing window must be odd");
  const std::size_t half = window / 2;
  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(x.size() - 1, t + half);
    double sum = 0.0;
    for (std::size_t u = lo; u <= hi; ++u) sum += x[u];
    out[t] = sum / double(hi - lo + 1);
  }
  return out;
}

/// Depth of a strict local minimum below the lower of the two highest points
/// reachable on each side before the signal dips beneath it.
inline double valley_prominence(std::span<const double> s, std::size_t t) {
  double left = s[t];
  for (std::size_t u = t; u-- > 0;) {
    if (s[u] < s[t]) break;
    left = std::max(left, s[u]);
  }
  double right = s[t];
  for (std::size_t u = t + 1; u < s.size(); ++u) {
    if (s[u] < s[t]) break;
    right = std::max(right, s[u]);
  }
  return std::min(left, right) - s[t];
}

inline std::vector<std::size_t> detect_endstates(const CorrelationTrace& trace,
                                                 const ValleyParams& p) {
  p.validate();
  require(trace.size() > p.smoothing_window, Errc::invalid_argument,
          "trace shorter than smoothing window");
  const auto smooth = moving_average(trace.values(), p.smoothing_window);
  const auto [lo, hi] = std::minmax_element(smooth.begin(), smooth.end());
  const double range = *hi - *lo;
  require(range > 0.0, Errc::invalid_argument, "correlation trace is flat");
  const double threshold = p.min_prominence * range;

  std::vector<std::size_t> candidates;
  for (std::size_t t = 1; t + 1 < smooth.size(); ++t)
    if (smooth[t] < smooth[t - 1] && smooth[t] < smooth[t + 1] &&
        valley_prominence(smooth, t) >= threshold)
      candidates.push_back(t);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t a, std::size_t b) { return smooth[a] < smooth[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t t : candidates) {
    if (kept.size() == p.n_motions) break;
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
      return (t > k ? t - k : k - t) >= p.min_separation;
    });
    if (clear) kept.push_back(t);
  }
  if (kept.size() < p.n_motions)
    fail(Errc::insufficient_valleys, "found " + std::to_string(kept.size()) +
                                         " qualifying valleys, need " +
                                         std::to_string(p.n_motions));
  std::sort(kept.begin(), kept.end());
  return kept;
}

/// One trial: its sequence and the class label of each motion in order.
struct LabeledSequence {
  const Sequence* sequence;
  std::vector<std::string> motions;
  std::string name;
};

/// Per-trial valley parameters come from `base` with n_motions taken from the
/// trial's motion list; a zero `base.min_separation` selects the default.
inline EndStateDataset build_dataset(std::span<const LabeledSequence> trials,
                                     const ValleyParams& base,
                                     std::vector<std::vector<std::size_t>>* indices_out = nullptr) {
  require(!trials.empty(), Errc::invalid_argument, "no trials given");
  const auto& reference = trials.front().motions;
  std::vector<std::string> labels = reference;
  std::sort(labels.begin(), labels.end());
  require(std::adjacent_find(labels.begin(), labels.end()) == labels.end(),
          Errc::invalid_argument, "a trial repeats a motion label");
  labels = reference;  // class order follows the first trial's motion order

  std::vector<std::vector<const Frame*>> slots(labels.size());
  for (const auto& trial : trials) {
    const auto trial_name = trial.name.empty() ? trial.sequence->meta().trial : trial.name;
    auto sorted = trial.motions;
    std::sort(sorted.begin(), sorted.end());
    auto expected = reference;
    std::sort(expected.begin(), expected.end());
    require(sorted == expected, Errc::invalid_argument,
            "trial '" + trial_name + "' has an inconsistent label set");
    require(trial.sequence->kind() == FrameKind::bmode, Errc::wrong_kind,
            "trial '" + trial_name + "' is not B-mode");

    ValleyParams p = base;
    p.n_motions = trial.motions.size();
    if (p.min_separation == 0)
      p.min_separation = default_valley_params(*trial.sequence, p.n_motions).min_separation;

    std::vector<std::size_t> idx;
    try {
      idx = detect_endstates(cc_trace(*trial.sequence), p);
    } catch (const Error& e) {
      fail(e.code(), "trial '" + trial_name + "': " + e.what());
    }
    if (indices_out) indices_out->push_back(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) {
      const auto cls = std::find(labels.begin(), labels.end(), trial.motions[pos]) - labels.begin();
      slots[cls].push_back(&trial.sequence->frame(idx[pos]));
    }
  }

  std::vector<Frame> frames;
  for (const auto& cls : slots)
    for (const Frame* f : cls) frames.push_back(*f);
  return EndStateDataset(std::move(labels), trials.size(), std::move(frames));
}

}  // namespace smg
