#pragma once

// Nearest-neighbour classification of end-state feature maps and
// leave-one-out cross-validation.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smg/endstate.hpp"
#include "smg/error.hpp"
#include "smg/selection.hpp"
#include "smg/seqio.hpp"

namespace smg {

enum class DistanceMetric { euclidean, one_minus_cc };

inline std::string_view to_string(DistanceMetric m) {
  return m == DistanceMetric::euclidean ? "euclidean" : "one_minus_cc";
}

inline DistanceMetric parse_metric(std::string_view name) {
  if (name == "euclidean") return DistanceMetric::euclidean;
  if (name == "one_minus_cc" || name == "cc") return DistanceMetric::one_minus_cc;
  fail(Errc::invalid_argument, "unknown metric '" + std::string(name) + "'");
}

/// Squared Euclidean distance (same ordering as Euclidean) or 1 - Pearson.
inline double distance(std::span<const double> a, std::span<const double> b,
                       DistanceMetric metric) {
  require(a.size() == b.size(), Errc::dimension_mismatch, "feature maps differ in size");
  if (metric == DistanceMetric::one_minus_cc) return 1.0 - pearson(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct Exemplar {
  Frame features;
  std::size_t label;
};

namespace detail {

/// Position of the nearest exemplar, skipping `skip`; first wins on ties.
inline std::size_t nearest(std::span<const Exemplar> train, const Frame& query,
                           DistanceMetric metric, std::size_t skip = std::size_t(-1)) {
  std::size_t best = std::size_t(-1);
  double best_d = 0.0;
  for (std::size_t p = 0; p < train.size(); ++p) {
    if (p == skip) continue;
    require(train[p].features.same_shape(query), Errc::dimension_mismatch,
            "feature map dimensions differ");
    const double d = distance(train[p].features.values(), query.values(), metric);
    if (best == std::size_t(-1) || d < best_d) {
      best = p;
      best_d = d;
    }
  }
  require(best != std::size_t(-1), Errc::invalid_argument, "empty training set");
  return best;
}

}  // namespace detail

inline std::size_t nn_classify(std::span<const Exemplar> train, const Frame& query,
                               DistanceMetric metric = DistanceMetric::euclidean) {
  return train[detail::nearest(train, query, metric)].label;
}

class ConfusionMatrix {
 public:
  ConfusionMatrix(std::vector<std::string> labels, std::vector<std::size_t> counts)
      : labels_(std::move(labels)), counts_(std::move(counts)) {
    require(!labels_.empty(), Errc::invalid_argument, "confusion matrix needs labels");
    require(counts_.size() == labels_.size() * labels_.size(), Errc::dimension_mismatch,
            "confusion counts must be n x n");
  }

  std::size_t classes() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t operator()(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * labels_.size() + predicted];
  }
  std::size_t row_sum(std::size_t truth) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < classes(); ++p) s += (*this)(truth, p);
    return s;
  }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }
  std::size_t trace() const {
    std::size_t s = 0;
    for (std::size_t i = 0; i < classes(); ++i) s += (*this)(i, i);
    return s;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix loocv(const EndStateDataset& ds, const ScanlineSubset& subset,
                             DistanceMetric metric = DistanceMetric::euclidean) {
  require(ds.trials() >= 2, Errc::invalid_argument,
          "leave-one-out needs k >= 2 trials per class (k < 2 leaves a class without "
          "exemplars)");
  subset.validate(ds.scanlines());
  std::vector<Exemplar> samples;
  samples.reserve(ds.classes() * ds.trials());
  for (std::size_t i = 0; i < ds.classes(); ++i)
    for (std::size_t t = 0; t < ds.trials(); ++t)
      samples.push_back({extract_feature_map(ds.frame(i, t), subset), i});

  const std::size_t n = ds.classes();
  std::vector<std::size_t> counts(n * n, 0);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto predicted = samples[detail::nearest(samples, samples[s].features, metric, s)].label;
    ++counts[samples[s].label * n + predicted];
  }
  return ConfusionMatrix(ds.labels(), std::move(counts));
}

struct Accuracy {
  double overall = 0.0;
  std::vector<double> per_class;
};

inline Accuracy accuracy(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  require(total > 0, Errc::invalid_argument, "accuracy of an empty confusion matrix");
  Accuracy a;
  a.overall = double(cm.trace()) / double(total);
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    const std::size_t row = cm.row_sum(i);
    a.per_class.push_back(row == 0 ? 0.0 : double(cm(i, i)) / double(row));
  }
  return a;
}

/// Header row and first column carry the labels; rows are true classes.
inline std::string confusion_to_csv(const ConfusionMatrix& cm) {
  std::string out = "true\\predicted";
  for (const auto& l : cm.labels()) out += "," + l;
  out += '\n';
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    out += cm.labels()[i];
    for (std::size_t p = 0; p < cm.classes(); ++p) out += "," + std::to_string(cm(i, p));
    out += '\n';
  }
  return out;
}

inline std::string classification_summary_json(const ConfusionMatrix& cm,
                                               const ScanlineSubset& subset,
                                               DistanceMetric metric) {
  const auto acc = accuracy(cm);
  nlohmann::json j;
  j["overall"] = acc.overall;
  j["per_class"] = nlohmann::json::object();
  for (std::size_t i = 0; i < cm.classes(); ++i) j["per_class"][cm.labels()[i]] = acc.per_class[i];
  j["subset"] = nlohmann::json::parse(subset_to_json(subset));
  j["metric"] = std::string(to_string(metric));
  return j.dump(2) + "\n";
}

}  // namespace smg
