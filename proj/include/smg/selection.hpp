#pragma once

// Scanline subset selection: uniform spacing (UDSS), Fisher-criterion peaks
// (DSS) and mutual-information valleys (CSS).

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smg/endstate.hpp"
#include "smg/error.hpp"
#include "smg/scoring.hpp"
#include "smg/seqio.hpp"

namespace smg {

enum class Strategy { udss, dss, css };

inline std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::udss: return "UDSS";
    case Strategy::dss: return "DSS";
    case Strategy::css: return "CSS";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  if (lower == "udss") return Strategy::udss;
  if (lower == "dss") return Strategy::dss;
  if (lower == "css") return Strategy::css;
  fail(Errc::invalid_argument, "unknown strategy '" + std::string(name) + "'");
}

/// Sorted scanline indices; `ranks[p]` is the discriminability rank (1 = best)
/// of `indices[p]`.
struct ScanlineSubset {
  std::vector<std::size_t> indices;
  std::vector<std::size_t> ranks;
  Strategy strategy = Strategy::udss;

  void validate(std::size_t scanlines) const {
    require(!indices.empty(), Errc::invalid_argument, "empty scanline subset");
    require(ranks.size() == indices.size(), Errc::dimension_mismatch,
            "subset ranks and indices differ in length");
    for (std::size_t p = 0; p < indices.size(); ++p) {
      require(indices[p] < scanlines, Errc::out_of_range,
              "scanline index " + std::to_string(indices[p]) + " out of range for m=" +
                  std::to_string(scanlines));
      require(p == 0 || indices[p - 1] < indices[p], Errc::invalid_argument,
              "subset indices must be strictly increasing");
    }
  }

  friend bool operator==(const ScanlineSubset&, const ScanlineSubset&) = default;
};

inline ScanlineSubset udss(std::size_t scanlines, std::size_t count) {
  require(count >= 1 && count <= scanlines, Errc::invalid_argument,
          "subset size " + std::to_string(count) + " outside [1, " +
              std::to_string(scanlines) + "]");
  ScanlineSubset s{.strategy = Strategy::udss};
  for (std::size_t c = 0; c < count; ++c) {
    s.indices.push_back((2 * c + 1) * scanlines / (2 * count));  // floor((c + 1/2) m / count)
    s.ranks.push_back(c + 1);
  }
  return s;
}

enum class Polarity { maxima, minima };

inline constexpr std::size_t default_selection_window = 5;
inline constexpr std::size_t fallback_exclusion = 2;

/// Interior local extrema of `s`. A plateau counts once, at its leftmost
/// sample, when both flanking samples are strictly lower (maxima) or higher
/// (minima).
inline std::vector<std::size_t> interior_extrema(std::span<const double> s, Polarity polarity) {
  auto beyond = [&](double outer, double inner) {
    return polarity == Polarity::maxima ? outer < inner : outer > inner;
  };
  std::vector<std::size_t> found;
  std::size_t a = 1;
  while (a + 1 < s.size()) {
    std::size_t b = a;
    while (b + 1 < s.size() && s[b + 1] == s[a]) ++b;
    if (b + 1 < s.size() && beyond(s[a - 1], s[a]) && beyond(s[b + 1], s[a])) found.push_back(a);
    a = b + 1;
  }
  return found;
}

/// Picks `count` scanlines from the smoothed aggregate: the strongest interior
/// extrema first, then (if those run out) the best remaining values while
/// keeping clear of +-2 around earlier picks, then any remaining values.
inline ScanlineSubset extrema_select(const AggregatedScore& agg, std::size_t count,
                                     Polarity polarity,
                                     std::size_t smoothing_window = default_selection_window) {
  const std::size_t m = agg.values.size();
  require(count >= 1 && count <= m, Errc::invalid_argument,
          "subset size " + std::to_string(count) + " outside [1, " + std::to_string(m) + "]");
  const auto s = moving_average(agg.values, smoothing_window);
  auto better = [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return polarity == Polarity::maxima ? s[a] > s[b] : s[a] < s[b];
    return a < b;
  };

  std::vector<std::size_t> order;  // selection order
  auto extrema = interior_extrema(s, polarity);
  std::sort(extrema.begin(), extrema.end(), better);
  for (std::size_t t : extrema) {
    if (order.size() == count) break;
    order.push_back(t);
  }

  if (order.size() < count) {
    std::vector<std::size_t> ranked(m);
    for (std::size_t j = 0; j < m; ++j) ranked[j] = j;
    std::sort(ranked.begin(), ranked.end(), better);
    std::vector<bool> taken(m, false), blocked(m, false);
    auto take = [&](std::size_t j) {
      order.push_back(j);
      taken[j] = true;
      const std::size_t lo = j >= fallback_exclusion ? j - fallback_exclusion : 0;
      for (std::size_t u = lo; u <= std::min(m - 1, j + fallback_exclusion); ++u) blocked[u] = true;
    };
    const std::vector<std::size_t> initial = order;
    order.clear();
    for (std::size_t j : initial) take(j);
    for (std::size_t j : ranked)
      if (order.size() < count && !blocked[j]) take(j);
    for (std::size_t j : ranked)
      if (order.size() < count && !taken[j]) take(j);
  }

  ScanlineSubset out;
  out.strategy = polarity == Polarity::maxima ? Strategy::dss : Strategy::css;
  std::vector<std::size_t> by_index(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) by_index[r] = r;
  std::sort(by_index.begin(), by_index.end(),
            [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
  for (std::size_t r : by_index) {
    out.indices.push_back(order[r]);
    out.ranks.push_back(r + 1);
  }
  return out;
}

inline ScanlineSubset dss(const ScoreMatrix& fc, std::size_t count,
                          std::size_t smoothing_window = default_selection_window) {
  require(fc.method() == ScoreMethod::fc, Errc::invalid_argument, "DSS needs an FC score matrix");
  auto s = extrema_select(aggregate(fc), count, Polarity::maxima, smoothing_window);
  s.strategy = Strategy::dss;
  return s;
}

inline ScanlineSubset css(const ScoreMatrix& mi, std::size_t count,
                          std::size_t smoothing_window = default_selection_window) {
  require(mi.method() == ScoreMethod::mi, Errc::invalid_argument, "CSS needs an MI score matrix");
  auto s = extrema_select(aggregate(mi), count, Polarity::minima, smoothing_window);
  s.strategy = Strategy::css;
  return s;
}

/// Stacks the selected scanlines, in index order, into a reduced frame.
inline Frame extract_feature_map(const Frame& frame, const ScanlineSubset& subset) {
  subset.validate(frame.scanlines());
  std::vector<double> values;
  values.reserve(subset.indices.size() * frame.depth());
  for (std::size_t j : subset.indices) {
    const auto line = frame.scanline(j);
    values.insert(values.end(), line.begin(), line.end());
  }
  return Frame(subset.indices.size(), frame.depth(), std::move(values), frame.kind());
}

inline std::string subset_to_json(const ScanlineSubset& s) {
  nlohmann::json j;
  j["strategy"] = std::string(to_string(s.strategy));
  j["indices"] = s.indices;
  j["ranks"] = s.ranks;
  return j.dump() + "\n";
}

inline ScanlineSubset subset_from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded() && j.is_object(), Errc::format, "subset file is not a JSON object");
  ScanlineSubset s;
  try {
    s.strategy = parse_strategy(j.at("strategy").get<std::string>());
    s.indices = j.at("indices").get<std::vector<std::size_t>>();
    s.ranks = j.at("ranks").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("malformed subset JSON: ") + e.what());
  }
  require(s.ranks.size() == s.indices.size(), Errc::format,
          "subset ranks and indices differ in length");
  return s;
}

}  // namespace smg
