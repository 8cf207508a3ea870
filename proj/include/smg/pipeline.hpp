#pragma once

// End-to-end evaluation: trials -> B-mode -> end-state dataset -> FC/MI
// scores -> UDSS/DSS/CSS subsets -> LOOCV accuracy report.
//
// Every intermediate artifact passes through its file codec before the next
// stage sees it, so running the stages one by one through files gives the
// same bytes as one pipeline run.

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smg/classify.hpp"
#include "smg/endstate.hpp"
#include "smg/error.hpp"
#include "smg/preprocess.hpp"
#include "smg/scoring.hpp"
#include "smg/selection.hpp"
#include "smg/seqio.hpp"

namespace smg {

struct PipelineConfig {
  ValleyParams valley{.min_separation = 0};  // 0: derive from the metronome period
  MiConfig mi;
  std::size_t selection_smoothing = default_selection_window;
  DistanceMetric metric = DistanceMetric::euclidean;
  std::vector<std::size_t> counts{4, 8, 16};
  Strategy strategy = Strategy::css;  // single-subset commands
  std::size_t count = 4;
  PreprocessConfig preprocess;
  std::string out = "smg_out";

  void validate() const {
    ValleyParams v = valley;
    if (v.min_separation == 0) v.min_separation = 1;
    v.validate();
    mi.validate();
    require(selection_smoothing % 2 == 1, Errc::invalid_argument,
            "selection smoothing window must be odd");
    require(!counts.empty(), Errc::invalid_argument, "no subset sizes given");
    for (auto c : counts) require(c >= 1, Errc::invalid_argument, "subset sizes must be >= 1");
    require(count >= 1, Errc::invalid_argument, "subset size must be >= 1");
  }
};

inline std::string_view to_string(NormalizationScope s) {
  return s == NormalizationScope::per_frame ? "per_frame" : "per_sequence";
}

inline NormalizationScope parse_normalization(std::string_view name) {
  if (name == "per_frame") return NormalizationScope::per_frame;
  if (name == "per_sequence") return NormalizationScope::per_sequence;
  fail(Errc::invalid_argument, "unknown normalization scope '" + std::string(name) + "'");
}

inline nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
  return {{"valley",
           {{"smoothing_window", c.valley.smoothing_window},
            {"min_separation", c.valley.min_separation},
            {"min_prominence", c.valley.min_prominence}}},
          {"mi_bins", c.mi.bin_count},
          {"selection_smoothing", c.selection_smoothing},
          {"metric", std::string(to_string(c.metric))},
          {"counts", c.counts},
          {"strategy", std::string(to_string(c.strategy))},
          {"count", c.count},
          {"normalization", std::string(to_string(c.preprocess.normalization_scope))},
          {"out", c.out}};
}

/// Missing keys keep their defaults; unknown keys are rejected so typos do
/// not pass silently.
inline PipelineConfig pipeline_config_from_json(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded() && j.is_object(), Errc::format, "config is not a JSON object");
  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "valley") {
        require(value.is_object(), Errc::format, "'valley' must be an object");
        for (const auto& [vk, vv] : value.items()) {
          if (vk == "smoothing_window") c.valley.smoothing_window = vv.get<std::size_t>();
          else if (vk == "min_separation") c.valley.min_separation = vv.get<std::size_t>();
          else if (vk == "min_prominence") c.valley.min_prominence = vv.get<double>();
          else fail(Errc::format, "unknown config key 'valley." + vk + "'");
        }
      } else if (key == "mi_bins") {
        c.mi.bin_count = value.get<std::size_t>();
      } else if (key == "selection_smoothing") {
        c.selection_smoothing = value.get<std::size_t>();
      } else if (key == "metric") {
        c.metric = parse_metric(value.get<std::string>());
      } else if (key == "counts") {
        c.counts = value.get<std::vector<std::size_t>>();
      } else if (key == "strategy") {
        c.strategy = parse_strategy(value.get<std::string>());
      } else if (key == "count") {
        c.count = value.get<std::size_t>();
      } else if (key == "normalization") {
        c.preprocess.normalization_scope = parse_normalization(value.get<std::string>());
      } else if (key == "out") {
        c.out = value.get<std::string>();
      } else {
        fail(Errc::format, "unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::format, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

/// Runs `body`, prefixing any library error with the stage (and trial).
template <class F>
auto in_stage(std::string_view stage, std::string_view trial, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    std::string where = "stage " + std::string(stage);
    if (!trial.empty()) where += ", trial '" + std::string(trial) + "'";
    fail(e.code(), where + ": " + e.what());
  }
}

// ------------------------------------------------------------------ stages

/// B-mode as it would be read back from disk: RF input is enveloped and
/// compressed, then narrowed to float32 by a codec round trip.
inline Sequence to_bmode(const Sequence& seq, const PreprocessConfig& cfg) {
  if (seq.kind() == FrameKind::bmode) return seq;
  return decode_sequence(encode_sequence(preprocess_sequence(seq, cfg)));
}

struct NamedSequence {
  std::string name;
  Sequence sequence;
};

inline EndStateDataset extract_dataset(std::span<const NamedSequence> trials,
                                       const ValleyParams& valley,
                                       std::vector<std::vector<std::size_t>>* indices = nullptr) {
  std::vector<LabeledSequence> labeled;
  for (const auto& t : trials) {
    require(!t.sequence.meta().motions.empty(), Errc::invalid_argument,
            "trial '" + t.name + "' carries no motion labels");
    labeled.push_back({&t.sequence, t.sequence.meta().motions, t.name});
  }
  return decode_dataset(encode_dataset(build_dataset(labeled, valley, indices)));
}

/// Score CSV with the aggregate row appended.
inline std::string score_csv(const EndStateDataset& ds, ScoreMethod method, const MiConfig& mi) {
  const auto scores = score_matrix(ds, method, mi);
  return format_scores(scores, aggregate(scores).values);
}

inline ScoreMethod method_for(Strategy s) {
  return s == Strategy::css ? ScoreMethod::mi : ScoreMethod::fc;
}

inline std::string scores_file_name(ScoreMethod m) {
  return m == ScoreMethod::fc ? "scores_fc.csv" : "scores_mi.csv";
}

/// Subset from the score CSV a strategy reads (FC for UDSS/DSS, MI for CSS).
/// UDSS only uses the scanline count.
inline ScanlineSubset select_from_csv(std::string_view csv, Strategy strategy, std::size_t count,
                                      std::size_t smoothing) {
  const auto scores = parse_scores(csv, method_for(strategy));
  switch (strategy) {
    case Strategy::udss: return udss(scores.scanlines(), count);
    case Strategy::dss: return dss(scores, count, smoothing);
    case Strategy::css: return css(scores, count, smoothing);
  }
  fail(Errc::invalid_argument, "unknown strategy");
}

/// All scanlines, for the baseline row.
inline ScanlineSubset full_subset(std::size_t scanlines) { return udss(scanlines, scanlines); }

struct ReportRow {
  std::string strategy;
  std::size_t count;
  Accuracy accuracy;
};

inline std::string format_report(const std::vector<std::string>& labels,
                                 const std::vector<ReportRow>& rows) {
  std::string out = "strategy,count,overall_accuracy";
  for (const auto& l : labels) out += "," + l;
  out += '\n';
  for (const auto& r : rows) {
    out += r.strategy + "," + std::to_string(r.count) + "," + format_real(r.accuracy.overall);
    for (double a : r.accuracy.per_class) out += "," + format_real(a);
    out += '\n';
  }
  return out;
}

inline std::string subset_file_name(Strategy s, std::size_t count) {
  std::string name(to_string(s));
  for (auto& ch : name) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  return "subset_" + name + "_" + std::to_string(count) + ".json";
}

inline std::string confusion_file_name(std::string_view strategy, std::size_t count) {
  std::string name(strategy);
  for (auto& ch : name) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  return "confusion_" + name + "_" + std::to_string(count) + ".csv";
}

/// Named output files in the order they are produced.
struct PipelineResult {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::vector<std::size_t>> end_states;  // per trial
  std::vector<ReportRow> rows;

  const std::string& file(std::string_view name) const {
    for (const auto& [n, body] : files)
      if (n == name) return body;
    fail(Errc::invalid_argument, "no pipeline output named '" + std::string(name) + "'");
  }
};

inline std::string end_states_json(std::span<const NamedSequence> trials,
                                   const std::vector<std::vector<std::size_t>>& indices) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t t = 0; t < trials.size(); ++t) j[trials[t].name] = indices[t];
  return j.dump(2) + "\n";
}

/// Runs every stage on already-loaded trials. Trials may be RF or B-mode.
inline PipelineResult run_pipeline(std::vector<NamedSequence> trials, const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult res;
  for (auto& t : trials)
    t.sequence = in_stage("preprocess", t.name,
                          [&] { return to_bmode(t.sequence, cfg.preprocess); });

  const auto ds = in_stage("endstates", "", [&] {
    return extract_dataset(trials, cfg.valley, &res.end_states);
  });
  const auto bytes = encode_dataset(ds);
  res.files.emplace_back("dataset.smgd", std::string(bytes.begin(), bytes.end()));
  res.files.emplace_back("endstates.json", end_states_json(trials, res.end_states));

  const auto fc = in_stage("score", "", [&] { return score_csv(ds, ScoreMethod::fc, cfg.mi); });
  const auto mi = in_stage("score", "", [&] { return score_csv(ds, ScoreMethod::mi, cfg.mi); });
  res.files.emplace_back(scores_file_name(ScoreMethod::fc), fc);
  res.files.emplace_back(scores_file_name(ScoreMethod::mi), mi);

  auto evaluate = [&](const std::string& label, std::size_t count, const ScanlineSubset& subset) {
    const auto cm = in_stage("classify", "", [&] { return loocv(ds, subset, cfg.metric); });
    res.files.emplace_back(confusion_file_name(label, count), confusion_to_csv(cm));
    res.rows.push_back({label, count, accuracy(cm)});
  };

  for (Strategy s : {Strategy::udss, Strategy::dss, Strategy::css})
    for (std::size_t count : cfg.counts) {
      const auto subset = in_stage("select", "", [&] {
        return select_from_csv(s == Strategy::css ? mi : fc, s, count, cfg.selection_smoothing);
      });
      res.files.emplace_back(subset_file_name(s, count), subset_to_json(subset));
      evaluate(std::string(to_string(s)), count, subset);
    }
  evaluate("ORIGINAL", ds.scanlines(), full_subset(ds.scanlines()));

  res.files.emplace_back("report.csv", format_report(ds.labels(), res.rows));
  return res;
}

/// Loads each path (stage "read_sequence") and runs the pipeline.
inline PipelineResult run_pipeline(const std::vector<std::filesystem::path>& inputs,
                                   const PipelineConfig& cfg) {
  std::vector<NamedSequence> trials;
  for (const auto& p : inputs)
    trials.push_back({p.stem().string(),
                      in_stage("read_sequence", p.string(), [&] { return load_sequence(p); })});
  return run_pipeline(std::move(trials), cfg);
}

inline void write_outputs(const PipelineResult& res, const std::filesystem::path& dir) {
  in_stage("write", "", [&] {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    require(!ec, Errc::io, "cannot create directory " + dir.string());
    for (const auto& [name, body] : res.files)
      detail::write_file(dir / name, std::span(reinterpret_cast<const std::uint8_t*>(body.data()),
                                               body.size()));
  });
}

}  // namespace smg
