// smg: command-line front end. Exit status 0 on success, 1 on data or
// pipeline errors, 2 on usage errors.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smg/pipeline.hpp"
#include "smg/synthgen.hpp"

namespace fs = std::filesystem;
using namespace smg;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

PipelineConfig load_config(const Globals& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) {
    std::ifstream in(g.config_path);
    require(bool(in), Errc::io, "cannot open config " + g.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = pipeline_config_from_json(buf.str());
  }
  if (g.out) cfg.out = *g.out;
  return cfg;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(bool(in), Errc::io, "cannot open " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& p, std::string_view text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  detail::write_file(p, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<NamedSequence> load_trials(const std::vector<std::string>& paths) {
  std::vector<NamedSequence> trials;
  for (const fs::path p : paths)
    trials.push_back({p.stem().string(),
                      in_stage("read_sequence", p.string(), [&] { return load_sequence(p); })});
  return trials;
}

void print_subset(const ScanlineSubset& s) {
  std::printf("%s %zu:", std::string(to_string(s.strategy)).c_str(), s.indices.size());
  for (auto j : s.indices) std::printf(" %zu", j);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scanline selection and motion classification for ultrasound sequences"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "JSON pipeline config")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "phantom seed");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic phantom");
  std::string profile = "easy";
  bool rf = false;
  synth->add_option("--profile", profile, "easy or noisy")
      ->check(CLI::IsMember({"easy", "noisy"}));
  synth->add_flag("--rf", rf, "write RF sequences instead of B-mode");

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "RF to B-mode");
  std::vector<std::string> pre_inputs;
  std::string normalization;
  pre->add_option("inputs", pre_inputs, "RF sequence files")->required();
  pre->add_option("--normalization", normalization, "per_frame or per_sequence")
      ->check(CLI::IsMember({"per_frame", "per_sequence"}));

  // endstates
  auto* ends = app.add_subcommand("endstates", "extract end-state frames into a dataset");
  std::vector<std::string> end_inputs;
  ends->add_option("inputs", end_inputs, "B-mode sequence files")->required();

  // score
  auto* score = app.add_subcommand("score", "per-scanline FC and MI scores");
  std::string score_input, method = "both";
  score->add_option("dataset", score_input, "end-state dataset")->required();
  score->add_option("--method", method, "fc, mi or both")->check(CLI::IsMember({"fc", "mi", "both"}));

  // select
  auto* sel = app.add_subcommand("select", "choose a scanline subset from a score CSV");
  std::string sel_input;
  std::optional<std::string> strategy;
  std::optional<std::size_t> count;
  sel->add_option("scores", sel_input, "score CSV (FC for udss/dss, MI for css)")->required();
  sel->add_option("--strategy", strategy, "udss, dss or css")
      ->check(CLI::IsMember({"udss", "dss", "css"}, CLI::ignore_case));
  sel->add_option("--count", count, "number of scanlines")->check(CLI::PositiveNumber);

  // classify
  auto* cls = app.add_subcommand("classify", "leave-one-out nearest-neighbour accuracy");
  std::string cls_input, subset_path;
  std::optional<std::string> metric;
  cls->add_option("dataset", cls_input, "end-state dataset")->required();
  cls->add_option("--subset", subset_path, "subset JSON (default: all scanlines)");
  cls->add_option("--metric", metric, "euclidean or one_minus_cc")
      ->check(CLI::IsMember({"euclidean", "one_minus_cc"}));

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "run every stage and write the accuracy report");
  std::vector<std::string> pipe_inputs;
  pipe->add_option("inputs", pipe_inputs, "trial sequence files (RF or B-mode)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto cfg = load_config(g);
    if (!normalization.empty()) cfg.preprocess.normalization_scope = parse_normalization(normalization);
    if (metric) cfg.metric = parse_metric(*metric);
    if (strategy) cfg.strategy = parse_strategy(*strategy);
    if (count) cfg.count = *count;
    const fs::path out = cfg.out;

    if (*synth) {
      auto pc = default_config(profile == "easy" ? PhantomProfile::easy : PhantomProfile::noisy);
      if (g.seed) pc.seed = *g.seed;
      pc.emit_rf = rf;
      const auto ph = generate(pc);
      fs::create_directories(out);
      for (std::size_t t = 0; t < ph.trials.size(); ++t) {
        const auto& seq = rf ? ph.rf_trials[t] : ph.trials[t];
        const auto name = seq.meta().trial + ".smg";
        save_sequence(seq, out / name);
        std::printf("%s: %zu frames, %zu x %zu, %s, end states", name.c_str(), seq.size(),
                    seq.scanlines(), seq.depth(), std::string(to_string(seq.kind())).c_str());
        for (auto i : ph.truth.end_state_indices[t]) std::printf(" %zu", i);
        std::printf("\n");
      }
      write_text(out / "truth.json", truth_to_json(pc, ph.truth));
    } else if (*pre) {
      fs::create_directories(out);
      for (auto& t : load_trials(pre_inputs)) {
        const auto bm = in_stage("preprocess", t.name,
                                 [&] { return to_bmode(t.sequence, cfg.preprocess); });
        save_sequence(bm, out / (t.name + ".smg"));
        std::printf("%s.smg: %zu frames\n", t.name.c_str(), bm.size());
      }
    } else if (*ends) {
      const auto trials = load_trials(end_inputs);
      std::vector<std::vector<std::size_t>> idx;
      const auto ds = in_stage("endstates", "", [&] {
        return extract_dataset(trials, cfg.valley, &idx);
      });
      fs::create_directories(out);
      save_dataset(ds, out / "dataset.smgd");
      write_text(out / "endstates.json", end_states_json(trials, idx));
      for (std::size_t t = 0; t < trials.size(); ++t) {
        std::printf("%s:", trials[t].name.c_str());
        for (auto i : idx[t]) std::printf(" %zu", i);
        std::printf("\n");
      }
    } else if (*score) {
      const auto ds = in_stage("read_dataset", score_input, [&] { return load_dataset(score_input); });
      for (auto m : {ScoreMethod::fc, ScoreMethod::mi}) {
        if (method != "both" && (method == "fc") != (m == ScoreMethod::fc)) continue;
        const auto csv = in_stage("score", "", [&] { return score_csv(ds, m, cfg.mi); });
        const auto name = scores_file_name(m);
        write_text(out / name, csv);
        std::printf("%s\n", name.c_str());
      }
    } else if (*sel) {
      const auto csv = read_text(sel_input);
      const auto subset = in_stage("select", "", [&] {
        return select_from_csv(csv, cfg.strategy, cfg.count, cfg.selection_smoothing);
      });
      write_text(out / subset_file_name(cfg.strategy, cfg.count), subset_to_json(subset));
      print_subset(subset);
    } else if (*cls) {
      const auto ds = in_stage("read_dataset", cls_input, [&] { return load_dataset(cls_input); });
      std::string label = "ORIGINAL";
      auto subset = full_subset(ds.scanlines());
      if (!subset_path.empty()) {
        subset = subset_from_json(read_text(subset_path));
        label = std::string(to_string(subset.strategy));
      }
      const auto cm = in_stage("classify", "", [&] { return loocv(ds, subset, cfg.metric); });
      const auto n = label == "ORIGINAL" ? ds.scanlines() : subset.indices.size();
      write_text(out / confusion_file_name(label, n), confusion_to_csv(cm));
      write_text(out / "summary.json", classification_summary_json(cm, subset, cfg.metric));
      std::printf("%s %zu: accuracy %s\n", label.c_str(), n,
                  format_real(accuracy(cm).overall).c_str());
    } else if (*pipe) {
      std::vector<fs::path> paths(pipe_inputs.begin(), pipe_inputs.end());
      const auto res = run_pipeline(paths, cfg);
      write_outputs(res, out);
      std::printf("%s", res.file("report.csv").c_str());
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
