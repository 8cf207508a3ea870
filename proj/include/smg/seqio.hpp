#pragma once

// Data model for ultrasound sequences, end-state datasets and score matrices,
// together with their on-disk codecs:
//
//   SMG1  one recorded trial (sequence of frames)
//   SMGD  end-state dataset, n classes x k trials
//   CSV   per-class, per-scanline score matrix
//
// All binary integers and floats are little-endian. Samples are float32 on
// disk and double in memory; encoding narrows, decoding widens exactly, so any
// value that came from a file round-trips bit-exactly.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smg/error.hpp"

namespace smg {

enum class FrameKind : std::uint8_t { rf = 0, bmode = 1 };

inline std::string_view to_string(FrameKind kind) {
  return kind == FrameKind::rf ? "RF" : "BMODE";
}

/// One image: `scanlines` rows of `depth` samples, depth contiguous.
class Frame {
 public:
  Frame(std::size_t scanlines, std::size_t depth, std::vector<double> values,
        FrameKind kind)
      : scanlines_(scanlines), depth_(depth), values_(std::move(values)),
        kind_(kind) {
    require(scanlines_ >= 1, Errc::invalid_argument,
            "frame needs at least one scanline");
    require(depth_ >= 2, Errc::invalid_argument,
            "frame needs at least two depth samples");
    require(values_.size() == scanlines_ * depth_, Errc::dimension_mismatch,
            "frame holds " + std::to_string(values_.size()) +
                " values, expected " + std::to_string(scanlines_ * depth_));
    for (double v : values_) {
      require(std::isfinite(v), Errc::non_finite, "frame contains a non-finite value");
      if (kind_ == FrameKind::bmode)
        if (!(v >= 0.0 && v <= 1.0))
          fail(Errc::out_of_range, "B-mode value " + std::to_string(v) + " outside [0, 1]");
    }
  }

  std::size_t scanlines() const noexcept { return scanlines_; }
  std::size_t depth() const noexcept { return depth_; }
  FrameKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const double> scanline(std::size_t j) const {
    if (j >= scanlines_) fail(Errc::out_of_range, "scanline " + std::to_string(j) + " out of range");
    return std::span<const double>(values_).subspan(j * depth_, depth_);
  }

  double at(std::size_t j, std::size_t z) const { return values_[j * depth_ + z]; }

  bool same_shape(const Frame& other) const noexcept {
    return scanlines_ == other.scanlines_ && depth_ == other.depth_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t scanlines_;
  std::size_t depth_;
  std::vector<double> values_;
  FrameKind kind_;
};

struct SequenceMeta {
  std::string subject;
  std::string trial;
  std::optional<double> metronome_period_s;
  /// Class label of each motion performed in this trial, in temporal order.
  std::vector<std::string> motions;

  friend bool operator==(const SequenceMeta&, const SequenceMeta&) = default;
};

class Sequence {
 public:
  Sequence(std::vector<Frame> frames, double frame_rate, SequenceMeta meta = {})
      : frames_(std::move(frames)), frame_rate_(frame_rate), meta_(std::move(meta)) {
    require(frames_.size() >= 2, Errc::invalid_argument,
            "sequence needs at least two frames");
    require(std::isfinite(frame_rate_) && frame_rate_ > 0.0, Errc::invalid_argument,
            "frame rate must be positive");
    for (const auto& f : frames_) {
      require(f.same_shape(frames_.front()), Errc::dimension_mismatch,
              "frame dimensions differ within sequence");
      require(f.kind() == frames_.front().kind(), Errc::wrong_kind,
              "frame kinds differ within sequence");
    }
    if (meta_.metronome_period_s)
      require(std::isfinite(*meta_.metronome_period_s) && *meta_.metronome_period_s > 0.0,
              Errc::invalid_argument, "metronome period must be positive");
  }

  const std::vector<Frame>& frames() const noexcept { return frames_; }
  const Frame& frame(std::size_t t) const { return frames_.at(t); }
  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t scanlines() const noexcept { return frames_.front().scanlines(); }
  std::size_t depth() const noexcept { return frames_.front().depth(); }
  FrameKind kind() const noexcept { return frames_.front().kind(); }
  double frame_rate() const noexcept { return frame_rate_; }
  const SequenceMeta& meta() const noexcept { return meta_; }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<Frame> frames_;
  double frame_rate_;
  SequenceMeta meta_;
};

/// n classes x k trials of B-mode end-state frames, class-major.
class EndStateDataset {
 public:
  EndStateDataset(std::vector<std::string> labels, std::size_t trials,
                  std::vector<Frame> frames)
      : labels_(std::move(labels)), trials_(trials), frames_(std::move(frames)) {
    require(labels_.size() >= 2, Errc::invalid_argument,
            "dataset needs at least two classes, got " + std::to_string(labels_.size()));
    require(trials_ >= 1, Errc::invalid_argument, "dataset needs at least one trial");
    require(frames_.size() == labels_.size() * trials_, Errc::dimension_mismatch,
            "dataset holds " + std::to_string(frames_.size()) + " frames, expected " +
                std::to_string(labels_.size() * trials_) + " (labels x trials)");
    for (const auto& f : frames_) {
      require(f.kind() == FrameKind::bmode, Errc::wrong_kind,
              "dataset frames must be B-mode");
      require(f.same_shape(frames_.front()), Errc::dimension_mismatch,
              "frame dimensions differ within dataset");
    }
  }

  std::size_t classes() const noexcept { return labels_.size(); }
  std::size_t trials() const noexcept { return trials_; }
  std::size_t scanlines() const noexcept { return frames_.front().scanlines(); }
  std::size_t depth() const noexcept { return frames_.front().depth(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<Frame>& frames() const noexcept { return frames_; }

  const Frame& frame(std::size_t cls, std::size_t trial) const {
    require(cls < classes() && trial < trials_, Errc::out_of_range,
            "dataset slot out of range");
    return frames_[cls * trials_ + trial];
  }

  friend bool operator==(const EndStateDataset&, const EndStateDataset&) = default;

 private:
  std::vector<std::string> labels_;
  std::size_t trials_;
  std::vector<Frame> frames_;
};

enum class ScoreMethod { fc, mi };

inline std::string_view to_string(ScoreMethod method) {
  return method == ScoreMethod::fc ? "FC" : "MI";
}

/// Per-class, per-scanline discriminability. `per_trial` holds the summed
/// one-vs-rest score of every (class, scanline, trial); `averaged` is its
/// trial mean with each class row divided by the row maximum. A matrix read
/// back from CSV carries no per-trial slices (`trials() == 0`).
class ScoreMatrix {
 public:
  ScoreMatrix(ScoreMethod method, std::vector<std::string> labels, std::size_t scanlines,
              std::size_t trials, std::vector<double> per_trial,
              std::vector<double> averaged)
      : method_(method), labels_(std::move(labels)), scanlines_(scanlines),
        trials_(trials), per_trial_(std::move(per_trial)), averaged_(std::move(averaged)) {
    const std::size_t n = labels_.size();
    require(n >= 1 && scanlines_ >= 1, Errc::invalid_argument, "empty score matrix");
    require(averaged_.size() == n * scanlines_, Errc::dimension_mismatch,
            "averaged scores must be classes x scanlines");
    require(per_trial_.size() == n * scanlines_ * trials_, Errc::dimension_mismatch,
            "per-trial scores must be classes x scanlines x trials");
    for (double v : per_trial_) {
      require(std::isfinite(v), Errc::non_finite, "score matrix contains a non-finite value");
      require(v >= 0.0, Errc::out_of_range, "scores must be nonnegative");
    }
    for (std::size_t i = 0; i < n; ++i) {
      double row_max = 0.0;
      for (double v : averaged_row(i)) {
        require(std::isfinite(v), Errc::non_finite,
                "score matrix contains a non-finite value");
        require(v >= 0.0 && v <= 1.0, Errc::out_of_range,
                "normalized score outside [0, 1]");
        row_max = std::max(row_max, v);
      }
      require(row_max == 0.0 || row_max == 1.0, Errc::out_of_range,
              "class row '" + labels_[i] + "' is not max-normalized");
    }
  }

  ScoreMethod method() const noexcept { return method_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t classes() const noexcept { return labels_.size(); }
  std::size_t scanlines() const noexcept { return scanlines_; }
  std::size_t trials() const noexcept { return trials_; }

  double per_trial(std::size_t cls, std::size_t scanline, std::size_t trial) const {
    return per_trial_[(cls * scanlines_ + scanline) * trials_ + trial];
  }
  double averaged(std::size_t cls, std::size_t scanline) const {
    return averaged_[cls * scanlines_ + scanline];
  }
  std::span<const double> averaged_row(std::size_t cls) const {
    return std::span<const double>(averaged_).subspan(cls * scanlines_, scanlines_);
  }

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;

 private:
  ScoreMethod method_;
  std::vector<std::string> labels_;
  std::size_t scanlines_;
  std::size_t trials_;
  std::vector<double> per_trial_;
  std::vector<double> averaged_;
};

namespace detail {

inline constexpr std::size_t header_size = 24;
inline constexpr std::uint8_t format_version = 1;

class ByteWriter {
 public:
  void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) buf_.push_back(std::uint8_t(v >> shift));
  }
  void f32(double v) {
    const float narrowed = static_cast<float>(v);
    if (!std::isfinite(narrowed))
      fail(Errc::out_of_range, "value " + std::to_string(v) + " does not fit in float32");
    u32(std::bit_cast<std::uint32_t>(narrowed));
  }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void need(std::uint64_t total) const {
    if (data_.size() < total)
      fail(Errc::truncated, "truncated input: expected " + std::to_string(total) +
                                " bytes, got " + std::to_string(data_.size()));
  }
  std::uint8_t u8() { return data_[pos_++]; }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int shift = 0; shift < 32; shift += 8) v |= std::uint32_t(data_[pos_++]) << shift;
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::string_view text(std::size_t len) {
    std::string_view s(reinterpret_cast<const char*>(data_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  std::size_t pos() const noexcept { return pos_; }
  std::size_t size() const noexcept { return data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

inline void check_u32(std::size_t v, const char* what) {
  require(v <= 0xFFFFFFFFu, Errc::out_of_range, std::string(what) + " exceeds u32");
}

inline void write_header(ByteWriter& w, std::string_view magic, FrameKind kind) {
  w.bytes(magic);
  w.u8(format_version);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u8(0);
  w.u8(0);
}

inline FrameKind read_header(ByteReader& r, std::string_view magic) {
  r.need(header_size);
  if (r.text(4) != magic)
    fail(Errc::bad_magic, "bad magic: expected \"" + std::string(magic) + "\"");
  const auto version = r.u8();
  require(version == format_version, Errc::bad_version,
          "unsupported format version " + std::to_string(version));
  const auto kind = r.u8();
  require(kind <= 1, Errc::bad_kind, "unknown frame kind " + std::to_string(kind));
  require(r.u8() == 0 && r.u8() == 0, Errc::format, "reserved header bytes must be zero");
  return static_cast<FrameKind>(kind);
}

inline void write_trailer(ByteWriter& w, const nlohmann::json& meta) {
  std::string text;
  try {
    text = meta.dump();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, std::string("metadata is not valid UTF-8: ") + e.what());
  }
  check_u32(text.size(), "trailer length");
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text);
}

inline nlohmann::json read_trailer(ByteReader& r) {
  r.need(std::uint64_t(r.pos()) + 4);
  const std::uint32_t len = r.u32();
  r.need(std::uint64_t(r.pos()) + len);
  const auto text = r.text(len);
  if (r.pos() != r.size())
    fail(Errc::trailing_bytes,
         std::to_string(r.size() - r.pos()) + " unexpected bytes after trailer");
  auto meta = nlohmann::json::parse(text, nullptr, false);
  require(!meta.is_discarded() && meta.is_object(), Errc::bad_trailer,
          "trailer is not a JSON object");
  return meta;
}

inline void write_frame_values(ByteWriter& w, const Frame& f) {
  for (double v : f.values()) w.f32(v);
}

inline Frame read_frame(ByteReader& r, std::size_t m, std::size_t d, FrameKind kind) {
  std::vector<double> values(m * d);
  for (auto& v : values) v = r.f32();
  return Frame(m, d, std::move(values), kind);
}

inline std::vector<std::uint8_t> slurp(std::istream& in) {
  std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                 std::istreambuf_iterator<char>()};
  require(!in.bad(), Errc::io, "failed reading input stream");
  return data;
}

inline std::size_t emit(std::ostream& out, std::span<const std::uint8_t> bytes) {
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(bool(out), Errc::io, "failed writing output stream");
  return bytes.size();
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), Errc::io, "cannot open " + path.string());
  return slurp(in);
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), Errc::io, "cannot create " + path.string());
  emit(out, bytes);
}

}  // namespace detail

// ---------------------------------------------------------------- SMG1

inline std::vector<std::uint8_t> encode_sequence(const Sequence& seq) {
  detail::ByteWriter w;
  detail::write_header(w, "SMG1", seq.kind());
  detail::check_u32(seq.size(), "frame count");
  detail::check_u32(seq.scanlines(), "scanline count");
  detail::check_u32(seq.depth(), "depth");
  w.u32(static_cast<std::uint32_t>(seq.size()));
  w.u32(static_cast<std::uint32_t>(seq.scanlines()));
  w.u32(static_cast<std::uint32_t>(seq.depth()));
  w.f32(seq.frame_rate());
  for (const auto& f : seq.frames()) detail::write_frame_values(w, f);

  nlohmann::json meta = nlohmann::json::object();
  meta["subject"] = seq.meta().subject;
  meta["trial"] = seq.meta().trial;
  meta["motions"] = seq.meta().motions;
  meta["kind"] = std::string(to_string(seq.kind()));  // lets readers catch a flipped kind byte
  if (seq.meta().metronome_period_s) meta["metronome_period_s"] = *seq.meta().metronome_period_s;
  detail::write_trailer(w, meta);
  return w.take();
}

inline Sequence decode_sequence(std::span<const std::uint8_t> data) {
  detail::ByteReader r(data);
  const FrameKind kind = detail::read_header(r, "SMG1");
  const std::uint64_t n_frames = r.u32(), m = r.u32(), d = r.u32();
  const double rate = r.f32();
  require(n_frames >= 2 && m >= 1 && d >= 2, Errc::invalid_argument,
          "invalid dimensions " + std::to_string(n_frames) + "x" + std::to_string(m) + "x" +
              std::to_string(d));
  r.need(detail::header_size + n_frames * m * d * 4);

  std::vector<Frame> frames;
  frames.reserve(n_frames);
  for (std::uint64_t t = 0; t < n_frames; ++t) frames.push_back(detail::read_frame(r, m, d, kind));

  const auto meta_json = detail::read_trailer(r);
  SequenceMeta meta;
  try {
    if (meta_json.contains("kind") && meta_json.at("kind").get<std::string>() != to_string(kind))
      fail(Errc::bad_kind, "header kind " + std::string(to_string(kind)) +
                               " disagrees with trailer kind " +
                               meta_json.at("kind").get<std::string>());
    meta.subject = meta_json.value("subject", "");
    meta.trial = meta_json.value("trial", "");
    meta.motions = meta_json.value("motions", std::vector<std::string>{});
    if (meta_json.contains("metronome_period_s"))
      meta.metronome_period_s = meta_json.at("metronome_period_s").get<double>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_trailer, std::string("malformed sequence metadata: ") + e.what());
  }
  return Sequence(std::move(frames), rate, std::move(meta));
}

inline std::size_t write_sequence(const Sequence& seq, std::ostream& out) {
  return detail::emit(out, encode_sequence(seq));
}

inline Sequence read_sequence(std::istream& in) { return decode_sequence(detail::slurp(in)); }

inline void save_sequence(const Sequence& seq, const std::filesystem::path& path) {
  detail::write_file(path, encode_sequence(seq));
}

inline Sequence load_sequence(const std::filesystem::path& path) {
  return decode_sequence(detail::read_file(path));
}

// ---------------------------------------------------------------- SMGD

inline std::vector<std::uint8_t> encode_dataset(const EndStateDataset& ds) {
  detail::ByteWriter w;
  detail::write_header(w, "SMGD", FrameKind::bmode);
  for (std::size_t v : {ds.classes(), ds.trials(), ds.scanlines(), ds.depth()}) {
    detail::check_u32(v, "dataset dimension");
    w.u32(static_cast<std::uint32_t>(v));
  }
  for (const auto& f : ds.frames()) detail::write_frame_values(w, f);
  detail::write_trailer(w, nlohmann::json{{"labels", ds.labels()}});
  return w.take();
}

inline EndStateDataset decode_dataset(std::span<const std::uint8_t> data) {
  detail::ByteReader r(data);
  const FrameKind kind = detail::read_header(r, "SMGD");
  require(kind == FrameKind::bmode, Errc::bad_kind, "dataset frames must be B-mode");
  const std::uint64_t n = r.u32(), k = r.u32(), m = r.u32(), d = r.u32();
  require(n >= 2 && k >= 1 && m >= 1 && d >= 2, Errc::invalid_argument,
          "invalid dataset dimensions n=" + std::to_string(n) + " k=" + std::to_string(k) +
              " m=" + std::to_string(m) + " d=" + std::to_string(d));
  r.need(detail::header_size + n * k * m * d * 4);

  std::vector<Frame> frames;
  frames.reserve(n * k);
  for (std::uint64_t s = 0; s < n * k; ++s) frames.push_back(detail::read_frame(r, m, d, kind));

  const auto meta = detail::read_trailer(r);
  std::vector<std::string> labels;
  try {
    labels = meta.at("labels").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::bad_trailer, std::string("dataset trailer lacks a labels array: ") + e.what());
  }
  require(labels.size() == n, Errc::dimension_mismatch,
          "label count " + std::to_string(labels.size()) + " does not match n=" +
              std::to_string(n));
  return EndStateDataset(std::move(labels), k, std::move(frames));
}

inline std::size_t write_dataset(const EndStateDataset& ds, std::ostream& out) {
  return detail::emit(out, encode_dataset(ds));
}

inline EndStateDataset read_dataset(std::istream& in) { return decode_dataset(detail::slurp(in)); }

inline void save_dataset(const EndStateDataset& ds, const std::filesystem::path& path) {
  detail::write_file(path, encode_dataset(ds));
}

inline EndStateDataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(detail::read_file(path));
}

// ---------------------------------------------------------------- score CSV

/// Nine significant digits, trailing zeros kept ("1.00000000").
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%#.9g", v);
  return buf;
}

/// Renders `averaged` as CSV. A nonempty `aggregate` (length m) adds a final
/// `aggregate` row.
inline std::string format_scores(const ScoreMatrix& scores,
                                 std::span<const double> aggregate = {}) {
  require(aggregate.empty() || aggregate.size() == scores.scanlines(),
          Errc::dimension_mismatch, "aggregate row length differs from scanline count");
  for (double v : aggregate)
    require(std::isfinite(v), Errc::non_finite, "aggregate row contains a non-finite value");

  std::string out = "class";
  for (std::size_t j = 0; j < scores.scanlines(); ++j) out += ",s" + std::to_string(j);
  out += '\n';
  auto row = [&](std::string_view label, std::span<const double> values) {
    require(label.find_first_of(",\"\n\r") == std::string_view::npos,
            Errc::invalid_argument, "class label '" + std::string(label) +
                                        "' cannot be written to CSV");
    out += label;
    for (double v : values) out += "," + format_real(v);
    out += '\n';
  };
  for (std::size_t i = 0; i < scores.classes(); ++i)
    row(scores.labels()[i], scores.averaged_row(i));
  if (!aggregate.empty()) row("aggregate", aggregate);
  return out;
}

inline std::string write_scores(const ScoreMatrix& scores, std::ostream& out,
                                std::span<const double> aggregate = {}) {
  auto text = format_scores(scores, aggregate);
  out << text;
  require(bool(out), Errc::io, "failed writing score CSV");
  return text;
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    cells.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline double parse_real(std::string_view cell) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  require(ec == std::errc() && ptr == end, Errc::format,
          "not a number: '" + std::string(cell) + "'");
  return v;
}

}  // namespace detail

/// Parses score CSV back into a matrix without per-trial slices. An
/// `aggregate` row, if present, must be last and is not retained.
inline ScoreMatrix parse_scores(std::string_view text, ScoreMethod method) {
  std::vector<std::string_view> lines;
  for (auto line : detail::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
  }
  require(!lines.empty(), Errc::format, "empty score CSV");

  const auto header = detail::split(lines[0], ',');
  require(header.size() >= 2 && header[0] == "class", Errc::format,
          "score CSV header must start with 'class'");
  const std::size_t m = header.size() - 1;
  for (std::size_t j = 0; j < m; ++j)
    require(header[j + 1] == "s" + std::to_string(j), Errc::format,
            "unexpected header column '" + std::string(header[j + 1]) + "'");

  std::vector<std::string> labels;
  std::vector<double> averaged;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = detail::split(lines[r], ',');
    require(cells.size() == m + 1, Errc::format,
            "row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                " cells, expected " + std::to_string(m + 1));
    if (cells[0] == "aggregate") {
      require(r + 1 == lines.size(), Errc::format, "aggregate row must be last");
      break;
    }
    labels.emplace_back(cells[0]);
    for (std::size_t j = 1; j <= m; ++j) averaged.push_back(detail::parse_real(cells[j]));
  }
  require(!labels.empty(), Errc::format, "score CSV has no class rows");
  return ScoreMatrix(method, std::move(labels), m, 0, {}, std::move(averaged));
}

inline ScoreMatrix read_scores(std::istream& in, ScoreMethod method) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scores(buf.str(), method);
}

}  // namespace smg
