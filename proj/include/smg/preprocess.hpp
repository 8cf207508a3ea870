#pragma once

// RF -> B-mode: envelope of the analytic signal per scanline, square-root
// dynamic-range compression, max normalization.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "smg/error.hpp"
#include "smg/fft.hpp"
#include "smg/seqio.hpp"

namespace smg {

enum class NormalizationScope { per_frame, per_sequence };

struct PreprocessConfig {
  NormalizationScope normalization_scope = NormalizationScope::per_frame;
};

/// |x + i H{x}| with the Hilbert transform built in the frequency domain:
/// positive frequencies doubled, negative ones zeroed, DC and Nyquist kept.
inline std::vector<double> analytic_envelope(std::span<const double> scanline) {
  const std::size_t d = scanline.size();
  require(d >= 2, Errc::invalid_argument, "scanline needs at least two samples");
  std::vector<fft::cplx> spectrum(d);
  for (std::size_t i = 0; i < d; ++i) {
    require(std::isfinite(scanline[i]), Errc::non_finite, "scanline contains a non-finite value");
    spectrum[i] = scanline[i];
  }
  fft::forward(spectrum);

  const std::size_t half = d / 2;
  const bool even = d % 2 == 0;
  for (std::size_t k = 1; k < d; ++k) {
    if (k < half || (!even && k == half)) spectrum[k] *= 2.0;
    else if (even && k == half) continue;
    else spectrum[k] = 0.0;
  }
  fft::inverse(spectrum);

  std::vector<double> envelope(d);
  for (std::size_t i = 0; i < d; ++i) envelope[i] = std::abs(spectrum[i]);
  return envelope;
}

namespace detail {

inline double compressed_max(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) {
    if (!(v >= 0.0)) fail(Errc::out_of_range, "cannot compress negative value " + std::to_string(v));
    peak = std::max(peak, std::sqrt(v));
  }
  return peak;
}

inline Frame compress_with(const Frame& frame, double peak) {
  std::vector<double> out(frame.values().size());
  std::transform(frame.values().begin(), frame.values().end(), out.begin(),
                 [peak](double v) { return peak > 0.0 ? std::sqrt(v) / peak : 0.0; });
  return Frame(frame.scanlines(), frame.depth(), std::move(out), FrameKind::bmode);
}

inline Frame envelope_frame(const Frame& rf) {
  std::vector<double> env;
  env.reserve(rf.values().size());
  for (std::size_t j = 0; j < rf.scanlines(); ++j) {
    const auto e = analytic_envelope(rf.scanline(j));
    env.insert(env.end(), e.begin(), e.end());
  }
  return Frame(rf.scanlines(), rf.depth(), std::move(env), FrameKind::rf);
}

}  // namespace detail

/// sqrt then divide by the maximum over the frame. An all-zero frame stays
/// all-zero. With PER_SEQUENCE scope a single frame is its own sequence.
inline Frame compress_normalize(const Frame& envelope, const PreprocessConfig& = {}) {
  return detail::compress_with(envelope, detail::compressed_max(envelope.values()));
}

inline Sequence preprocess_sequence(const Sequence& seq, const PreprocessConfig& cfg = {}) {
  require(seq.kind() == FrameKind::rf, Errc::wrong_kind,
          "sequence is already B-mode");
  std::vector<Frame> envelopes;
  envelopes.reserve(seq.size());
  for (const auto& f : seq.frames()) envelopes.push_back(detail::envelope_frame(f));

  std::vector<Frame> out;
  out.reserve(seq.size());
  if (cfg.normalization_scope == NormalizationScope::per_frame) {
    for (const auto& e : envelopes) out.push_back(compress_normalize(e, cfg));
  } else {
    double peak = 0.0;
    for (const auto& e : envelopes) peak = std::max(peak, detail::compressed_max(e.values()));
    for (const auto& e : envelopes) out.push_back(detail::compress_with(e, peak));
  }
  return Sequence(std::move(out), seq.frame_rate(), seq.meta());
}

}  // namespace smg
