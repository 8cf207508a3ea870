#pragma once

// Seeded phantom: a layered speckle texture whose scanlines inside each
// class's active regions shift in depth and brighten while that motion is
// performed. Each trial is rest, then every class in turn ramps to its end
// state and back. Ground truth (end-state frames, active scanlines) is
// returned alongside the sequences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "smg/error.hpp"
#include "smg/seqio.hpp"

namespace smg {

struct ActiveRegion {
  std::size_t first;      // first scanline
  std::size_t last;       // one past the last scanline
  double displacement;    // depth shift at full activation, in samples
  double brightness;      // relative gain at full activation
};

struct PhantomConfig {
  std::size_t n_classes = 5;
  std::size_t trials_per_class = 5;
  std::size_t scanlines = 128;
  std::size_t depth = 128;
  std::size_t frames_per_motion = 12;  // ramp length, rest -> end state
  std::size_t rest_frames = 10;
  std::size_t rest_jitter = 4;         // extra rest frames drawn per motion, [0, jitter]
  double frame_rate = 50.0;
  std::vector<std::string> labels;
  std::vector<std::vector<ActiveRegion>> active_regions;  // per class
  double additive_noise_sigma = 0.0;
  double speckle_sigma = 0.0;
  std::uint64_t seed = 0;
  bool emit_rf = false;

  void validate() const {
    require(n_classes >= 1 && trials_per_class >= 1, Errc::invalid_argument,
            "phantom needs at least one class and one trial");
    require(scanlines >= 1 && depth >= 2, Errc::invalid_argument, "bad phantom frame shape");
    require(frames_per_motion >= 3, Errc::invalid_argument, "frames_per_motion must be >= 3");
    require(std::isfinite(frame_rate) && frame_rate > 0, Errc::invalid_argument,
            "frame rate must be positive");
    require(labels.size() == n_classes, Errc::invalid_argument,
            "phantom needs one label per class");
    require(active_regions.size() == n_classes, Errc::invalid_argument,
            "phantom needs active regions for every class");
    for (const auto& regions : active_regions)
      for (const auto& r : regions)
        require(r.first < r.last && r.last <= scanlines && r.displacement >= 0 &&
                    r.brightness >= 0,
                Errc::invalid_argument, "invalid active region");
    require(additive_noise_sigma >= 0 && speckle_sigma >= 0, Errc::invalid_argument,
            "noise sigmas must be nonnegative");
  }

  /// Nominal time between consecutive end states.
  double metronome_period_s() const {
    return (2.0 * double(frames_per_motion) + double(rest_frames) + double(rest_jitter) / 2.0) /
           frame_rate;
  }
};

struct PhantomTruth {
  std::vector<std::vector<std::size_t>> end_state_indices;  // [trial][motion]
  std::vector<std::vector<std::size_t>> active_scanlines;   // [class], sorted
  std::vector<Frame> noiseless_end_states;                  // [class]
};

struct Phantom {
  std::vector<Sequence> trials;     // B-mode
  std::vector<Sequence> rf_trials;  // filled when emit_rf
  PhantomTruth truth;
};

enum class PhantomProfile { easy, noisy };

inline constexpr std::uint64_t easy_seed = 1729;
inline constexpr std::uint64_t noisy_seed = 31337;

/// Five classes, five trials, 128 x 128 frames, one deforming region per
/// class. EASY uses disjoint 8-scanline regions; NOISY widens them to 20 so
/// neighbours overlap, and raises noise. The 4 evenly spaced scanlines hit
/// four of the five EASY regions.
inline PhantomConfig default_config(PhantomProfile profile) {
  PhantomConfig cfg;
  cfg.labels = {"power_grasp", "pinch_grip", "index_point", "key_grip", "wrist_pronation"};
  const std::size_t centres[5] = {16, 48, 80, 112, 96};
  const bool easy = profile == PhantomProfile::easy;
  const std::size_t half = easy ? 4 : 10;
  cfg.active_regions.resize(5);
  for (std::size_t c = 0; c < 5; ++c)
    cfg.active_regions[c].push_back({centres[c] - half, centres[c] + half, 4.5, 0.25});
  cfg.additive_noise_sigma = easy ? 0.01 : 0.05;
  cfg.speckle_sigma = easy ? 0.05 : 0.2;
  cfg.seed = easy ? easy_seed : noisy_seed;
  return cfg;
}

namespace detail {

/// Independent normal stream for one (seed, trial, frame) key.
class KeyedNormal {
 public:
  KeyedNormal(std::uint64_t seed, std::uint64_t trial, std::uint64_t frame) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(trial),
                      std::uint32_t(trial >> 32), std::uint32_t(frame),
                      std::uint32_t(frame >> 32)};
    engine_.seed(seq);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Box-Muller; written out because std::normal_distribution differs
  /// between standard libraries.
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline constexpr std::uint64_t texture_key = ~std::uint64_t(0);
inline constexpr std::uint64_t timing_key = ~std::uint64_t(0) - 1;

inline std::vector<double> base_texture(const PhantomConfig& cfg) {
  const std::size_t m = cfg.scanlines, d = cfg.depth;
  KeyedNormal rng(cfg.seed, texture_key, 0);
  std::vector<double> white(m * d);
  for (auto& v : white) v = rng();

  // Correlated speckle: [1 2 3 2 1] along depth, [1 2 1] across scanlines.
  std::vector<double> along(m * d, 0.0), grain(m * d, 0.0);
  const double kd[5] = {1, 2, 3, 2, 1};
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t z = 0; z < d; ++z) {
      double s = 0, w = 0;
      for (int o = -2; o <= 2; ++o) {
        const auto zz = std::ptrdiff_t(z) + o;
        if (zz < 0 || zz >= std::ptrdiff_t(d)) continue;
        s += kd[o + 2] * white[j * d + std::size_t(zz)];
        w += kd[o + 2];
      }
      along[j * d + z] = s / w;
    }
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t z = 0; z < d; ++z) {
      double s = 2 * along[j * d + z], w = 2;
      if (j > 0) s += along[(j - 1) * d + z], w += 1;
      if (j + 1 < m) s += along[(j + 1) * d + z], w += 1;
      grain[j * d + z] = s / w;
    }
  double mu = 0, var = 0;
  for (double v : grain) mu += v;
  mu /= double(grain.size());
  for (double v : grain) var += (v - mu) * (v - mu);
  const double sd = std::sqrt(var / double(grain.size()));

  // Bright fascia layers, gently curved across the field of view.
  const double layer_depth[4] = {0.2, 0.45, 0.7, 0.9};
  std::vector<double> base(m * d);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t z = 0; z < d; ++z) {
      double layers = 0;
      for (int k = 0; k < 4; ++k) {
        const double centre = layer_depth[k] * double(d) +
                              0.03 * double(d) * std::sin(2 * std::numbers::pi * double(j) / double(m) + k);
        const double dz = (double(z) - centre) / 2.0;
        layers += std::exp(-0.5 * dz * dz);
      }
      const double t = sd > 0 ? (grain[j * d + z] - mu) / sd : 0.0;
      base[j * d + z] = std::clamp(0.25 + 0.04 * t + 0.25 * layers, 0.02, 0.6);
    }
  return base;
}

/// Base texture with every region of `regions` deformed to activation `a`.
inline std::vector<double> deformed(const PhantomConfig& cfg, const std::vector<double>& base,
                                    const std::vector<ActiveRegion>& regions, double a) {
  std::vector<double> out = base;
  if (a <= 0.0) return out;
  const std::size_t d = cfg.depth;
  for (const auto& r : regions)
    for (std::size_t j = r.first; j < r.last; ++j) {
      // Deformation peaks at the region centre, like a muscle belly.
      const double width = double(r.last - r.first);
      const double centre = double((r.first + r.last) / 2);
      const double cz = std::cos(std::numbers::pi * (double(j) - centre) / (width + 1));
      const double profile = cz * cz;
      const double gain = 1.0 + a * profile * r.brightness;
      const double shift = a * profile * r.displacement;
      for (std::size_t z = 0; z < d; ++z) {
        const double src = std::clamp(double(z) - shift, 0.0, double(d - 1));
        const auto lo = static_cast<std::size_t>(std::floor(src));
        const std::size_t hi = std::min(lo + 1, d - 1);
        const double w = src - double(lo);
        out[j * d + z] = gain * ((1 - w) * base[j * d + lo] + w * base[j * d + hi]);
      }
    }
  return out;
}

/// Speckle and additive noise, floor at zero, rescale if above one, then
/// round to float32 so in-memory and on-disk phantoms agree.
inline Frame noisy_frame(const PhantomConfig& cfg, std::vector<double> clean, std::uint64_t trial,
                         std::uint64_t frame) {
  if (cfg.speckle_sigma > 0 || cfg.additive_noise_sigma > 0) {
    KeyedNormal rng(cfg.seed, trial, frame);
    const double s = cfg.speckle_sigma;
    for (auto& v : clean) {
      const double g1 = rng(), g2 = rng();
      v = std::max(0.0, v * std::exp(s * g1 - 0.5 * s * s) + cfg.additive_noise_sigma * g2);
    }
  }
  const double peak = *std::max_element(clean.begin(), clean.end());
  if (peak > 1.0)
    for (auto& v : clean) v /= peak;
  for (auto& v : clean) v = double(float(v));
  return Frame(cfg.scanlines, cfg.depth, std::move(clean), FrameKind::bmode);
}

}  // namespace detail

/// RF stand-in for a B-mode sequence: envelope b^2 on a carrier of four
/// samples per cycle, phase varying by scanline.
inline Sequence to_rf(const Sequence& bmode) {
  std::vector<Frame> frames;
  for (const auto& f : bmode.frames()) {
    std::vector<double> rf(f.values().size());
    for (std::size_t j = 0; j < f.scanlines(); ++j)
      for (std::size_t z = 0; z < f.depth(); ++z) {
        const double b = f.at(j, z);
        const double phase = 0.37 * double(j);
        rf[j * f.depth() + z] =
            double(float(b * b * std::cos(std::numbers::pi / 2 * double(z) + phase)));
      }
    frames.emplace_back(f.scanlines(), f.depth(), std::move(rf), FrameKind::rf);
  }
  return Sequence(std::move(frames), bmode.frame_rate(), bmode.meta());
}

inline Phantom generate(const PhantomConfig& cfg) {
  cfg.validate();
  const auto base = detail::base_texture(cfg);
  const std::size_t ramp = cfg.frames_per_motion;

  Phantom out;
  for (std::size_t c = 0; c < cfg.n_classes; ++c) {
    std::vector<std::size_t> lines;
    for (const auto& r : cfg.active_regions[c])
      for (std::size_t j = r.first; j < r.last; ++j) lines.push_back(j);
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    out.truth.active_scanlines.push_back(std::move(lines));
    out.truth.noiseless_end_states.emplace_back(
        cfg.scanlines, cfg.depth, detail::deformed(cfg, base, cfg.active_regions[c], 1.0),
        FrameKind::bmode);
  }

  for (std::size_t trial = 0; trial < cfg.trials_per_class; ++trial) {
    // Activation schedule: (class, activation) per frame.
    detail::KeyedNormal timing(cfg.seed, detail::timing_key, trial);
    std::vector<std::pair<std::size_t, double>> schedule;
    std::vector<std::size_t> peaks;
    for (std::size_t c = 0; c < cfg.n_classes; ++c) {
      const auto jitter = static_cast<std::size_t>(timing.uniform() * double(cfg.rest_jitter + 1));
      for (std::size_t r = 0; r < cfg.rest_frames + jitter; ++r) schedule.push_back({c, 0.0});
      for (std::size_t u = 1; u <= ramp; ++u)
        schedule.push_back({c, 0.5 * (1 - std::cos(std::numbers::pi * double(u) / double(ramp)))});
      peaks.push_back(schedule.size() - 1);
      for (std::size_t v = 1; v <= ramp; ++v)
        schedule.push_back({c, 0.5 * (1 + std::cos(std::numbers::pi * double(v) / double(ramp)))});
    }
    for (std::size_t r = 0; r < cfg.rest_frames; ++r) schedule.push_back({0, 0.0});

    std::vector<Frame> frames;
    frames.reserve(schedule.size());
    for (std::size_t t = 0; t < schedule.size(); ++t) {
      const auto [cls, a] = schedule[t];
      frames.push_back(detail::noisy_frame(
          cfg, detail::deformed(cfg, base, cfg.active_regions[cls], a), trial, t));
    }
    SequenceMeta meta;
    meta.subject = "phantom";
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03zu", trial);
    meta.trial = name;
    meta.metronome_period_s = cfg.metronome_period_s();
    meta.motions = cfg.labels;
    out.trials.emplace_back(std::move(frames), cfg.frame_rate, std::move(meta));
    out.truth.end_state_indices.push_back(std::move(peaks));
    if (cfg.emit_rf) out.rf_trials.push_back(to_rf(out.trials.back()));
  }
  return out;
}

inline nlohmann::json config_to_json(const PhantomConfig& cfg) {
  nlohmann::json regions = nlohmann::json::array();
  for (const auto& cls : cfg.active_regions) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& r : cls)
      list.push_back({{"first", r.first}, {"last", r.last}, {"displacement", r.displacement},
                      {"brightness", r.brightness}});
    regions.push_back(list);
  }
  return {{"n_classes", cfg.n_classes},
          {"trials_per_class", cfg.trials_per_class},
          {"scanlines", cfg.scanlines},
          {"depth", cfg.depth},
          {"frames_per_motion", cfg.frames_per_motion},
          {"rest_frames", cfg.rest_frames},
          {"rest_jitter", cfg.rest_jitter},
          {"frame_rate", cfg.frame_rate},
          {"labels", cfg.labels},
          {"active_regions", regions},
          {"additive_noise_sigma", cfg.additive_noise_sigma},
          {"speckle_sigma", cfg.speckle_sigma},
          {"seed", cfg.seed},
          {"emit_rf", cfg.emit_rf}};
}

inline std::string truth_to_json(const PhantomConfig& cfg, const PhantomTruth& truth) {
  nlohmann::json j;
  j["end_state_indices"] = truth.end_state_indices;
  j["active_scanlines"] = truth.active_scanlines;
  j["active_regions"] = config_to_json(cfg)["active_regions"];
  j["seed"] = cfg.seed;
  j["config"] = config_to_json(cfg);
  return j.dump(2) + "\n";
}

}  // namespace smg
