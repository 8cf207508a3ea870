// seqio, preprocess, endstate.

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "smg/endstate.hpp"
#include "smg/preprocess.hpp"
#include "smg/seqio.hpp"

using namespace smg;

namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an smg::Error";
  return Errc::invalid_argument;
}

Frame bmode(std::size_t m, std::size_t d, std::vector<double> v) {
  return Frame(m, d, std::move(v), FrameKind::bmode);
}

Frame random_frame(std::mt19937_64& rng, std::size_t m, std::size_t d, FrameKind kind) {
  std::uniform_real_distribution<double> u(0.0, 1.0), s(-3.0, 3.0);
  std::vector<double> v(m * d);
  // float-representable so the codec round trip is the identity
  for (auto& x : v) x = double(float(kind == FrameKind::bmode ? u(rng) : s(rng)));
  return Frame(m, d, std::move(v), kind);
}

Sequence random_sequence(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> nf(2, 6), ms(1, 9), ds(2, 17);
  const auto n = nf(rng), m = ms(rng), d = ds(rng);
  const auto kind = rng() % 2 ? FrameKind::bmode : FrameKind::rf;
  std::vector<Frame> frames;
  for (std::size_t t = 0; t < n; ++t) frames.push_back(random_frame(rng, m, d, kind));
  SequenceMeta meta{"s" + std::to_string(rng() % 100), "t" + std::to_string(rng() % 100), {}, {}};
  if (rng() % 2) meta.metronome_period_s = double(float(0.5 + double(rng() % 100) / 50));
  for (std::size_t i = 0; i < rng() % 4; ++i) meta.motions.push_back("m" + std::to_string(i));
  return Sequence(std::move(frames), double(float(10 + rng() % 90)), meta);
}

std::vector<std::uint8_t> bytes_of(const Sequence& s) { return encode_sequence(s); }

}  // namespace

// ------------------------------------------------------------------ seqio

TEST(Frame, RejectsBadShapesAndValues) {
  EXPECT_EQ(code_of([] { Frame(0, 2, {}, FrameKind::rf); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { Frame(1, 1, {0.0}, FrameKind::rf); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { Frame(2, 2, {0, 0, 0}, FrameKind::rf); }), Errc::dimension_mismatch);
  EXPECT_EQ(code_of([] { Frame(1, 2, {0, NAN}, FrameKind::rf); }), Errc::non_finite);
  EXPECT_EQ(code_of([] { bmode(1, 2, {0, 1.5}); }), Errc::out_of_range);
  EXPECT_NO_THROW(Frame(1, 2, {-4, 7}, FrameKind::rf));
}

TEST(Frame, ScanlineIsDepthContiguous) {
  const auto f = bmode(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  EXPECT_EQ(f.scanline(1)[0], 0.4);
  EXPECT_EQ(f.at(1, 2), 0.6);
  EXPECT_EQ(code_of([&] { f.scanline(2); }), Errc::out_of_range);
}

TEST(Sequence, Invariants) {
  const auto a = bmode(1, 2, {0, 1}), b = bmode(2, 2, {0, 1, 0, 1});
  EXPECT_EQ(code_of([&] { Sequence({a}, 50); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { Sequence({a, b}, 50); }), Errc::dimension_mismatch);
  EXPECT_EQ(code_of([&] { Sequence({a, a}, 0); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { Sequence({a, Frame(1, 2, {0, 1}, FrameKind::rf)}, 50); }),
            Errc::wrong_kind);
}

TEST(Smg1, TwoFrameFourByFourLayout) {
  std::vector<Frame> frames;
  for (int t = 0; t < 2; ++t) {
    std::vector<double> v(16);
    for (int i = 0; i < 16; ++i) v[i] = (t * 16 + i) / 32.0;
    frames.push_back(bmode(4, 4, v));
  }
  const Sequence seq(frames, 50.0);
  std::ostringstream out;
  const auto n = write_sequence(seq, out);
  const auto s = out.str();
  ASSERT_EQ(n, s.size());

  // header + payload is 24 + 2*4*4*4 = 152 bytes; trailer length and JSON follow
  std::uint32_t trailer_len;
  std::memcpy(&trailer_len, s.data() + 152, 4);
  EXPECT_EQ(s.size(), 152u + 4u + trailer_len);
  EXPECT_EQ(s.substr(0, 4), "SMG1");
  EXPECT_EQ(s[4], 1);
  EXPECT_EQ(s[5], 1);
  EXPECT_EQ(s[6], 0);
  EXPECT_EQ(s[7], 0);
  std::uint32_t dims[3];
  std::memcpy(dims, s.data() + 8, 12);
  EXPECT_EQ(dims[0], 2u);
  EXPECT_EQ(dims[1], 4u);
  EXPECT_EQ(dims[2], 4u);
  float rate, first, last;
  std::memcpy(&rate, s.data() + 20, 4);
  std::memcpy(&first, s.data() + 24, 4);
  std::memcpy(&last, s.data() + 148, 4);
  EXPECT_EQ(rate, 50.0f);
  EXPECT_EQ(first, 0.0f);
  EXPECT_EQ(last, 31.0f / 32.0f);
  EXPECT_EQ(s[156], '{');

  std::istringstream in(s);
  EXPECT_EQ(read_sequence(in), seq);
}

TEST(Smg1, RoundTripProperty) {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 250; ++c) {
    const auto seq = random_sequence(rng);
    const auto a = bytes_of(seq), b = bytes_of(seq);
    ASSERT_EQ(a, b);
    const auto back = decode_sequence(a);
    ASSERT_EQ(back, seq) << "case " << c;
    for (std::size_t t = 0; t < seq.size(); ++t)
      ASSERT_EQ(std::memcmp(back.frame(t).values().data(), seq.frame(t).values().data(),
                            seq.frame(t).values().size() * sizeof(double)),
                0);
  }
}

TEST(Smg1, TruncationNamesByteCounts) {
  std::mt19937_64 rng(3);
  const auto bytes = bytes_of(random_sequence(rng));
  for (std::size_t cut : {std::size_t(0), std::size_t(10), std::size_t(30), bytes.size() - 1}) {
    try {
      decode_sequence(std::span(bytes).first(cut));
      FAIL() << "cut " << cut;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::truncated);
      EXPECT_NE(std::string(e.what()).find("got " + std::to_string(cut)), std::string::npos)
          << e.what();
    }
  }
}

TEST(Smg1, BadMagicAndTrailingBytes) {
  std::mt19937_64 rng(4);
  auto bytes = bytes_of(random_sequence(rng));
  auto bad = bytes;
  std::memcpy(bad.data(), "XXXX", 4);
  EXPECT_EQ(code_of([&] { decode_sequence(bad); }), Errc::bad_magic);
  bytes.push_back(0);
  EXPECT_EQ(code_of([&] { decode_sequence(bytes); }), Errc::trailing_bytes);
}

TEST(Smg1, NonFiniteAndOutOfRangePayloadRejected) {
  const Sequence seq({bmode(1, 2, {0, 1}), bmode(1, 2, {1, 0})}, 50);
  auto bytes = encode_sequence(seq);
  auto nan = bytes;
  const float q = NAN;
  std::memcpy(nan.data() + 24, &q, 4);
  EXPECT_EQ(code_of([&] { decode_sequence(nan); }), Errc::non_finite);
  const float big = 2.0f;
  std::memcpy(bytes.data() + 24, &big, 4);
  EXPECT_EQ(code_of([&] { decode_sequence(bytes); }), Errc::out_of_range);
}

TEST(Smg1, EveryHeaderByteCorruptionRejected) {
  std::mt19937_64 rng(5);
  for (int c = 0; c < 20; ++c) {
    const auto bytes = bytes_of(random_sequence(rng));
    for (std::size_t pos = 0; pos < 6; ++pos)
      for (int v = 0; v < 256; ++v) {
        if (v == bytes[pos]) continue;
        auto bad = bytes;
        bad[pos] = std::uint8_t(v);
        EXPECT_THROW(decode_sequence(bad), Error) << "byte " << pos << " = " << v;
      }
  }
}

TEST(Smgd, RoundTripAndLabels) {
  std::mt19937_64 rng(6);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + rng() % 4, k = 1 + rng() % 4, m = 1 + rng() % 6, d = 2 + rng() % 6;
    std::vector<Frame> frames;
    for (std::size_t f = 0; f < n * k; ++f) frames.push_back(random_frame(rng, m, d, FrameKind::bmode));
    const EndStateDataset ds(oracle::labels(n), k, frames);
    std::ostringstream out;
    write_dataset(ds, out);
    ASSERT_EQ(encode_dataset(ds), encode_dataset(ds));
    std::istringstream in(out.str());
    ASSERT_EQ(read_dataset(in), ds);
  }
}

TEST(Smgd, FullSizeRoundTrip) {
  std::mt19937_64 rng(7);
  std::vector<Frame> frames;
  for (int f = 0; f < 25; ++f) frames.push_back(random_frame(rng, 128, 128, FrameKind::bmode));
  const EndStateDataset ds(oracle::labels(5), 5, frames);
  EXPECT_EQ(decode_dataset(encode_dataset(ds)), ds);
}

TEST(Smgd, InvariantsAndCorruption) {
  const auto f = bmode(1, 2, {0, 1});
  EXPECT_EQ(code_of([&] { EndStateDataset({}, 1, {}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { EndStateDataset({"a"}, 1, {f}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { EndStateDataset({"a", "b", "c"}, 1, {f, f}); }),
            Errc::dimension_mismatch);

  const EndStateDataset ds({"a", "b"}, 1, {f, f});
  const auto bytes = encode_dataset(ds);
  // label table edited to one entry: count no longer matches n
  std::string text(bytes.begin(), bytes.end());
  const auto pos = text.find("[\"a\",\"b\"]");
  ASSERT_NE(pos, std::string::npos);
  const std::string edited = text.substr(0, pos) + "[\"ab\"]   " + text.substr(pos + 9);
  EXPECT_EQ(code_of([&] {
              decode_dataset(std::span(reinterpret_cast<const std::uint8_t*>(edited.data()),
                                       edited.size()));
            }),
            Errc::dimension_mismatch);

  for (std::size_t p = 0; p < 6; ++p)
    for (int v = 0; v < 256; ++v) {
      if (v == bytes[p]) continue;
      auto bad = bytes;
      bad[p] = std::uint8_t(v);
      EXPECT_THROW(decode_dataset(bad), Error);
    }
}

TEST(ScoreCsv, ShapeAndFormatting) {
  const ScoreMatrix sm(ScoreMethod::fc, {"a", "b"}, 3, 1, {8, 1, 2, 0, 0, 4},
                       {1, 0.125, 0.25, 0, 0, 1});
  const auto csv = format_scores(sm);
  EXPECT_EQ(csv,
            "class,s0,s1,s2\n"
            "a,1.00000000,0.125000000,0.250000000\n"
            "b,0.00000000,0.00000000,1.00000000\n");
  const auto back = parse_scores(csv, ScoreMethod::fc);
  EXPECT_EQ(back.trials(), 0u);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(back.averaged(i, j), sm.averaged(i, j));

  const std::vector<double> agg{1, 0.125, 1};
  const auto with_agg = format_scores(sm, agg);
  EXPECT_NE(with_agg.find("\naggregate,1.00000000,0.125000000,1.00000000\n"), std::string::npos);
  EXPECT_EQ(parse_scores(with_agg, ScoreMethod::fc), back);
}

TEST(ScoreCsv, RefusesNaN) {
  EXPECT_EQ(code_of([] { ScoreMatrix(ScoreMethod::fc, {"a"}, 1, 0, {}, {NAN}); }),
            Errc::non_finite);
  const ScoreMatrix sm(ScoreMethod::fc, {"a"}, 2, 0, {}, {1, 0});
  const std::vector<double> agg{NAN, 1};
  EXPECT_EQ(code_of([&] { format_scores(sm, agg); }), Errc::non_finite);
}

TEST(ScoreCsv, RoundTripRelativeError) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 1 + rng() % 4, m = 1 + rng() % 10;
    std::vector<double> avg(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) avg[i * m + j] = u(rng) * std::pow(10.0, -double(rng() % 6));
      avg[i * m + rng() % m] = 1.0;
    }
    const ScoreMatrix sm(ScoreMethod::mi, oracle::labels(n), m, 0, {}, avg);
    const auto back = parse_scores(format_scores(sm), ScoreMethod::mi);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        ASSERT_LE(std::abs(back.averaged(i, j) - sm.averaged(i, j)), 1e-8 * sm.averaged(i, j));
  }
}

TEST(ScoreCsv, MalformedInput) {
  EXPECT_EQ(code_of([] { parse_scores("", ScoreMethod::fc); }), Errc::format);
  EXPECT_EQ(code_of([] { parse_scores("klass,s0\na,1\n", ScoreMethod::fc); }), Errc::format);
  EXPECT_EQ(code_of([] { parse_scores("class,s0\na,1,2\n", ScoreMethod::fc); }), Errc::format);
  EXPECT_EQ(code_of([] { parse_scores("class,s0\na,x\n", ScoreMethod::fc); }), Errc::format);
  EXPECT_EQ(code_of([] { parse_scores("class,s0,s1\na,0.5,0.5\n", ScoreMethod::fc); }),
            Errc::out_of_range);
}

// ------------------------------------------------------------- preprocess

TEST(Envelope, ZeroAndConstant) {
  for (std::size_t d : {2u, 7u, 64u, 100u}) {
    const std::vector<double> zero(d, 0.0), c(d, -2.5);
    for (double v : analytic_envelope(zero)) EXPECT_EQ(v, 0.0);
    for (double v : analytic_envelope(c)) EXPECT_NEAR(v, 2.5, 1e-12);
  }
}

TEST(Envelope, CosineAtBinFrequency) {
  const double a = 1.7;
  std::vector<double> x(64);
  for (std::size_t t = 0; t < 64; ++t) x[t] = a * std::cos(2 * std::numbers::pi * 5 * double(t) / 64 + 0.3);
  const auto env = analytic_envelope(x);
  for (std::size_t t = 1; t + 1 < 64; ++t) EXPECT_LT(std::abs(env[t] - a), 1e-6 * a);
}

TEST(Envelope, MatchesDirectDftOracle) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int c = 0; c < 200; ++c) {
    const std::size_t d = 2 + rng() % 70;
    std::vector<double> x(d);
    for (auto& v : x) v = g(rng);
    const auto env = analytic_envelope(x);
    const auto ref = oracle::envelope(x);
    for (std::size_t i = 0; i < d; ++i) ASSERT_NEAR(env[i], ref[i], 1e-9) << "d=" << d;
  }
}

TEST(Envelope, SignFlipInvariantExactly) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  for (int c = 0; c < 200; ++c) {
    std::vector<double> x(2 + rng() % 90), y;
    for (auto& v : x) v = g(rng);
    for (double v : x) y.push_back(-v);
    ASSERT_EQ(analytic_envelope(x), analytic_envelope(y));
  }
}

TEST(Envelope, NonFiniteRejected) {
  const std::vector<double> x{0, INFINITY, 1};
  EXPECT_EQ(code_of([&] { analytic_envelope(x); }), Errc::non_finite);
}

TEST(CompressNormalize, Examples) {
  const auto out = compress_normalize(Frame(1, 3, {0, 1, 4}, FrameKind::rf));
  EXPECT_EQ(out.kind(), FrameKind::bmode);
  EXPECT_EQ(std::vector<double>(out.values().begin(), out.values().end()),
            (std::vector<double>{0, 0.5, 1.0}));
  const auto zero = compress_normalize(Frame(1, 2, {0, 0}, FrameKind::rf));
  EXPECT_EQ(zero.values()[0], 0.0);
  EXPECT_EQ(zero.values()[1], 0.0);
  const auto nine = compress_normalize(Frame(1, 2, {9, 9}, FrameKind::rf));
  EXPECT_EQ(nine.values()[0], 1.0);
  EXPECT_EQ(code_of([] { compress_normalize(Frame(1, 2, {1, -1}, FrameKind::rf)); }),
            Errc::out_of_range);
}

TEST(CompressNormalize, MonotoneWithUnitMax) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  for (int c = 0; c < 200; ++c) {
    const std::size_t m = 1 + rng() % 5, d = 2 + rng() % 9;
    std::vector<double> v(m * d);
    for (auto& x : v) x = u(rng);
    const auto out = compress_normalize(Frame(m, d, v, FrameKind::rf));
    double peak = 0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      peak = std::max(peak, out.values()[a]);
      for (std::size_t b = 0; b < v.size(); ++b)
        if (v[a] <= v[b]) ASSERT_LE(out.values()[a], out.values()[b]);
    }
    ASSERT_EQ(peak, 1.0);
  }
}

TEST(PreprocessSequence, RejectsBmodeAndMatchesOracle) {
  const Sequence b({bmode(1, 2, {0, 1}), bmode(1, 2, {1, 0})}, 50);
  try {
    preprocess_sequence(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::wrong_kind);
    EXPECT_NE(std::string(e.what()).find("already B-mode"), std::string::npos);
  }

  std::mt19937_64 rng(13);
  std::vector<Frame> frames;
  for (int t = 0; t < 3; ++t) frames.push_back(random_frame(rng, 4, 30, FrameKind::rf));
  const Sequence rf(frames, 40, SequenceMeta{"x", "y", 1.5, {"a"}});
  for (auto scope : {NormalizationScope::per_frame, NormalizationScope::per_sequence}) {
    const auto out = preprocess_sequence(rf, {scope});
    EXPECT_EQ(out.kind(), FrameKind::bmode);
    EXPECT_EQ(out.frame_rate(), 40);
    EXPECT_EQ(out.meta(), rf.meta());
    // oracle: envelope -> sqrt -> max-normalize, composed independently
    std::vector<std::vector<double>> comp;
    double seq_peak = 0;
    for (const auto& f : frames) {
      std::vector<double> c;
      for (std::size_t j = 0; j < 4; ++j)
        for (double e : oracle::envelope(oracle::scanline(f, j))) c.push_back(std::sqrt(e));
      comp.push_back(c);
      for (double v : c) seq_peak = std::max(seq_peak, v);
    }
    double global_max = 0;
    for (std::size_t t = 0; t < 3; ++t) {
      const double peak = scope == NormalizationScope::per_frame
                              ? *std::max_element(comp[t].begin(), comp[t].end())
                              : seq_peak;
      for (std::size_t i = 0; i < comp[t].size(); ++i) {
        ASSERT_NEAR(out.frame(t).values()[i], comp[t][i] / peak, 1e-9);
        global_max = std::max(global_max, out.frame(t).values()[i]);
      }
    }
    EXPECT_EQ(global_max, 1.0);
  }
}

// --------------------------------------------------------------- endstate

TEST(Pearson, Examples) {
  const auto a = bmode(1, 4, {0.1, 0.5, 0.2, 0.9});
  EXPECT_NEAR(pearson_cc(a, a), 1.0, 1e-15);
  std::vector<double> neg;
  for (double v : a.values()) neg.push_back(-v + 3);
  EXPECT_NEAR(pearson_cc(a, Frame(1, 4, neg, FrameKind::rf)), -1.0, 1e-15);
  EXPECT_EQ(code_of([&] { pearson_cc(bmode(1, 4, {0.3, 0.3, 0.3, 0.3}), a); }),
            Errc::undefined_correlation);
  EXPECT_EQ(code_of([&] { pearson_cc(a, bmode(2, 2, {0, 1, 0, 1})); }), Errc::dimension_mismatch);
}

TEST(Pearson, SymmetricBoundedAffineInvariant) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> alpha(0.1, 10), beta(-5, 5);
  for (int c = 0; c < 300; ++c) {
    std::vector<double> a(3 + rng() % 60), b(a.size());
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng) + 0.5 * a[&v - b.data()];
    const double r = pearson(a, b);
    ASSERT_EQ(r, pearson(b, a));
    ASSERT_GE(r, -1.0);
    ASSERT_LE(r, 1.0);
    ASSERT_NEAR(r, oracle::pearson(a, b), 1e-12);
    const double al = alpha(rng), be = beta(rng);
    std::vector<double> t;
    for (double v : a) t.push_back(al * v + be);
    ASSERT_NEAR(pearson(t, b), r, 1e-12);
    std::vector<double> tb;
    for (double v : b) tb.push_back(al * v + be);
    ASSERT_NEAR(pearson(a, tb), r, 1e-12);
  }
}

TEST(CcTrace, IdenticalFramesGiveOnes) {
  const auto f = bmode(2, 3, {0.1, 0.4, 0.2, 0.8, 0.5, 0.3});
  const auto tr = cc_trace(Sequence({f, f, f, f}, 50));
  ASSERT_EQ(tr.size(), 4u);
  for (double v : tr.values()) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(CcTrace, OrthogonalPatternDecreasesAndMatchesOracle) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0, 1);
  const std::size_t px = 24;
  std::vector<double> rest(px), pat(px);
  for (auto& v : rest) v = u(rng);
  for (auto& v : pat) v = u(rng) - 0.5;
  // remove the mean and the rest component from the pattern
  double mr = 0, mp = 0;
  for (std::size_t i = 0; i < px; ++i) mr += rest[i] / px, mp += pat[i] / px;
  double dot = 0, nn = 0;
  for (std::size_t i = 0; i < px; ++i) {
    pat[i] -= mp;
    dot += pat[i] * (rest[i] - mr);
    nn += (rest[i] - mr) * (rest[i] - mr);
  }
  for (std::size_t i = 0; i < px; ++i) pat[i] -= dot / nn * (rest[i] - mr);
  std::vector<Frame> frames;
  for (int t = 0; t < 12; ++t) {
    std::vector<double> v(px);
    for (std::size_t i = 0; i < px; ++i) v[i] = rest[i] + 0.05 * t * pat[i];
    frames.emplace_back(4, 6, v, FrameKind::rf);
  }
  const auto tr = cc_trace(Sequence(frames, 50));
  ASSERT_EQ(tr.size(), 12u);
  EXPECT_EQ(tr.values()[0], 1.0);
  for (std::size_t t = 1; t < 12; ++t) {
    EXPECT_LT(tr.values()[t], tr.values()[t - 1]);
    EXPECT_NEAR(tr.values()[t], oracle::pearson(std::vector<double>(frames[t].values().begin(),
                                                                     frames[t].values().end()),
                                                rest),
                1e-12);
  }
}

TEST(CcTrace, ConstantRestFrameRejected) {
  const auto c = bmode(1, 2, {0.5, 0.5}), f = bmode(1, 2, {0, 1});
  EXPECT_EQ(code_of([&] { cc_trace(Sequence({c, f}, 50)); }), Errc::undefined_correlation);
}

TEST(DetectEndstates, Examples) {
  const CorrelationTrace tr({1, .9, .2, .9, 1, .9, .3, .9, 1}, 50);
  EXPECT_EQ(detect_endstates(tr, {2, 1, 2, 0.1}), (std::vector<std::size_t>{2, 6}));
  const CorrelationTrace mono({1, .9, .8, .7, .6}, 50);
  try {
    detect_endstates(mono, {1, 1, 1, 0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_valleys);
    EXPECT_NE(std::string(e.what()).find("found 0"), std::string::npos);
  }
}

TEST(DetectEndstates, ParamsAndPreconditions) {
  const CorrelationTrace tr({1, .5, 1, .5, 1}, 50);
  EXPECT_EQ(code_of([&] { detect_endstates(tr, {1, 2, 1, 0.1}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { detect_endstates(tr, {0, 1, 1, 0.1}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { detect_endstates(tr, {1, 1, 0, 0.1}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { detect_endstates(tr, {1, 1, 1, 1.5}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([&] { detect_endstates(tr, {1, 5, 1, 0.1}); }), Errc::invalid_argument);
  EXPECT_EQ(code_of([] { detect_endstates(CorrelationTrace({.5, .5, .5}, 50), {1, 1, 1, 0}); }),
            Errc::invalid_argument);
  EXPECT_EQ(code_of([] { CorrelationTrace({1, 1.5}, 50); }), Errc::out_of_range);
}

TEST(DetectEndstates, MatchesExhaustiveOracleAndProperties) {
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> u(-1, 1);
  int compared = 0;
  for (int c = 0; c < 600; ++c) {
    const std::size_t len = 8 + rng() % 60;
    std::vector<double> v(len);
    for (auto& x : v) x = u(rng);
    const std::size_t n = 1 + rng() % 4, w = 2 * (rng() % 3) + 1, sep = 1 + rng() % 6;
    const double prom = double(rng() % 5) / 10;
    const ValleyParams p{n, w, sep, prom};
    const auto ref = oracle::valleys(v, n, w, sep, prom);
    std::vector<std::size_t> got;
    try {
      got = detect_endstates(CorrelationTrace(v, 50), p);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), Errc::insufficient_valleys);
      ASSERT_LT(ref.size(), n);
      continue;
    }
    ++compared;
    ASSERT_EQ(got, ref);
    ASSERT_EQ(got.size(), n);
    for (std::size_t i = 1; i < got.size(); ++i) {
      ASSERT_GT(got[i], got[i - 1]);
      ASSERT_GE(got[i] - got[i - 1], sep);
    }
    // a constant offset leaves the output unchanged
    std::vector<double> shifted;
    const double off = -0.5 * (1 + *std::max_element(v.begin(), v.end()));
    for (double x : v) shifted.push_back(x + off);
    if (*std::min_element(shifted.begin(), shifted.end()) >= -1)
      ASSERT_EQ(detect_endstates(CorrelationTrace(shifted, 50), p), got);
  }
  EXPECT_GT(compared, 200);
}

TEST(DefaultMinSeparation, MetronomeAndFallback) {
  EXPECT_EQ(default_min_separation(100, 50, 5, 1.0), 25u);
  EXPECT_EQ(default_min_separation(100, 50, 5, 0.61), 16u);
  EXPECT_EQ(default_min_separation(101, 50, 5, std::nullopt), 11u);
}

namespace {

// Trial with a dip to `depth` around each listed frame.
Sequence dipping_trial(const std::vector<std::size_t>& centres, std::size_t len,
                       std::vector<std::string> motions, const std::string& name) {
  std::vector<double> rest{0.1, 0.9, 0.3, 0.7, 0.5, 0.2}, pat{0.9, 0.1, 0.6, 0.2, 0.3, 0.8};
  std::vector<Frame> frames;
  for (std::size_t t = 0; t < len; ++t) {
    double a = 0;
    for (std::size_t c : centres) {
      const double dt = double(t) - double(c);
      a = std::max(a, std::exp(-dt * dt / 8));
    }
    std::vector<double> v;
    for (std::size_t i = 0; i < 6; ++i) v.push_back((1 - a) * rest[i] + a * pat[i]);
    frames.push_back(bmode(2, 3, v));
  }
  return Sequence(frames, 50, SequenceMeta{"s", name, std::nullopt, std::move(motions)});
}

}  // namespace

TEST(BuildDataset, ClassOrderFollowsFirstTrial) {
  const auto a = dipping_trial({10, 30, 50}, 60, {"x", "y", "z"}, "t0");
  const auto b = dipping_trial({12, 31, 49}, 60, {"z", "x", "y"}, "t1");
  std::vector<LabeledSequence> ls{{&a, a.meta().motions, "t0"}, {&b, b.meta().motions, "t1"}};
  std::vector<std::vector<std::size_t>> idx;
  const auto ds = build_dataset(ls, ValleyParams{.min_separation = 0}, &idx);
  EXPECT_EQ(ds.labels(), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(ds.classes(), 3u);
  EXPECT_EQ(ds.trials(), 2u);
  EXPECT_EQ(idx[0], (std::vector<std::size_t>{10, 30, 50}));
  EXPECT_EQ(idx[1], (std::vector<std::size_t>{12, 31, 49}));
  // b performs z first, so class z trial 1 is b's frame 12
  EXPECT_EQ(ds.frame(2, 1), b.frame(12));
  EXPECT_EQ(ds.frame(0, 1), b.frame(31));
}

TEST(BuildDataset, FailuresNameTheTrial) {
  const auto a = dipping_trial({10, 30, 50}, 60, {"x", "y", "z"}, "t0");
  const auto short_trial = dipping_trial({10, 30}, 60, {"x", "y", "z"}, "t_short");
  std::vector<LabeledSequence> ls{{&a, a.meta().motions, "t0"},
                                  {&short_trial, short_trial.meta().motions, "t_short"}};
  try {
    build_dataset(ls, ValleyParams{.min_separation = 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_valleys);
    EXPECT_NE(std::string(e.what()).find("t_short"), std::string::npos);
  }
  const auto other = dipping_trial({10, 30, 50}, 60, {"x", "y", "w"}, "t_bad");
  std::vector<LabeledSequence> mixed{{&a, a.meta().motions, "t0"},
                                     {&other, other.meta().motions, "t_bad"}};
  EXPECT_EQ(code_of([&] { build_dataset(mixed, ValleyParams{.min_separation = 0}); }),
            Errc::invalid_argument);

  const auto single = dipping_trial({20}, 40, {"x"}, "one");
  std::vector<LabeledSequence> one{{&single, single.meta().motions, "one"}};
  EXPECT_EQ(code_of([&] { build_dataset(one, ValleyParams{.min_separation = 0}); }),
            Errc::invalid_argument);
}
