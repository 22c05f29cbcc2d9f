#include <random>

#include "doctest.h"

#include "advaudio/error.hpp"
#include "advaudio/features.hpp"
#include "support/test_oracles.hpp"

using namespace advaudio;

namespace {

AudioClip noise_clip(std::size_t samples, unsigned seed, int rate = 16000) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<float> dist(-0.8f, 0.8f);
  AudioClip clip;
  clip.sample_rate = rate;
  clip.samples.resize(samples);
  for (auto& v : clip.samples) v = dist(rng);
  return clip;
}

MfccMatrix random_matrix(std::size_t frames, std::size_t coeffs, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  MfccMatrix m;
  m.frame_count = frames;
  m.coeff_count = coeffs;
  m.data.resize(frames * coeffs);
  for (auto& v : m.data) v = dist(rng);
  return m;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("frame counts follow the framing formula") {
  MfccConfig cfg;
  CHECK(cfg.window_samples() == 400);
  CHECK(cfg.hop_samples() == 160);
  CHECK(compute_mfcc(noise_clip(16000, 1), cfg).frame_count == 98);
  CHECK(compute_mfcc(noise_clip(32000, 2), cfg).frame_count == 198);
  CHECK(compute_mfcc(noise_clip(24000, 3), cfg).frame_count == 148);
  // generic lengths
  for (std::size_t n : {400u, 401u, 559u, 560u, 561u, 4000u}) {
    const std::size_t expected = (n - 400) / 160 + 1;
    CHECK(compute_mfcc(noise_clip(n, 4), cfg).frame_count == expected);
  }
  CHECK(compute_mfcc(noise_clip(16000, 1), cfg).coeff_count == 13);
}

TEST_CASE("too-short clips and mismatched rates are rejected") {
  MfccConfig cfg;
  CHECK_THROWS_WITH_AS(compute_mfcc(noise_clip(399, 5), cfg),
                       doctest::Contains("shorter than one window"), Error);
  CHECK_THROWS_AS(compute_mfcc(noise_clip(8000, 6, 8000), cfg), Error);
}

TEST_CASE("config validation") {
  MfccConfig bad;
  bad.fft_size = 300;  // < window and not a power of two
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = MfccConfig{};
  bad.num_coefficients = 40;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = MfccConfig{};
  bad.hop_ms = 30.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("extraction is deterministic") {
  AudioClip clip = noise_clip(16000, 42);
  MfccConfig cfg;
  MfccMatrix a = compute_mfcc(clip, cfg);
  MfccMatrix b = compute_mfcc(clip, cfg);
  CHECK(a.data == b.data);
}

TEST_CASE("mfcc distance identity, symmetry, and oracle agreement") {
  MfccMatrix m = random_matrix(12, 13, 7);
  CHECK(mfcc_distance(m, m) == 0.0);
  for (unsigned seed = 0; seed < 50; ++seed) {
    MfccMatrix a = random_matrix(9, 5, seed * 2 + 100);
    MfccMatrix b = random_matrix(9, 5, seed * 2 + 101);
    const double d = mfcc_distance(a, b);
    CHECK(d == mfcc_distance(b, a));
    CHECK(d == doctest::Approx(testsupport::flatten_l2(a.data, b.data)).epsilon(1e-12));
  }
}

TEST_CASE("mfcc distance triangle inequality on random triples") {
  for (unsigned seed = 0; seed < 60; ++seed) {
    MfccMatrix a = random_matrix(6, 4, seed * 3 + 1);
    MfccMatrix b = random_matrix(6, 4, seed * 3 + 2);
    MfccMatrix c = random_matrix(6, 4, seed * 3 + 3);
    CHECK(mfcc_distance(a, c) <= mfcc_distance(a, b) + mfcc_distance(b, c) + 1e-9);
  }
}

TEST_CASE("mfcc distance rejects shape mismatches") {
  CHECK_THROWS_AS(mfcc_distance(random_matrix(4, 3, 1), random_matrix(3, 4, 2)), Error);
}

TEST_CASE("correlation coefficient basics") {
  AudioClip x = noise_clip(4000, 13);
  AudioClip neg = x;
  for (auto& v : neg.samples) v = -v;
  CHECK(correlation_coefficient(x, x) == 1.0);
  CHECK(correlation_coefficient(x, neg) == -1.0);

  AudioClip affine = x;
  for (auto& v : affine.samples) v = 2.0f * v + 0.1f;
  CHECK(correlation_coefficient(x, affine) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("correlation is invariant under positive affine transforms") {
  AudioClip a = noise_clip(2000, 21);
  AudioClip b = noise_clip(2000, 22);
  const double base = correlation_coefficient(a, b);
  AudioClip scaled = a;
  for (auto& v : scaled.samples) v = 0.5f * v - 0.2f;
  CHECK(correlation_coefficient(scaled, b) == doctest::Approx(base).epsilon(1e-6));
}

TEST_CASE("correlation rejects bad input") {
  AudioClip x = noise_clip(100, 31);
  AudioClip longer = noise_clip(101, 32);
  CHECK_THROWS_AS(correlation_coefficient(x, longer), Error);
  AudioClip flat;
  flat.samples.assign(100, 0.25f);
  CHECK_THROWS_WITH_AS(correlation_coefficient(x, flat), doctest::Contains("zero-variance"),
                       Error);
}

}  // TEST_SUITE
