#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "wireinspect/error.hpp"
#include "wireinspect/orientation.hpp"

using namespace wireinspect;

namespace {

RgbImage connector_crop(const synth::HarnessSpec& spec) {
  return crop_roi(synth::generate(spec).frame, synth::connector_roi(spec));
}

}  // namespace

TEST(Embedding, DeterministicAndFixedLength) {
  std::mt19937_64 rng(1);
  const auto patch = testkit::random_image(rng, 40, 30);
  const auto& ex = default_extractor();
  const auto a = ex.extract(patch);
  EXPECT_EQ(a, ex.extract(patch));
  EXPECT_EQ(a.values.size(), ex.length());
  EXPECT_EQ(ex.version(), "grid-hist-v1");
  EXPECT_NEAR(a.l2_norm, 1.0, 1e-12);
}

TEST(Embedding, SolidRedAndBlueDiffer) {
  const auto& ex = default_extractor();
  const auto red = ex.extract(RgbImage(32, 32, Rgb{220, 20, 20}));
  const auto blue = ex.extract(RgbImage(32, 32, Rgb{20, 20, 220}));
  EXPECT_LT(cosine_similarity(red, blue), 0.85);
}

TEST(Cosine, Definition) {
  const auto v = EmbeddingVector::from_values({1.0, 2.0, -3.0});
  EXPECT_NEAR(cosine_similarity(v, v), 1.0, 1e-15);
  EXPECT_NEAR(cosine_similarity(v, EmbeddingVector::from_values({2.0, 4.0, -6.0})), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(cosine_similarity(EmbeddingVector::from_values({1, 0}),
                                     EmbeddingVector::from_values({0, 1})),
                   0.0);
  EXPECT_NEAR(cosine_similarity(v, EmbeddingVector::from_values({-1.0, -2.0, 3.0})), -1.0, 1e-15);
  try {
    cosine_similarity(v, EmbeddingVector::from_values({0, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
}

TEST(Embedding, ReversedConnectorFallsBelowThreshold) {
  auto spec = testkit::reference_spec(0, 0.0);
  const auto& ex = default_extractor();
  const auto ref = ex.extract(connector_crop(spec));
  spec.connector_reversed = true;
  const double reversed = cosine_similarity(ref, ex.extract(connector_crop(spec)));
  EXPECT_LT(reversed, 0.99);
  DistinctOrientation d{ref, calibrate_similarity_threshold(1.0, reversed), synth::connector_roi(spec)};
  EXPECT_EQ(verify_orientation(synth::generate(spec).frame, d).verdict, OrientationVerdict::Reversed);
  spec.connector_reversed = false;
  EXPECT_EQ(verify_orientation(synth::generate(spec).frame, d).verdict, OrientationVerdict::Correct);
}

TEST(Verify, CalibratedThresholdIsClampedMidpoint) {
  EXPECT_DOUBLE_EQ(calibrate_similarity_threshold(1.0, 0.9), 0.95);
  EXPECT_DOUBLE_EQ(calibrate_similarity_threshold(0.5, 0.3), 0.6);
  EXPECT_DOUBLE_EQ(calibrate_similarity_threshold(1.0, 1.0), 0.99);
}

TEST(Verify, RoiOutsideFrameIsUnclear) {
  DistinctOrientation d{EmbeddingVector::from_values({1.0}), 0.85, Roi{390, 0, 50, 50}};
  const auto c = verify_orientation(RgbImage(400, 240), d);
  EXPECT_EQ(c.verdict, OrientationVerdict::Unclear);
  SymmetricOrientation s;
  s.marker_roi = {-5, 0, 10, 10};
  EXPECT_EQ(verify_orientation(RgbImage(400, 240), s).verdict, OrientationVerdict::Unclear);
}

TEST(Marker, AreaFractionRule) {
  RgbImage frame(100, 100, Rgb{205, 190, 160});
  SymmetricOrientation s;
  s.marker_roi = {0, 0, 100, 100};
  EXPECT_FALSE(detect_marker(frame, s));
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 50; ++x) frame.set(x, y, {40, 190, 70});
  }
  EXPECT_DOUBLE_EQ(marker_fraction(frame, s), 0.05);
  EXPECT_TRUE(detect_marker(frame, s));
  s.min_area_frac = 0.06;
  EXPECT_FALSE(detect_marker(frame, s));
}

TEST(Marker, GeneratorMarkerOnReverseSide) {
  auto spec = testkit::reference_spec(0, 3.0);
  spec.connector_art = synth::ConnectorArt::Symmetric;
  spec.marker_side = synth::MarkerSide::Front;
  SymmetricOrientation s;
  s.marker_roi = synth::marker_roi(spec);
  EXPECT_EQ(verify_orientation(synth::generate(spec).frame, s).verdict, OrientationVerdict::Correct);
  spec.connector_reversed = true;
  const auto c = verify_orientation(synth::generate(spec).frame, s);
  EXPECT_EQ(c.verdict, OrientationVerdict::Reversed);
  EXPECT_EQ(c.score, 0.0);
}

TEST(Sharpness, BlurDropsEdgeEnergy) {
  auto spec = testkit::reference_spec(0, 3.0);
  const double sharp = edge_energy(connector_crop(spec));
  spec.blur_radius = 6;
  const double blurred = edge_energy(connector_crop(spec));
  EXPECT_GT(sharp, 0.0);
  EXPECT_LT(blurred, 0.5 * sharp);
  EXPECT_DOUBLE_EQ(edge_energy(RgbImage(20, 20, Rgb{9, 9, 9})), 0.0);
}

TEST(Sharpness, GateGivesUnclear) {
  auto spec = testkit::reference_spec(0, 3.0);
  const auto& ex = default_extractor();
  const auto crop = connector_crop(spec);
  DistinctOrientation d{ex.extract(crop), 0.9, synth::connector_roi(spec), 0.5 * edge_energy(crop)};
  spec.blur_radius = 6;
  const auto c = verify_orientation(synth::generate(spec).frame, d);
  EXPECT_EQ(c.verdict, OrientationVerdict::Unclear);
  EXPECT_FALSE(c.detail.empty());
}

TEST(Embedding, MeanIsNormalised) {
  const auto m = mean_embedding({EmbeddingVector::from_values({1, 0}), EmbeddingVector::from_values({0, 1})});
  EXPECT_NEAR(m.values[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(m.l2_norm, 1.0, 1e-15);
  EXPECT_THROW(mean_embedding({}), Error);
}

TEST(Embedding, EmptyPatchThrows) {
  // Raster refuses zero-sized images, so the extractor only sees real pixels;
  // a 1x1 patch still yields a vector of the declared length.
  EXPECT_EQ(default_extractor().extract(RgbImage(1, 1)).values.size(), default_extractor().length());
}
