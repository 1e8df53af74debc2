#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "wireinspect/error.hpp"
#include "wireinspect/gradient.hpp"
#include "wireinspect/segmentation.hpp"

using namespace wireinspect;

namespace {

GrayImage step_image(int width, int height, int first_bright) {
  GrayImage g(width, height, 100);
  for (int y = 0; y < height; ++y) {
    for (int x = first_bright; x < width; ++x) g.set(x, y, 200);
  }
  return g;
}

EdgeMap empty_edges(int width, int height) {
  EdgeMap e;
  e.width = width;
  e.height = height;
  e.cells.assign(static_cast<std::size_t>(width) * height, 0);
  return e;
}

void set_edge(EdgeMap& e, int x, int y) { e.cells[static_cast<std::size_t>(y) * e.width + x] = 1; }

// Red and blue wires touching at x=30, on green, 40 rows tall.
RgbImage two_touching_wires() {
  RgbImage img(60, 40, Rgb{40, 160, 60});
  for (int y = 0; y < 40; ++y) {
    for (int x = 10; x < 30; ++x) img.set(x, y, {220, 40, 40});
    for (int x = 30; x < 50; ++x) img.set(x, y, {40, 40, 220});
  }
  return img;
}

}  // namespace

TEST(XGradient, ConstantImageIsZero) {
  const auto g = x_gradient(GrayImage(9, 4, 77));
  EXPECT_EQ(g.width, 8);
  EXPECT_EQ(g.height, 4);
  EXPECT_TRUE(std::all_of(g.values.begin(), g.values.end(), [](auto v) { return v == 0; }));
}

TEST(XGradient, StepColumn) {
  const auto g = x_gradient(step_image(10, 3, 6));
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 9; ++x) EXPECT_EQ(g.at(x, y), x == 5 ? 100 : 0);
  }
  const auto down = x_gradient(GrayImage(2, 1, std::vector<std::uint8_t>{200, 0}));
  EXPECT_EQ(down.at(0, 0), -200);
}

TEST(XGradient, NeedsTwoColumns) {
  try {
    x_gradient(GrayImage(1, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ImageTooNarrow);
  }
}

TEST(Threshold, InclusiveOnMagnitude) {
  GradientMap g{4, 1, {29, 30, -30, -31}};
  const auto e = threshold_gradient(g, 30);
  EXPECT_EQ(e.cells, (std::vector<std::uint8_t>{0, 1, 1, 1}));
}

TEST(VerticalSum, ColumnCounts) {
  auto e = empty_edges(5, 7);
  for (int y = 0; y < 7; ++y) set_edge(e, 2, y);
  set_edge(e, 4, 0);
  EXPECT_EQ(vertical_sum(e), (std::vector<int>{0, 0, 7, 0, 1}));
}

TEST(FindSegments, RunAndLeftmostPeak) {
  GradientConfig cfg;
  cfg.sum_threshold_frac = 0.4;  // limit 4 of 10 rows, strictly exceeded
  const std::vector<int> sums{0, 0, 5, 6, 7, 0};
  const auto segs = find_segments(sums, 10, cfg);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0], (SegmentCandidate{2, 4, 4}));
  const std::vector<int> flat{0, 7, 7, 4, 0};
  EXPECT_EQ(find_segments(flat, 10, cfg)[0], (SegmentCandidate{1, 2, 1}));
}

TEST(FindSegments, WideRunsAreFiltered) {
  GradientConfig cfg;
  cfg.sum_threshold_frac = 0.5;
  cfg.seg_max_width = 3;
  const std::vector<int> sums{9, 9, 9, 9, 9, 0, 9, 0};  // glare band then a line
  const auto segs = find_segments(sums, 10, cfg);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].peak_x, 6);
}

TEST(Templates, ShapeInvariants) {
  const auto templates = make_templates(120, GradientConfig{});
  ASSERT_EQ(templates.size(), 13u);
  for (const auto& t : templates) {
    EXPECT_EQ(t.width, 17);
    EXPECT_EQ(t.height, 120);
    EXPECT_EQ(t.ones, 120);
    int first = -1, last = -1;
    for (int y = 0; y < t.height; ++y) {
      int count = 0;
      for (int x = 0; x < t.width; ++x) {
        if (t.at(x, y)) {
          ++count;
          if (y == 0) first = x;
          if (y == t.height - 1) last = x;
        }
      }
      ASSERT_EQ(count, 1) << t.id;
    }
    EXPECT_EQ(last - first, t.drift) << t.id;
  }
  EXPECT_EQ(templates[0].id, "0");
  EXPECT_EQ(templates[7].id, "+4");
}

TEST(Templates, TooMuchDriftForWidthIsRejected) {
  EXPECT_THROW(make_line_template(50, 5, {8, 1}), Error);
}

TEST(Overlap, IntegerBoundary) {
  EXPECT_FALSE(overlap_accepted(90, 100));
  EXPECT_TRUE(overlap_accepted(91, 100));
  EXPECT_FALSE(overlap_accepted(9, 10));
  EXPECT_FALSE(overlap_accepted(0, 0));
  EXPECT_TRUE(overlap_accepted(10, 10));
}

TEST(Overlap, ExactlyNinetyPercentIsRejected) {
  GradientConfig cfg;
  cfg.templates = {{0, 1}};
  const auto templates = make_templates(100, cfg);
  const SegmentCandidate seg{15, 15, 15};
  for (int rows : {85, 90, 91, 100}) {
    auto e = empty_edges(30, 100);
    for (int y = 0; y < rows; ++y) set_edge(e, 15, y);
    EXPECT_DOUBLE_EQ(template_overlap(e, 15, templates[0]), rows / 100.0);
    const auto m = match_template(e, seg, templates, cfg);
    EXPECT_EQ(m.has_value(), rows > 90) << rows << " rows";
  }
}

TEST(Overlap, ExactCropMatchesFully) {
  GradientConfig cfg;
  const auto templates = make_templates(40, cfg);
  const auto& t = templates[5];  // drift +3
  auto e = empty_edges(40, 40);
  for (int y = 0; y < 40; ++y) {
    for (int j = 0; j < t.width; ++j) {
      if (t.at(j, y)) set_edge(e, 20 + j - t.width / 2, y);
    }
  }
  const auto m = match_template(e, {20, 20, 20}, templates, cfg);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->template_id, t.id);
  EXPECT_DOUBLE_EQ(m->overlap, 1.0);
}

TEST(GradientMask, StampsRightOfEdgeAndIgnoresOrder) {
  GradientConfig cfg;
  const auto templates = make_templates(20, cfg);
  EXPECT_TRUE(std::all_of(build_gradient_mask({}, templates, 80, 20).data().begin(),
                          build_gradient_mask({}, templates, 80, 20).data().end(),
                          [](auto v) { return v == 0; }));
  std::vector<TemplateMatch> matches{{{50, 50, 50}, 0, "0", 1.0}, {{20, 21, 21}, 3, "+2", 1.0},
                                     {{70, 70, 70}, 4, "-2", 1.0}};
  const auto mask = build_gradient_mask(matches, templates, 80, 20);
  for (int y = 0; y < 20; ++y) EXPECT_TRUE(mask.on(51, y));
  std::reverse(matches.begin(), matches.end());
  EXPECT_EQ(build_gradient_mask(matches, templates, 80, 20), mask);
  std::swap(matches[0], matches[1]);
  EXPECT_EQ(build_gradient_mask(matches, templates, 80, 20), mask);
}

TEST(CombineMasks, PointwiseTruthTable) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::uint8_t> a(300), b(300);
  for (auto& v : a) v = coin(rng) ? 255 : 0;
  for (auto& v : b) v = coin(rng) ? 255 : 0;
  const BinaryMask ma(30, 10, a), mb(30, 10, b);
  const auto orm = combine_masks(ma, mb, CombineMode::Or);
  const auto andm = combine_masks(ma, mb, CombineMode::And);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(orm.data()[i], (a[i] || b[i]) ? 255 : 0);
    EXPECT_EQ(andm.data()[i], (a[i] && b[i]) ? 255 : 0);
  }
  const BinaryMask zeros(30, 10, false);
  EXPECT_EQ(combine_masks(ma, zeros, CombineMode::Or), ma);
  EXPECT_EQ(combine_masks(ma, zeros, CombineMode::And), zeros);
  EXPECT_THROW(combine_masks(ma, BinaryMask(10, 10), CombineMode::Or), Error);
}

TEST(Recovery, OrSplitsTouchingWiresAndDoesNot) {
  const auto img = two_touching_wires();
  const auto bg = background_mask(img, HsvRange::default_background());
  for (int y : {0, 39}) ASSERT_EQ(row_intervals(bg, y), (std::vector<Interval>{{10, 50}}));

  auto cfg = GradientConfig::for_layout(60, 2);
  const auto rec = recover_boundaries(img, bg, cfg);
  for (int y : {0, 20, 39}) {
    EXPECT_EQ(row_intervals(rec.combined, y), (std::vector<Interval>{{10, 30}, {31, 50}}));
  }

  cfg.combine_mode = CombineMode::And;
  const auto with_and = recover_boundaries(img, bg, cfg);
  for (int y = 0; y < 40; ++y) {
    // AND can only remove background, so the blob stays one solid run.
    for (int x = 10; x < 50; ++x) ASSERT_FALSE(with_and.combined.on(x, y));
    for (int x = 0; x < 60; ++x) {
      if (with_and.combined.on(x, y)) {
        ASSERT_TRUE(bg.on(x, y));
      }
    }
  }
}

TEST(Recovery, TouchingHarnessBoundariesAtTruth) {
  auto spec = testkit::reference_spec(0, 0.0);
  spec.gap = 0;
  const auto r = synth::generate(spec);
  const auto bg = background_mask(r.truth.cropped, HsvRange::default_background());
  const auto cfg = GradientConfig::for_layout(spec.wire_roi.width, 8);
  const auto rec = recover_boundaries(r.truth.cropped, bg, cfg);
  for (int i = 1; i < 8; ++i) {
    const int boundary = r.truth.boxes[static_cast<std::size_t>(i)].x_left;
    const bool found = std::any_of(rec.matches.begin(), rec.matches.end(), [&](const auto& m) {
      return std::abs(m.segment.peak_x + 1 - boundary) <= 1;
    });
    EXPECT_TRUE(found) << "boundary before wire " << i;
  }
  // Every edge-map 1 sits within a pixel of a wire edge.
  const auto edges =
      threshold_gradient(x_gradient(to_grayscale(r.truth.cropped)), cfg.grad_threshold);
  for (int x = 0; x < edges.width; ++x) {
    if (edges.at(x, 0) == 0) continue;
    const bool near_edge = std::any_of(r.truth.boxes.begin(), r.truth.boxes.end(), [&](auto& b) {
      return std::abs(x + 1 - b.x_left) <= 1 || std::abs(x + 1 - b.x_right) <= 1;
    });
    EXPECT_TRUE(near_edge) << "edge column " << x;
  }
}

TEST(Recovery, SlantPicksMatchingTemplate) {
  auto spec = testkit::reference_spec(0, 0.0);
  spec.gap = 0;
  spec.slant = 4;
  const auto r = synth::generate(spec);
  const auto bg = background_mask(r.truth.cropped, HsvRange::default_background());
  // A hard edge drifting 4 px spreads over five columns, so no column reaches
  // the default 0.3 * rows; the gate is lowered to let the boundaries through.
  auto cfg = GradientConfig::for_layout(spec.wire_roi.width, 8);
  EXPECT_TRUE(recover_boundaries(r.truth.cropped, bg, cfg).matches.empty());
  cfg.sum_threshold_frac = 0.2;
  const auto rec = recover_boundaries(r.truth.cropped, bg, cfg);
  ASSERT_GE(rec.matches.size(), 7u);
  for (const auto& m : rec.matches) EXPECT_EQ(m.template_id, "+4");
}
