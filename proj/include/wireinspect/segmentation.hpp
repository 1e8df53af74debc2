#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wireinspect/gradient.hpp"
#include "wireinspect/imaging.hpp"

namespace wireinspect {

/// The four sampled rows of a cropped frame. Primaries are tried first; a
/// fallback row is only read when its primary fails.
struct ScanLineConfig {
  int primary_top = 0;
  int primary_bottom = 0;
  int fallback_top = 0;
  int fallback_bottom = 0;

  /// Rows 0, y_max, round(0.1 y_max), round(0.9 y_max) with y_max = height - 1.
  static ScanLineConfig for_height(int height);

  void validate(int height) const;

  friend bool operator==(const ScanLineConfig&, const ScanLineConfig&) = default;
};

/// Half-open pixel interval [start, end).
struct Interval {
  int start = 0;
  int end = 0;

  int width() const noexcept { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct EndpointRow {
  int y = 0;
  std::vector<Interval> intervals;

  int endpoint_count() const noexcept { return 2 * static_cast<int>(intervals.size()); }
  friend bool operator==(const EndpointRow&, const EndpointRow&) = default;
};

/// Tight box of one wire in cropped-frame coordinates. Columns are half-open
/// [x_left, x_right); rows are inclusive [y_top, y_bottom].
struct WireBox {
  int index = 0;
  int x_left = 0;
  int x_right = 0;
  int y_top = 0;
  int y_bottom = 0;

  friend bool operator==(const WireBox&, const WireBox&) = default;
};

BinaryMask background_mask(const RgbImage& cropped, const HsvRange& bg);

/// Wire (0-valued) runs of one mask row, found from the signed difference
/// mask[x+1] - mask[x]. A row starting or ending inside a wire is clipped at
/// x = 0 or x = width.
///
/// With merge_line_width > 0, a background run no wider than that which sits
/// between two wire runs is read as a boundary line: the two runs meet at the
/// line's centre column instead of being separated by it.
std::vector<Interval> row_intervals(const BinaryMask& mask, int y, int merge_line_width = 0);

/// Throws EndpointCountMismatch unless exactly `expected_wires` intervals exist.
EndpointRow scan_line_endpoints(const BinaryMask& mask, int y, int expected_wires,
                                int merge_line_width = 0);

struct EndpointPair {
  EndpointRow top;
  EndpointRow bottom;
};

/// Routing signal: at least one side failed on both of its rows.
struct NeedsGradient {
  bool top_failed = false;
  bool bottom_failed = false;
};

/// Rows actually read, in order. Lets callers observe the fallback policy.
struct ScanTrace {
  std::vector<int> rows_evaluated;
  bool gradient_invoked = false;
};

std::variant<EndpointPair, NeedsGradient> detect_endpoints(const BinaryMask& mask,
                                                           const ScanLineConfig& cfg,
                                                           int expected_wires,
                                                           ScanTrace* trace = nullptr,
                                                           int merge_line_width = 0);

/// x_left = max of the left pair, x_right = min of the right pair.
/// Throws DegenerateBox when a wire's pair does not overlap.
std::vector<WireBox> bounding_boxes(const EndpointRow& top, const EndpointRow& bottom);

enum class SegmentationPath { Background, Gradient, Unclear };

std::string_view to_string(SegmentationPath path);

struct Segmentation {
  SegmentationPath path = SegmentationPath::Unclear;
  std::vector<WireBox> boxes;
  /// Raw background-mask runs on the primary rows, kept for placement checks.
  std::vector<Interval> observed_top;
  std::vector<Interval> observed_bottom;
  std::string detail;

  bool unclear() const noexcept { return path == SegmentationPath::Unclear; }
};

/// Background mask, scan lines and boxes; on NeedsGradient runs the gradient
/// boundary recovery once, combines the masks and rescans.
Segmentation segment_wires(const RgbImage& cropped, const HsvRange& bg, const ScanLineConfig& cfg,
                           int expected_wires, const GradientConfig& gradient_cfg,
                           ScanTrace* trace = nullptr);

}  // namespace wireinspect
