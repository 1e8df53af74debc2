#include "wireinspect/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "wireinspect/error.hpp"

namespace wireinspect {

ScanLineConfig ScanLineConfig::for_height(int height) {
  const int y_max = height - 1;
  ScanLineConfig cfg;
  cfg.primary_top = 0;
  cfg.primary_bottom = y_max;
  cfg.fallback_top = static_cast<int>(std::lround(0.1 * y_max));
  cfg.fallback_bottom = static_cast<int>(std::lround(0.9 * y_max));
  return cfg;
}

void ScanLineConfig::validate(int height) const {
  const int y_max = height - 1;
  const auto in_range = [y_max](int y) { return y >= 0 && y <= y_max; };
  if (!(in_range(primary_top) && in_range(primary_bottom) && in_range(fallback_top) &&
        in_range(fallback_bottom))) {
    throw Error(ErrorCode::InvalidConfig, "scan rows must lie within the cropped frame");
  }
  if (!(fallback_top > primary_top && fallback_bottom < primary_bottom)) {
    throw Error(ErrorCode::InvalidConfig,
                "fallback rows must lie strictly inside the primary rows");
  }
}

std::string_view to_string(SegmentationPath path) {
  switch (path) {
    case SegmentationPath::Background: return "background";
    case SegmentationPath::Gradient: return "gradient";
    case SegmentationPath::Unclear: return "unclear";
  }
  return "unclear";
}

BinaryMask background_mask(const RgbImage& cropped, const HsvRange& bg) {
  const auto src = cropped.data();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(cropped.width()) * cropped.height());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Rgb p{src[3 * i], src[3 * i + 1], src[3 * i + 2]};
    out[i] = hsv_in_range(rgb_to_hsv(p), bg) ? 255 : 0;
  }
  return BinaryMask(cropped.width(), cropped.height(), std::move(out));
}

std::vector<Interval> row_intervals(const BinaryMask& mask, int y, int merge_line_width) {
  if (y < 0 || y >= mask.height()) {
    throw Error(ErrorCode::InvalidConfig, "scan row " + std::to_string(y) + " outside mask");
  }
  const auto row = mask.row(y);
  const int w = mask.width();

  std::vector<Interval> out;
  int open = row[0] == 0 ? 0 : -1;  // start of the wire run in progress
  for (int x = 0; x + 1 < w; ++x) {
    const int d = static_cast<int>(row[x + 1]) - static_cast<int>(row[x]);
    if (d == -255) {
      if (open >= 0) throw Error(ErrorCode::MalformedAlternation, "wire opened twice on row");
      open = x + 1;
    } else if (d == 255) {
      if (open < 0) throw Error(ErrorCode::MalformedAlternation, "wire closed before opening");
      out.push_back({open, x + 1});
      open = -1;
    }
  }
  if (open >= 0) out.push_back({open, w});

  if (merge_line_width > 0 && out.size() > 1) {
    std::vector<Interval> merged{out.front()};
    for (std::size_t i = 1; i < out.size(); ++i) {
      auto& left = merged.back();
      Interval right = out[i];
      const int gap = right.start - left.end;
      if (gap >= 1 && gap <= merge_line_width) {
        const int center = left.end + (gap - 1) / 2;
        left.end = center;
        right.start = center;
      }
      merged.push_back(right);
    }
    out = std::move(merged);
  }
  return out;
}

EndpointRow scan_line_endpoints(const BinaryMask& mask, int y, int expected_wires,
                                int merge_line_width) {
  if (expected_wires < 1) {
    throw Error(ErrorCode::InvalidConfig, "expected_wires must be >= 1");
  }
  auto intervals = row_intervals(mask, y, merge_line_width);
  if (static_cast<int>(intervals.size()) != expected_wires) {
    throw EndpointCountMismatch(static_cast<int>(intervals.size()), expected_wires);
  }
  return {y, std::move(intervals)};
}

namespace {

std::optional<EndpointRow> try_rows(const BinaryMask& mask, int primary, int fallback,
                                    int expected_wires, ScanTrace* trace, int merge) {
  for (int y : {primary, fallback}) {
    if (trace) trace->rows_evaluated.push_back(y);
    try {
      return scan_line_endpoints(mask, y, expected_wires, merge);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EndpointCountMismatch &&
          e.code() != ErrorCode::MalformedAlternation) {
        throw;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::variant<EndpointPair, NeedsGradient> detect_endpoints(const BinaryMask& mask,
                                                           const ScanLineConfig& cfg,
                                                           int expected_wires, ScanTrace* trace,
                                                           int merge_line_width) {
  cfg.validate(mask.height());
  auto top = try_rows(mask, cfg.primary_top, cfg.fallback_top, expected_wires, trace,
                      merge_line_width);
  auto bottom = try_rows(mask, cfg.primary_bottom, cfg.fallback_bottom, expected_wires, trace,
                         merge_line_width);
  if (top && bottom) return EndpointPair{std::move(*top), std::move(*bottom)};
  return NeedsGradient{!top, !bottom};
}

std::vector<WireBox> bounding_boxes(const EndpointRow& top, const EndpointRow& bottom) {
  if (top.intervals.size() != bottom.intervals.size()) {
    throw Error(ErrorCode::ShapeMismatch, "top and bottom rows hold different wire counts");
  }
  std::vector<WireBox> boxes;
  boxes.reserve(top.intervals.size());
  for (std::size_t i = 0; i < top.intervals.size(); ++i) {
    const auto& a = top.intervals[i];
    const auto& b = bottom.intervals[i];
    WireBox box{static_cast<int>(i), std::max(a.start, b.start), std::min(a.end, b.end),
                std::min(top.y, bottom.y), std::max(top.y, bottom.y)};
    if (box.x_left >= box.x_right || box.y_top >= box.y_bottom) {
      throw Error(ErrorCode::DegenerateBox,
                  "wire " + std::to_string(i) + " has no overlap between its top and bottom runs");
    }
    boxes.push_back(box);
  }
  return boxes;
}

Segmentation segment_wires(const RgbImage& cropped, const HsvRange& bg, const ScanLineConfig& cfg,
                           int expected_wires, const GradientConfig& gradient_cfg,
                           ScanTrace* trace) {
  Segmentation result;
  const auto mask = background_mask(cropped, bg);
  result.observed_top = row_intervals(mask, cfg.primary_top);
  result.observed_bottom = row_intervals(mask, cfg.primary_bottom);

  const auto finish = [&](const EndpointPair& pair, SegmentationPath path) {
    try {
      result.boxes = bounding_boxes(pair.top, pair.bottom);
      result.path = path;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBox) throw;
      result.path = SegmentationPath::Unclear;
      result.detail = e.what();
    }
  };

  auto first = detect_endpoints(mask, cfg, expected_wires, trace);
  if (const auto* pair = std::get_if<EndpointPair>(&first)) {
    finish(*pair, SegmentationPath::Background);
    return result;
  }

  if (trace) trace->gradient_invoked = true;
  const auto recovered = recover_boundaries(cropped, mask, gradient_cfg);
  int merge = 0;
  if (gradient_cfg.combine_mode == CombineMode::Or) {
    for (const auto& shape : gradient_cfg.templates) merge = std::max(merge, shape.thickness);
  }
  auto second = detect_endpoints(recovered.combined, cfg, expected_wires, trace, merge);
  if (const auto* pair = std::get_if<EndpointPair>(&second)) {
    finish(*pair, SegmentationPath::Gradient);
    return result;
  }
  result.path = SegmentationPath::Unclear;
  result.detail = "found " + std::to_string(result.observed_top.size()) + "/" +
                  std::to_string(result.observed_bottom.size()) +
                  " wire runs on the primary rows, expected " + std::to_string(expected_wires) +
                  "; gradient recovery matched " + std::to_string(recovered.matches.size()) +
                  " boundaries";
  return result;
}

}  // namespace wireinspect
