#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wireinspect/imaging.hpp"

namespace wireinspect {

enum class CombineMode { Or, And };

/// Slope and thickness of one line template. `drift` is the total horizontal
/// displacement in pixels from the top row to the bottom row.
struct TemplateShape {
  int drift = 0;
  int thickness = 1;

  friend bool operator==(const TemplateShape&, const TemplateShape&) = default;
};

std::vector<TemplateShape> default_template_shapes();

/// Reads one "drift thickness" pair per line; blank lines and '#' comments
/// are skipped.
std::vector<TemplateShape> load_template_shapes(const std::filesystem::path& path);

struct GradientConfig {
  int grad_threshold = 30;
  double sum_threshold_frac = 0.3;
  int seg_min_width = 1;
  /// 0 disables the upper length constraint.
  int seg_max_width = 0;
  int template_width = 17;
  /// Fixed at 0.90; acceptance requires overlap strictly above it.
  double overlap_accept = 0.90;
  CombineMode combine_mode = CombineMode::Or;
  std::vector<TemplateShape> templates = default_template_shapes();

  /// Defaults with seg_max_width set to half the nominal wire pitch of a
  /// crop `roi_width` wide holding `expected_wires` wires.
  static GradientConfig for_layout(int roi_width, int expected_wires);

  void validate() const;

  friend bool operator==(const GradientConfig&, const GradientConfig&) = default;
};

/// n x (m-1) signed x-derivative: value(x, y) = gray(x+1, y) - gray(x, y).
struct GradientMap {
  int width = 0;
  int height = 0;
  std::vector<std::int16_t> values;

  std::int16_t at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

/// Thresholded gradient; each cell is 0 or 1. Column x marks the edge between
/// pixels x and x+1 of the source image.
struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  std::uint8_t at(int x, int y) const noexcept {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
};

struct LineTemplate {
  std::string id;
  int width = 0;
  int height = 0;
  int drift = 0;
  int thickness = 1;
  /// Row-major 0/1 cells.
  std::vector<std::uint8_t> cells;
  int ones = 0;

  std::uint8_t at(int x, int y) const noexcept {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
};

/// Builds a `height` x `width` template holding a line with the given drift.
/// The line is anchored so that the leftmost column with the most 1s sits on
/// the centre column; a boundary's column-sum peak lands on the same place, so
/// a crop centred on that peak lines up with the template.
LineTemplate make_line_template(int height, int width, const TemplateShape& shape);
std::vector<LineTemplate> make_templates(int height, const GradientConfig& cfg);

struct SegmentCandidate {
  int x_start = 0;  // inclusive
  int x_end = 0;    // inclusive
  int peak_x = 0;

  friend bool operator==(const SegmentCandidate&, const SegmentCandidate&) = default;
};

struct TemplateMatch {
  SegmentCandidate segment;
  std::size_t template_index = 0;
  std::string template_id;
  double overlap = 0.0;
};

GradientMap x_gradient(const GrayImage& gray);
EdgeMap threshold_gradient(const GradientMap& grad, int threshold);
std::vector<int> vertical_sum(const EdgeMap& edges);

/// Maximal runs with sum > sum_threshold_frac * rows, kept when their width
/// lies in [seg_min_width, seg_max_width]. peak_x is the leftmost maximum.
std::vector<SegmentCandidate> find_segments(std::span<const int> sums, int rows,
                                            const GradientConfig& cfg);

/// |template AND crop| / |template| with the template centred on `center_x`.
/// Columns outside the edge map read as 0.
double template_overlap(const EdgeMap& edges, int center_x, const LineTemplate& tmpl);

/// True when matched / ones exceeds 0.90, evaluated in exact integer arithmetic.
bool overlap_accepted(int matched, int ones) noexcept;

std::optional<TemplateMatch> match_template(const EdgeMap& edges, const SegmentCandidate& seg,
                                            std::span<const LineTemplate> templates,
                                            const GradientConfig& cfg);

/// Stamps every matched template into a zero mask of the cropped-frame shape.
/// Edge-map column x is drawn on image column x + 1, the first pixel to the
/// right of the edge.
BinaryMask build_gradient_mask(std::span<const TemplateMatch> matches,
                               std::span<const LineTemplate> templates, int width, int height);

BinaryMask combine_masks(const BinaryMask& background, const BinaryMask& gradient,
                         CombineMode mode);

/// Intermediate and final results of boundary recovery on one cropped frame.
struct GradientBoundaries {
  std::vector<SegmentCandidate> segments;
  std::vector<TemplateMatch> matches;
  BinaryMask gradient_mask;
  BinaryMask combined;
};

/// A stamped pixel whose left neighbour is already background is dropped from
/// the gradient mask: that edge is visible in the background mask, and the
/// stamp would only shave a column off the wire beside it.
GradientBoundaries recover_boundaries(const RgbImage& cropped, const BinaryMask& background,
                                      const GradientConfig& cfg);

std::string_view to_string(CombineMode mode);

}  // namespace wireinspect
