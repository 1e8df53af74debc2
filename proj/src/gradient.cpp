#include "wireinspect/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wireinspect/error.hpp"

namespace wireinspect {

std::vector<TemplateShape> default_template_shapes() {
  std::vector<TemplateShape> shapes{{0, 1}};
  for (int drift : {1, 2, 3, 4, 6, 8}) {
    shapes.push_back({drift, 1});
    shapes.push_back({-drift, 1});
  }
  return shapes;
}

std::vector<TemplateShape> load_template_shapes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open template file " + path.string());
  }
  std::vector<TemplateShape> shapes;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    TemplateShape shape;
    if (!(fields >> shape.drift)) continue;
    if (!(fields >> shape.thickness) || shape.thickness < 1) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ":" + std::to_string(lineno) +
                                                ": expected '<drift> <thickness>'");
    }
    shapes.push_back(shape);
  }
  if (shapes.empty()) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": no templates listed");
  }
  return shapes;
}

GradientConfig GradientConfig::for_layout(int roi_width, int expected_wires) {
  GradientConfig cfg;
  if (expected_wires >= 1) {
    cfg.seg_max_width = std::max(1, roi_width / expected_wires / 2);
  }
  return cfg;
}

void GradientConfig::validate() const {
  if (!(sum_threshold_frac > 0.0 && sum_threshold_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "sum_threshold_frac must lie in (0, 1]");
  }
  if (template_width < 3 || template_width % 2 == 0) {
    throw Error(ErrorCode::InvalidConfig, "template_width must be odd and >= 3");
  }
  if (overlap_accept != 0.90) {
    throw Error(ErrorCode::InvalidConfig, "overlap_accept is fixed at 0.90");
  }
  if (grad_threshold < 1 || grad_threshold > 255) {
    throw Error(ErrorCode::InvalidConfig, "grad_threshold must lie in [1, 255]");
  }
  if (seg_min_width < 1 || (seg_max_width != 0 && seg_max_width < seg_min_width)) {
    throw Error(ErrorCode::InvalidConfig, "segment width bounds are inconsistent");
  }
  if (templates.empty()) {
    throw Error(ErrorCode::InvalidConfig, "at least one line template is required");
  }
}

std::string_view to_string(CombineMode mode) { return mode == CombineMode::Or ? "or" : "and"; }

LineTemplate make_line_template(int height, int width, const TemplateShape& shape) {
  if (height < 1 || width < 3 || width % 2 == 0 || shape.thickness < 1) {
    throw Error(ErrorCode::InvalidConfig, "line template needs height >= 1, odd width >= 3");
  }
  std::vector<int> offsets(height);
  for (int y = 0; y < height; ++y) {
    offsets[y] = height == 1
                     ? 0
                     : static_cast<int>(std::lround(static_cast<double>(shape.drift) * y /
                                                    (height - 1)));
  }
  std::map<int, int> histogram;
  for (int off : offsets) ++histogram[off];
  int anchor = histogram.begin()->first;
  int best = 0;
  for (const auto& [off, count] : histogram) {
    if (count > best) {
      best = count;
      anchor = off;
    }
  }

  LineTemplate t;
  t.id = shape.drift > 0 ? "+" + std::to_string(shape.drift) : std::to_string(shape.drift);
  if (shape.thickness != 1) t.id += "/t" + std::to_string(shape.thickness);
  t.width = width;
  t.height = height;
  t.drift = shape.drift;
  t.thickness = shape.thickness;
  t.cells.assign(static_cast<std::size_t>(width) * height, 0);
  const int center = width / 2;
  const int lead = (shape.thickness - 1) / 2;
  for (int y = 0; y < height; ++y) {
    const int col = center + offsets[y] - anchor;
    for (int j = 0; j < shape.thickness; ++j) {
      const int x = col - lead + j;
      if (x < 0 || x >= width) {
        throw Error(ErrorCode::InvalidConfig, "template drift " + std::to_string(shape.drift) +
                                                  " does not fit in width " +
                                                  std::to_string(width));
      }
      t.cells[static_cast<std::size_t>(y) * width + x] = 1;
    }
  }
  t.ones = static_cast<int>(std::count(t.cells.begin(), t.cells.end(), std::uint8_t{1}));
  return t;
}

std::vector<LineTemplate> make_templates(int height, const GradientConfig& cfg) {
  std::vector<LineTemplate> out;
  out.reserve(cfg.templates.size());
  for (const auto& shape : cfg.templates) {
    out.push_back(make_line_template(height, cfg.template_width, shape));
  }
  return out;
}

GradientMap x_gradient(const GrayImage& gray) {
  if (gray.width() < 2) {
    throw Error(ErrorCode::ImageTooNarrow, "x-gradient needs an image at least 2 px wide");
  }
  GradientMap out;
  out.width = gray.width() - 1;
  out.height = gray.height();
  out.values.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    const auto row = gray.row(y);
    auto* dst = out.values.data() + static_cast<std::size_t>(y) * out.width;
    for (int x = 0; x < out.width; ++x) {
      dst[x] = static_cast<std::int16_t>(static_cast<int>(row[x + 1]) - static_cast<int>(row[x]));
    }
  }
  return out;
}

EdgeMap threshold_gradient(const GradientMap& grad, int threshold) {
  EdgeMap out;
  out.width = grad.width;
  out.height = grad.height;
  out.cells.resize(grad.values.size());
  std::transform(grad.values.begin(), grad.values.end(), out.cells.begin(),
                 [threshold](std::int16_t g) { return std::abs(g) >= threshold ? 1 : 0; });
  return out;
}

std::vector<int> vertical_sum(const EdgeMap& edges) {
  std::vector<int> sums(edges.width, 0);
  for (int y = 0; y < edges.height; ++y) {
    const auto* row = edges.cells.data() + static_cast<std::size_t>(y) * edges.width;
    for (int x = 0; x < edges.width; ++x) sums[x] += row[x];
  }
  return sums;
}

std::vector<SegmentCandidate> find_segments(std::span<const int> sums, int rows,
                                            const GradientConfig& cfg) {
  const double limit = cfg.sum_threshold_frac * rows;
  std::vector<SegmentCandidate> out;
  const int n = static_cast<int>(sums.size());
  int x = 0;
  while (x < n) {
    if (!(sums[x] > limit)) {
      ++x;
      continue;
    }
    SegmentCandidate seg{x, x, x};
    while (x < n && sums[x] > limit) {
      if (sums[x] > sums[seg.peak_x]) seg.peak_x = x;
      seg.x_end = x;
      ++x;
    }
    const int width = seg.x_end - seg.x_start + 1;
    if (width >= cfg.seg_min_width && (cfg.seg_max_width == 0 || width <= cfg.seg_max_width)) {
      out.push_back(seg);
    }
  }
  return out;
}

namespace {

int matched_cells(const EdgeMap& edges, int center_x, const LineTemplate& tmpl) {
  if (tmpl.height != edges.height) {
    throw Error(ErrorCode::ShapeMismatch, "template height " + std::to_string(tmpl.height) +
                                              " != edge map height " +
                                              std::to_string(edges.height));
  }
  const int half = tmpl.width / 2;
  int matched = 0;
  for (int y = 0; y < tmpl.height; ++y) {
    for (int j = 0; j < tmpl.width; ++j) {
      if (tmpl.at(j, y) == 0) continue;
      const int x = center_x + j - half;
      if (x >= 0 && x < edges.width && edges.at(x, y) != 0) ++matched;
    }
  }
  return matched;
}

}  // namespace

bool overlap_accepted(int matched, int ones) noexcept {
  return ones > 0 && static_cast<long long>(matched) * 10 > static_cast<long long>(ones) * 9;
}

double template_overlap(const EdgeMap& edges, int center_x, const LineTemplate& tmpl) {
  if (tmpl.ones == 0) return 0.0;
  return static_cast<double>(matched_cells(edges, center_x, tmpl)) / tmpl.ones;
}

std::optional<TemplateMatch> match_template(const EdgeMap& edges, const SegmentCandidate& seg,
                                            std::span<const LineTemplate> templates,
                                            const GradientConfig& cfg) {
  std::optional<std::size_t> best;
  int best_matched = -1;
  for (std::size_t i = 0; i < templates.size(); ++i) {
    if (templates[i].width != cfg.template_width) {
      throw Error(ErrorCode::ShapeMismatch, "template width differs from configured m_template");
    }
    const int matched = matched_cells(edges, seg.peak_x, templates[i]);
    // Compare matched/ones across templates without rounding.
    if (!best || static_cast<long long>(matched) * templates[*best].ones >
                     static_cast<long long>(best_matched) * templates[i].ones) {
      best = i;
      best_matched = matched;
    }
  }
  if (!best || !overlap_accepted(best_matched, templates[*best].ones)) {
    return std::nullopt;
  }
  const auto& tmpl = templates[*best];
  return TemplateMatch{seg, *best, tmpl.id, static_cast<double>(best_matched) / tmpl.ones};
}

BinaryMask build_gradient_mask(std::span<const TemplateMatch> matches,
                               std::span<const LineTemplate> templates, int width, int height) {
  BinaryMask mask(width, height, false);
  for (const auto& m : matches) {
    const auto& tmpl = templates[m.template_index];
    const int half = tmpl.width / 2;
    for (int y = 0; y < std::min(height, tmpl.height); ++y) {
      for (int j = 0; j < tmpl.width; ++j) {
        if (tmpl.at(j, y) == 0) continue;
        const int x = m.segment.peak_x + j - half + 1;
        if (x >= 0 && x < width) mask.set(x, y, true);
      }
    }
  }
  return mask;
}

BinaryMask combine_masks(const BinaryMask& background, const BinaryMask& gradient,
                         CombineMode mode) {
  if (background.width() != gradient.width() || background.height() != gradient.height()) {
    throw Error(ErrorCode::ShapeMismatch, "cannot combine masks of different shapes");
  }
  const auto a = background.data();
  const auto b = gradient.data();
  std::vector<std::uint8_t> out(a.size());
  if (mode == CombineMode::Or) {
    std::transform(a.begin(), a.end(), b.begin(), out.begin(),
                   [](std::uint8_t p, std::uint8_t q) -> std::uint8_t { return p | q; });
  } else {
    std::transform(a.begin(), a.end(), b.begin(), out.begin(),
                   [](std::uint8_t p, std::uint8_t q) -> std::uint8_t { return p & q; });
  }
  return BinaryMask(background.width(), background.height(), std::move(out));
}

GradientBoundaries recover_boundaries(const RgbImage& cropped, const BinaryMask& background,
                                      const GradientConfig& cfg) {
  const auto edges = threshold_gradient(x_gradient(to_grayscale(cropped)), cfg.grad_threshold);
  const auto sums = vertical_sum(edges);
  const auto templates = make_templates(cropped.height(), cfg);

  auto segments = find_segments(sums, edges.height, cfg);
  std::vector<TemplateMatch> matches;
  for (const auto& seg : segments) {
    if (auto m = match_template(edges, seg, templates, cfg)) matches.push_back(*m);
  }
  auto gmask = build_gradient_mask(matches, templates, cropped.width(), cropped.height());
  for (int y = 0; y < gmask.height(); ++y) {
    for (int x = 1; x < gmask.width(); ++x) {
      if (gmask.on(x, y) && background.on(x - 1, y)) gmask.set(x, y, false);
    }
  }
  auto combined = combine_masks(background, gmask, cfg.combine_mode);
  return {std::move(segments), std::move(matches), std::move(gmask), std::move(combined)};
}

}  // namespace wireinspect
