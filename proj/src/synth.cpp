#include "wireinspect/synth.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <random>

#include "wireinspect/error.hpp"

namespace wireinspect::synth {

namespace {

constexpr Rgb kBody{205, 190, 160};
constexpr Rgb kNotch{35, 35, 35};
constexpr Rgb kLatch{70, 100, 170};
constexpr Rgb kCavity{60, 55, 50};
constexpr Rgb kMarker{40, 190, 70};
constexpr int kMarkerSize = 30;
constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kReflectionGain = 40;

// 5x7 digit bitmaps, one row per entry, MSB is the leftmost pixel.
constexpr std::array<std::array<std::uint8_t, kGlyphH>, 10> kDigits{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1E, 0x01, 0x01, 0x0E, 0x01, 0x01, 0x1E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

struct NamedColor {
  std::string_view name;
  Rgb rgb;
};

constexpr std::array<NamedColor, 10> kPalette{{
    {"black", {20, 20, 20}},
    {"blue", {20, 35, 210}},
    {"red", {215, 25, 35}},
    {"violet", {165, 70, 225}},
    {"orange", {240, 125, 15}},
    {"pink", {240, 145, 190}},
    {"yellow", {245, 230, 50}},
    {"white", {245, 245, 245}},
    {"brown", {130, 70, 25}},
    {"gray", {128, 128, 128}},
}};

std::uint8_t clamp8(long v) { return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L)); }

struct Layout {
  int start = 0;  // ROI x of wire 0's left edge on row 0
  int pitch = 0;
  int field_width = 0;
};

Layout layout_of(const HarnessSpec& spec) {
  Layout l;
  const int n = static_cast<int>(spec.wire_colors.size());
  l.pitch = spec.wire_width + spec.gap;
  l.field_width = n * spec.wire_width + (n - 1) * spec.gap;
  l.start = static_cast<int>(
      std::floor((spec.wire_roi.width - l.field_width - spec.slant) / 2.0));
  return l;
}

int row_offset(const HarnessSpec& spec, int roi_y) {
  const int h = spec.wire_roi.height;
  if (h <= 1) return 0;
  return static_cast<int>(std::lround(static_cast<double>(spec.slant) * roi_y / (h - 1)));
}

/// Frame x of wire i's left edge on frame row y.
int wire_left(const HarnessSpec& spec, const Layout& l, int i, int frame_y) {
  return spec.wire_roi.x + l.start + i * l.pitch + row_offset(spec, frame_y - spec.wire_roi.y);
}

void fill_rect(RgbImage& img, int x, int y, int w, int h, Rgb c) {
  for (int yy = std::max(0, y); yy < std::min(img.height(), y + h); ++yy) {
    for (int xx = std::max(0, x); xx < std::min(img.width(), x + w); ++xx) img.set(xx, yy, c);
  }
}

/// Draws a rectangle given in connector-relative fractions, mirrored
/// horizontally when the connector is reversed.
void connector_rect(RgbImage& img, const Roi& box, bool mirrored, double fx, double fy, double fw,
                    double fh, Rgb c) {
  int x = static_cast<int>(std::lround(fx * box.width));
  const int y = static_cast<int>(std::lround(fy * box.height));
  const int w = static_cast<int>(std::lround(fw * box.width));
  const int h = static_cast<int>(std::lround(fh * box.height));
  if (mirrored) x = box.width - (x + w);
  fill_rect(img, box.x + x, box.y + y, w, h, c);
}

void box_blur(RgbImage& img, int radius) {
  if (radius <= 0) return;
  const int w = img.width();
  const int h = img.height();
  const int span = 2 * radius + 1;
  std::vector<int> tmp(static_cast<std::size_t>(w) * h * 3);
  auto data = img.mutable_data();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        int acc = 0;
        for (int k = -radius; k <= radius; ++k) {
          const int xx = std::clamp(x + k, 0, w - 1);
          acc += data[(static_cast<std::size_t>(y) * w + xx) * 3 + c];
        }
        tmp[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        long acc = 0;
        for (int k = -radius; k <= radius; ++k) {
          const int yy = std::clamp(y + k, 0, h - 1);
          acc += tmp[(static_cast<std::size_t>(yy) * w + x) * 3 + c];
        }
        data[(static_cast<std::size_t>(y) * w + x) * 3 + c] =
            clamp8(std::lround(static_cast<double>(acc) / (span * span)));
      }
    }
  }
}

void check_index(int i, std::size_t n, std::string_view what) {
  if (i < 0 || static_cast<std::size_t>(i) >= n) {
    throw Error(ErrorCode::IndexOutOfRange, std::string(what) + " index " + std::to_string(i) +
                                                " outside [0, " + std::to_string(n) + ")");
  }
}

int parse_int(std::string_view s, std::string_view context) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::SpecInvalid, "bad integer '" + std::string(s) + "' in " +
                                            std::string(context));
  }
  return v;
}

std::vector<int> parse_args(std::string_view args, std::string_view context) {
  std::vector<int> out;
  while (!args.empty()) {
    const auto comma = args.find(',');
    out.push_back(parse_int(args.substr(0, comma), context));
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

void HarnessSpec::validate() const {
  const auto fail = [](const std::string& why) { throw Error(ErrorCode::SpecInvalid, why); };
  if (wire_colors.empty()) fail("a harness needs at least one wire");
  if (wire_width < 3) fail("wire_width must be >= 3");
  if (gap < 0) fail("gap must be >= 0");
  if (std::abs(slant) >= wire_width) fail("|slant| must be smaller than wire_width");
  if (noise_sigma < 0.0 || blur_radius < 0 || reflection_bands < 0) {
    fail("noise_sigma, blur_radius and reflection_bands must be non-negative");
  }
  if (frame_width < 1 || frame_height < 1) fail("frame dimensions must be positive");
  if (!roi_within(wire_roi, frame_width, frame_height) || wire_roi.height < 2) {
    fail("wire_roi must lie inside the frame and be at least 2 rows tall");
  }
  if (!roi_within(connector_box, frame_width, frame_height)) {
    fail("connector_box must lie inside the frame");
  }
  if (connector_box.y + connector_box.height > wire_roi.y) {
    fail("connector_box must end above the wire ROI");
  }
  const auto l = layout_of(*this);
  if (l.start + std::min(0, slant) < 1 ||
      l.start + l.field_width + std::max(0, slant) > wire_roi.width - 1) {
    fail("wire field (" + std::to_string(l.field_width) + " px plus slant) does not fit in the " +
         std::to_string(wire_roi.width) + " px ROI");
  }
}

Roi connector_roi(const HarnessSpec& spec) {
  const Roi& b = spec.connector_box;
  const int x0 = std::max(0, b.x - 6);
  const int y0 = std::max(0, b.y - 6);
  const int x1 = std::min(spec.frame_width, b.x + b.width + 6);
  const int y1 = b.y + b.height;  // the wires start right below
  return {x0, y0, x1 - x0, y1 - y0};
}

Roi marker_roi(const HarnessSpec& spec) { return spec.connector_box; }

Rendered generate(const HarnessSpec& spec) {
  spec.validate();
  const auto l = layout_of(spec);
  const int n = static_cast<int>(spec.wire_colors.size());
  const Roi& roi = spec.wire_roi;
  const Roi& box = spec.connector_box;
  std::mt19937_64 rng(spec.seed);

  RgbImage frame(spec.frame_width, spec.frame_height, spec.background);
  const int wire_top = box.y + box.height;

  for (int y = wire_top; y < spec.frame_height; ++y) {
    for (int i = 0; i < n; ++i) {
      const int left = wire_left(spec, l, i, y);
      fill_rect(frame, left, y, spec.wire_width, 1, spec.wire_colors[i]);
    }
  }

  if (spec.text_artifacts && spec.wire_width >= kGlyphW + 2) {
    std::uniform_int_distribution<int> digit(0, 9);
    std::uniform_int_distribution<int> row(0, roi.height - kGlyphH);
    for (int i = 0; i < n; ++i) {
      const Rgb ink = luma(spec.wire_colors[i]) < 90 ? Rgb{230, 230, 230} : Rgb{25, 25, 25};
      for (int g = 0; g < 2; ++g) {
        const auto& glyph = kDigits[digit(rng)];
        const int gy = roi.y + row(rng);
        for (int r = 0; r < kGlyphH; ++r) {
          const int y = gy + r;
          const int gx = wire_left(spec, l, i, y) + (spec.wire_width - kGlyphW) / 2;
          for (int c = 0; c < kGlyphW; ++c) {
            if (glyph[r] & (0x10 >> c)) frame.set(gx + c, y, ink);
          }
        }
      }
    }
  }

  if (spec.reflection_bands > 0 && spec.wire_width >= 6) {
    std::uniform_int_distribution<int> which(0, n - 1);
    std::uniform_int_distribution<int> where(1, spec.wire_width - 4);
    for (int b = 0; b < spec.reflection_bands; ++b) {
      const int i = which(rng);
      const int off = where(rng);
      for (int y = wire_top; y < spec.frame_height; ++y) {
        const int x0 = wire_left(spec, l, i, y) + off;
        for (int x = x0; x < x0 + 3; ++x) {
          if (x < 0 || x >= frame.width()) continue;
          const Rgb p = frame.at(x, y);
          frame.set(x, y, {clamp8(p.r + kReflectionGain), clamp8(p.g + kReflectionGain),
                           clamp8(p.b + kReflectionGain)});
        }
      }
    }
  }

  // Connector: body, one cavity per wire along the bottom edge, then art.
  fill_rect(frame, box.x, box.y, box.width, box.height, kBody);
  for (int i = 0; i < n; ++i) {
    const double cell = 1.0 / n;
    connector_rect(frame, box, false, (i + 0.3) * cell, 0.7, 0.4 * cell, 0.2, kCavity);
  }
  std::optional<Roi> marker_box;
  const bool mirrored = spec.connector_reversed;
  if (spec.connector_art == ConnectorArt::DistinctNotch) {
    connector_rect(frame, box, mirrored, 0.06, 0.0, 0.16, 0.45, kNotch);
    connector_rect(frame, box, mirrored, 0.78, 0.15, 0.14, 0.30, kLatch);
  } else {
    const bool visible = spec.marker_side != MarkerSide::None &&
                         ((spec.marker_side == MarkerSide::Front) != spec.connector_reversed);
    if (visible) {
      const int side = std::min(kMarkerSize, box.height);
      marker_box = Roi{box.x + 20, box.y + (box.height - side) / 2, side, side};
      fill_rect(frame, marker_box->x, marker_box->y, marker_box->width, marker_box->height,
                kMarker);
    }
  }

  box_blur(frame, spec.blur_radius);

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    for (auto& v : frame.mutable_data()) v = clamp8(std::lround(v + noise(rng)));
  }

  GroundTruth truth{crop_roi(frame, roi), {}, BinaryMask(roi.width, roi.height, true), {}, {},
                    spec.connector_reversed ? OrientationVerdict::Reversed
                                            : OrientationVerdict::Correct,
                    box, marker_box};
  for (int i = 0; i < n; ++i) {
    const int left0 = l.start + i * l.pitch;
    const int left1 = left0 + row_offset(spec, roi.height - 1);
    truth.top_edges.push_back({left0, left0 + spec.wire_width});
    truth.bottom_edges.push_back({left1, left1 + spec.wire_width});
    truth.boxes.push_back({i, std::max(left0, left1),
                           std::min(left0, left1) + spec.wire_width, 0, roi.height - 1});
  }
  for (int y = 0; y < roi.height; ++y) {
    for (int i = 0; i < n; ++i) {
      const int left = l.start + i * l.pitch + row_offset(spec, y);
      for (int x = left; x < left + spec.wire_width; ++x) truth.background_mask.set(x, y, false);
    }
  }
  return {std::move(frame), std::move(truth)};
}

HarnessSpec permute_defect(const HarnessSpec& spec, const Defect& defect) {
  HarnessSpec out = spec;
  auto& colors = out.wire_colors;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SwapWires>) {
          check_index(d.i, colors.size(), "swap");
          check_index(d.j, colors.size(), "swap");
          std::swap(colors[d.i], colors[d.j]);
        } else if constexpr (std::is_same_v<T, ReverseConnector>) {
          out.connector_reversed = !out.connector_reversed;
        } else if constexpr (std::is_same_v<T, ShiftWire>) {
          const int to = d.to.value_or(static_cast<int>(colors.size()) - 1);
          check_index(d.from, colors.size(), "shift_wire");
          check_index(to, colors.size(), "shift_wire");
          const Rgb moved = colors[d.from];
          colors.erase(colors.begin() + d.from);
          colors.insert(colors.begin() + to, moved);
        } else if constexpr (std::is_same_v<T, DropWire>) {
          check_index(d.index, colors.size(), "drop_wire");
          if (colors.size() == 1) {
            throw Error(ErrorCode::IndexOutOfRange, "cannot drop the only wire");
          }
          colors.erase(colors.begin() + d.index);
        }
      },
      defect);
  return out;
}

Variant parse_variant(std::string_view text) {
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  const auto args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const auto nums = parse_args(args, text);
  const auto want = [&](std::size_t lo, std::size_t hi) {
    if (nums.size() < lo || nums.size() > hi) {
      throw Error(ErrorCode::SpecInvalid, "wrong argument count in defect '" + std::string(text) + "'");
    }
  };
  Variant v;
  if (kind == "none") {
    want(0, 0);
  } else if (kind == "swap") {
    want(2, 2);
    v.defect = SwapWires{nums[0], nums[1]};
  } else if (kind == "reverse_connector") {
    want(0, 0);
    v.defect = ReverseConnector{};
  } else if (kind == "shift_wire") {
    want(1, 2);
    v.defect = ShiftWire{nums[0], nums.size() == 2 ? std::optional<int>(nums[1]) : std::nullopt};
  } else if (kind == "drop_wire") {
    want(1, 1);
    v.defect = DropWire{nums[0]};
  } else if (kind == "blur") {
    want(0, 1);
    v.blur_radius = nums.empty() ? 6 : nums[0];
    if (v.blur_radius < 1) throw Error(ErrorCode::SpecInvalid, "blur radius must be >= 1");
  } else {
    throw Error(ErrorCode::SpecInvalid, "unknown defect kind '" + std::string(kind) + "'");
  }
  return v;
}

std::string to_string(const Variant& v) {
  if (v.blur_radius > 0) return "blur:" + std::to_string(v.blur_radius);
  if (!v.defect) return "none";
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SwapWires>) {
          return "swap:" + std::to_string(d.i) + "," + std::to_string(d.j);
        } else if constexpr (std::is_same_v<T, ReverseConnector>) {
          return "reverse_connector";
        } else if constexpr (std::is_same_v<T, ShiftWire>) {
          return "shift_wire:" + std::to_string(d.from) +
                 (d.to ? "," + std::to_string(*d.to) : std::string{});
        } else {
          return "drop_wire:" + std::to_string(d.index);
        }
      },
      *v.defect);
}

HarnessSpec apply_variant(const HarnessSpec& spec, const Variant& v) {
  HarnessSpec out = v.defect ? permute_defect(spec, *v.defect) : spec;
  if (v.blur_radius > 0) out.blur_radius = v.blur_radius;
  return out;
}

std::string expected_verdict(const HarnessSpec& spec, const Variant& v) {
  if (v.blur_radius > 0) return "Unclear";
  if (!v.defect) return "Pass";
  const auto changed = permute_defect(spec, *v.defect);
  if (std::holds_alternative<ReverseConnector>(*v.defect)) return "Fail";
  return changed.wire_colors == spec.wire_colors ? "Pass" : "Fail";
}

std::optional<Rgb> named_color(std::string_view name) {
  for (const auto& c : kPalette) {
    if (c.name == name) return c.rgb;
  }
  return std::nullopt;
}

std::vector<std::string> palette_names() {
  std::vector<std::string> out;
  for (const auto& c : kPalette) out.emplace_back(c.name);
  return out;
}

std::vector<Rgb> reference_harness_colors() {
  std::vector<Rgb> out;
  for (auto name : {"black", "orange", "blue", "pink", "red", "yellow", "violet", "white"}) {
    out.push_back(*named_color(name));
  }
  return out;
}

namespace {

nlohmann::json roi_json(const Roi& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

Roi roi_from(const nlohmann::json& j) {
  return {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(),
          j.at("height").get<int>()};
}

Rgb color_from(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (auto c = named_color(name)) return *c;
    throw Error(ErrorCode::SpecInvalid, "unknown colour name '" + name + "'");
  }
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::SpecInvalid, "colours are names or [r, g, b] arrays");
  }
  const auto ch = [&](std::size_t k) {
    const int v = j.at(k).get<int>();
    if (v < 0 || v > 255) throw Error(ErrorCode::SpecInvalid, "colour channel out of range");
    return static_cast<std::uint8_t>(v);
  };
  return {ch(0), ch(1), ch(2)};
}

}  // namespace

nlohmann::json to_json(const HarnessSpec& spec) {
  nlohmann::json colors = nlohmann::json::array();
  for (const auto& c : spec.wire_colors) colors.push_back({c.r, c.g, c.b});
  return {
      {"wire_colors", colors},
      {"wire_width", spec.wire_width},
      {"gap", spec.gap},
      {"slant", spec.slant},
      {"background", {spec.background.r, spec.background.g, spec.background.b}},
      {"noise_sigma", spec.noise_sigma},
      {"text_artifacts", spec.text_artifacts},
      {"reflection_bands", spec.reflection_bands},
      {"connector_art",
       spec.connector_art == ConnectorArt::DistinctNotch ? "distinct-notch" : "symmetric"},
      {"marker_side", spec.marker_side == MarkerSide::Front  ? "front"
                      : spec.marker_side == MarkerSide::Back ? "back"
                                                             : "none"},
      {"connector_reversed", spec.connector_reversed},
      {"blur_radius", spec.blur_radius},
      {"seed", spec.seed},
      {"frame_width", spec.frame_width},
      {"frame_height", spec.frame_height},
      {"wire_roi", roi_json(spec.wire_roi)},
      {"connector_box", roi_json(spec.connector_box)},
  };
}

HarnessSpec spec_from_json(const nlohmann::json& j) {
  try {
    HarnessSpec s;
    for (const auto& c : j.at("wire_colors")) s.wire_colors.push_back(color_from(c));
    s.wire_width = j.value("wire_width", s.wire_width);
    s.gap = j.value("gap", s.gap);
    s.slant = j.value("slant", s.slant);
    if (j.contains("background")) s.background = color_from(j.at("background"));
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.text_artifacts = j.value("text_artifacts", s.text_artifacts);
    s.reflection_bands = j.value("reflection_bands", s.reflection_bands);
    const auto art = j.value("connector_art", std::string("distinct-notch"));
    if (art == "distinct-notch") {
      s.connector_art = ConnectorArt::DistinctNotch;
    } else if (art == "symmetric") {
      s.connector_art = ConnectorArt::Symmetric;
    } else {
      throw Error(ErrorCode::SpecInvalid, "connector_art must be distinct-notch or symmetric");
    }
    const auto side = j.value("marker_side", std::string("none"));
    if (side == "front") {
      s.marker_side = MarkerSide::Front;
    } else if (side == "back") {
      s.marker_side = MarkerSide::Back;
    } else if (side == "none") {
      s.marker_side = MarkerSide::None;
    } else {
      throw Error(ErrorCode::SpecInvalid, "marker_side must be front, back or none");
    }
    s.connector_reversed = j.value("connector_reversed", s.connector_reversed);
    s.blur_radius = j.value("blur_radius", s.blur_radius);
    s.seed = j.value("seed", s.seed);
    s.frame_width = j.value("frame_width", s.frame_width);
    s.frame_height = j.value("frame_height", s.frame_height);
    if (j.contains("wire_roi")) s.wire_roi = roi_from(j.at("wire_roi"));
    if (j.contains("connector_box")) s.connector_box = roi_from(j.at("connector_box"));
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SpecInvalid, std::string("harness spec: ") + e.what());
  }
}

}  // namespace wireinspect::synth
