#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "wireinspect/imaging.hpp"
#include "wireinspect/orientation.hpp"
#include "wireinspect/segmentation.hpp"

namespace wireinspect::synth {

enum class ConnectorArt { DistinctNotch, Symmetric };
enum class MarkerSide { Front, Back, None };

/// Ground-truth description of one rendered harness view.
///
/// Wires are solid vertical bands laid out left to right and centred in the
/// wire ROI. In ROI coordinates the left edge of wire i on row y is
///   start + i * (wire_width + gap) + round(slant * y / (roi.height - 1))
/// and each wire is wire_width pixels wide. The connector sits above the ROI;
/// wires run from its bottom edge to the bottom of the frame.
struct HarnessSpec {
  std::vector<Rgb> wire_colors;
  int wire_width = 22;
  int gap = 4;
  int slant = 0;
  Rgb background{40, 160, 60};
  double noise_sigma = 0.0;
  bool text_artifacts = false;
  int reflection_bands = 0;
  ConnectorArt connector_art = ConnectorArt::DistinctNotch;
  MarkerSide marker_side = MarkerSide::None;
  bool connector_reversed = false;
  int blur_radius = 0;
  std::uint64_t seed = 0;
  int frame_width = 400;
  int frame_height = 240;
  Roi wire_roi{40, 100, 320, 120};
  Roi connector_box{70, 24, 260, 56};

  void validate() const;

  friend bool operator==(const HarnessSpec&, const HarnessSpec&) = default;
};

struct GroundTruth {
  /// Wire ROI cut from the final frame.
  RgbImage cropped;
  std::vector<WireBox> boxes;
  /// Geometric background mask of the wire ROI (before blur and noise).
  BinaryMask background_mask;
  /// Wire runs on the first and last ROI rows.
  std::vector<Interval> top_edges;
  std::vector<Interval> bottom_edges;
  OrientationVerdict orientation = OrientationVerdict::Correct;
  Roi connector_box;
  std::optional<Roi> marker_box;
};

struct Rendered {
  RgbImage frame;
  GroundTruth truth;
};

/// Deterministic: the same spec (including seed) yields identical bytes.
Rendered generate(const HarnessSpec& spec);

struct SwapWires {
  int i = 0;
  int j = 0;
};
struct ReverseConnector {};
/// Pulls the wire out of cavity `from` and inserts it at cavity `to`
/// (default: the last cavity); the wires in between close up.
struct ShiftWire {
  int from = 0;
  std::optional<int> to;
};
struct DropWire {
  int index = 0;
};

using Defect = std::variant<SwapWires, ReverseConnector, ShiftWire, DropWire>;

/// Returns a new spec embodying the defect; throws IndexOutOfRange on bad
/// wire indices.
HarnessSpec permute_defect(const HarnessSpec& spec, const Defect& defect);

/// Corpus variants: an optional harness defect plus optional blur, which is
/// an image-quality problem rather than a harness defect.
struct Variant {
  std::optional<Defect> defect;
  int blur_radius = 0;
};

/// Parses "none", "swap:i,j", "reverse_connector", "shift_wire:i[,j]",
/// "drop_wire:i" and "blur[:r]". Throws SpecInvalid on anything else.
Variant parse_variant(std::string_view text);
std::string to_string(const Variant& v);

HarnessSpec apply_variant(const HarnessSpec& spec, const Variant& v);

/// "Pass", "Fail" or "Unclear": what a correct inspector reports for `v`
/// applied to a known-good `spec`.
std::string expected_verdict(const HarnessSpec& spec, const Variant& v);

std::optional<Rgb> named_color(std::string_view name);
std::vector<std::string> palette_names();
/// Eight-wire harness whose neighbours differ by at least 90 grey levels.
std::vector<Rgb> reference_harness_colors();

nlohmann::json to_json(const HarnessSpec& spec);
HarnessSpec spec_from_json(const nlohmann::json& j);

/// Frame position of the connector region to inspect for orientation: the
/// connector box plus a 6 px margin on the left, right and top.
Roi connector_roi(const HarnessSpec& spec);
/// Frame position of the marker sticker region (the whole connector face).
Roi marker_roi(const HarnessSpec& spec);

}  // namespace wireinspect::synth
