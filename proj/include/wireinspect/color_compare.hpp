#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "wireinspect/imaging.hpp"
#include "wireinspect/segmentation.hpp"

namespace wireinspect {

struct PatchSize {
  int width = 16;
  int height = 64;

  friend bool operator==(const PatchSize&, const PatchSize&) = default;
};

/// Pixel-wise mean colour of one wire over the training samples, at the
/// canonical patch size. RGB is in 8-bit units; HSV is normalised to [0, 1]
/// per channel (hue as degrees / 360).
struct ReferencePatch {
  int wire_index = 0;
  int width = 0;
  int height = 0;
  std::vector<double> mean_rgb;  // width * height * 3
  std::vector<double> mean_hsv;  // width * height * 3
  /// Set when some pixel's sample hues cancel out and the hue mean is undefined.
  bool hue_low_confidence = false;

  friend bool operator==(const ReferencePatch&, const ReferencePatch&) = default;
};

struct ColorScore {
  int wire_index = 0;
  double mse_rgb = 0.0;
  double mse_hsv = 0.0;
};

struct Thresholds {
  double t_match_rgb = 0.0;
  double t_mismatch_rgb = 0.0;
  double t_match_hsv = 0.0;
  double t_mismatch_hsv = 0.0;

  void validate() const;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

enum class WireVerdict { Match, Mismatch, Unclear };

std::string_view to_string(WireVerdict v);

inline constexpr int kMinTrainingSamples = 5;
inline constexpr double kMatchFloorRgb = 25.0;
inline constexpr double kMatchFloorHsv = 0.0025;

/// Nearest-neighbour resample of the box region to the canonical size.
RgbImage resample_patch(const RgbImage& cropped, const WireBox& box, PatchSize size = {});

/// One training sample: a cropped frame and its wire boxes.
struct SampleView {
  RgbImage cropped;
  std::vector<WireBox> boxes;
};

/// Mean of already-resampled patches of one wire. RGB and saturation/value
/// are arithmetic means; hue is the circular mean.
ReferencePatch reference_from_patches(int wire_index, std::span<const RgbImage> patches);

/// Throws SampleCountTooLow below five samples and WireCountInconsistent when
/// the samples disagree on the wire count.
std::vector<ReferencePatch> mean_patches(std::span<const SampleView> samples, PatchSize size = {});

double mse_rgb(const RgbImage& test, const ReferencePatch& ref);
double mse_hsv(const RgbImage& test, const ReferencePatch& ref);
double mse_rgb(const ReferencePatch& a, const ReferencePatch& b);
double mse_hsv(const ReferencePatch& a, const ReferencePatch& b);

ColorScore score_patch(const RgbImage& test, const ReferencePatch& ref);

/// Per space: Match at or below t_match, Mismatch at or above t_mismatch,
/// Unclear between. Both spaces must Match; either space's Mismatch wins.
WireVerdict classify_wire(const ColorScore& score, const Thresholds& th);

/// patches[w][s] is wire w in training sample s. Returns one Thresholds per
/// wire from leave-one-out statistics and the separation between wires.
std::vector<Thresholds> calibrate_thresholds(const std::vector<std::vector<RgbImage>>& patches);

}  // namespace wireinspect
