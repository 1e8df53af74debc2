#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wireinspect/color_compare.hpp"
#include "wireinspect/gradient.hpp"
#include "wireinspect/imaging.hpp"
#include "wireinspect/orientation.hpp"
#include "wireinspect/segmentation.hpp"

namespace wireinspect {

inline constexpr int kProfileFormatVersion = 1;

/// One camera view of a harness.
struct ViewSpec {
  std::string view_id;
  Roi roi;
  int expected_wires = 0;
  HsvRange bg_range = HsvRange::default_background();
  ScanLineConfig scan;
  GradientConfig gradient;
  /// Before training a DistinctOrientation carries only its ROI; training
  /// fills in the reference embedding and the similarity threshold.
  std::optional<OrientationSpec> orientation;

  /// Scan rows and gradient segment limits derived from the ROI.
  static ViewSpec with_defaults(std::string view_id, Roi roi, int expected_wires);

  void validate() const;

  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

struct ViewReference {
  std::vector<ReferencePatch> patches;
  std::vector<Thresholds> thresholds;
  /// Median training box width; used to judge whether a wrong wire count is
  /// a real placement error or a segmentation failure.
  double nominal_wire_width = 0.0;

  friend bool operator==(const ViewReference&, const ViewReference&) = default;
};

struct TrainedProfile {
  std::string profile_id;
  std::string harness_type;
  int format_version = kProfileFormatVersion;
  std::string extractor_version;
  PatchSize patch_size;
  std::vector<ViewSpec> views;
  std::vector<ViewReference> references;  // parallel to views
  std::string created_at;                 // ISO 8601, UTC
  int sample_count = 0;
  std::vector<std::string> sample_sources;

  /// Throws CorruptProfile when shapes disagree with the views.
  void validate() const;

  friend bool operator==(const TrainedProfile&, const TrainedProfile&) = default;
};

struct TrainOptions {
  std::string profile_id;  // empty: random 16-hex id
  std::string created_at;  // empty: now
  std::vector<std::string> sample_sources;
  PatchSize patch_size;
  /// Derive each distinct-connector similarity threshold from the training
  /// crops and their mirror images instead of keeping the configured value.
  bool calibrate_similarity = true;
};

/// samples[v][s] is training frame s for view v. Throws SampleCountTooLow
/// below five samples, WireCountInconsistent when views disagree on the sample
/// count, and TrainingSampleUnclear naming the first sample that does not
/// segment cleanly.
TrainedProfile train(const std::string& harness_type, const std::vector<ViewSpec>& views,
                     const std::vector<std::vector<RgbImage>>& samples,
                     const TrainOptions& options = {},
                     const EmbeddingExtractor& extractor = default_extractor());

enum class Verdict { Pass, Fail, Unclear };

std::string_view to_string(Verdict v);

struct WireResult {
  WireBox box;
  ColorScore score;
  WireVerdict verdict = WireVerdict::Unclear;
};

struct ViewResult {
  std::string view_id;
  SegmentationPath segmentation = SegmentationPath::Unclear;
  std::string segmentation_detail;
  /// Both primary scan rows agree on a plausible but wrong wire count.
  bool placement_mismatch = false;
  int expected_wires = 0;
  int observed_wires = -1;
  std::vector<WireResult> wires;
  std::optional<OrientationCheck> orientation;
  Verdict verdict = Verdict::Unclear;
};

struct InspectionResult {
  std::string profile_id;
  std::vector<ViewResult> views;
  Verdict overall = Verdict::Unclear;
  std::string message;

  /// Indices of Mismatch wires in view `view`.
  std::vector<int> mismatched_wires(std::size_t view = 0) const;
};

/// Fail if anything is Mismatch or Reversed, else Unclear if anything is
/// Unclear, else Pass.
Verdict overall_verdict(std::span<const WireVerdict> wires,
                        std::span<const OrientationVerdict> orientations);

/// Per-view verdict; a placement mismatch counts as a failure and an
/// unclear segmentation as unclear.
Verdict view_verdict(const ViewResult& view);
Verdict overall_verdict(std::span<const ViewResult> views);

/// Throws ProfileVersionMismatch when the profile format or extractor
/// version differs from this build, and InvalidConfig when the frame count
/// differs from the view count.
InspectionResult inspect(const std::vector<RgbImage>& frames, const TrainedProfile& profile,
                         const EmbeddingExtractor& extractor = default_extractor());

/// Horizontal mirror; training uses it as a stand-in for a reversed connector.
RgbImage mirror_horizontal(const RgbImage& img);

}  // namespace wireinspect
