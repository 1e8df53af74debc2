#include "wireinspect/profile.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <limits>
#include <random>

#include "wireinspect/error.hpp"

namespace wireinspect {

namespace {

// Observed runs narrower or wider than this fraction of the trained wire
// width are segmentation artefacts, not missing or extra wires.
constexpr double kPlausibleWidthLo = 0.5;
constexpr double kPlausibleWidthHi = 1.5;
// A connector region with less than this share of the weakest training
// sample's edge energy is judged out of focus.
constexpr double kSharpnessFloor = 0.5;

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string random_id() {
  std::random_device rd;
  const std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string sample_name(const TrainOptions& opt, std::size_t s) {
  if (s < opt.sample_sources.size()) return "'" + opt.sample_sources[s] + "'";
  return "#" + std::to_string(s);
}

std::optional<OrientationSpec> train_orientation(const ViewSpec& view,
                                                 const std::vector<RgbImage>& frames,
                                                 const TrainOptions& opt,
                                                 const EmbeddingExtractor& extractor) {
  if (!view.orientation) return std::nullopt;
  if (const auto* sym = std::get_if<SymmetricOrientation>(&*view.orientation)) {
    auto s = *sym;
    s.min_edge_energy = 0.0;
    double weakest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const auto check = verify_orientation(frames[i], s, extractor);
      if (check.verdict != OrientationVerdict::Correct) {
        throw Error(ErrorCode::TrainingSampleUnclear,
                    "view '" + view.view_id + "' sample " + sample_name(opt, i) +
                        ": orientation marker not found");
      }
      weakest = std::min(weakest, edge_energy(crop_roi(frames[i], s.marker_roi)));
    }
    s.min_edge_energy = kSharpnessFloor * weakest;
    return s;
  }

  auto d = std::get<DistinctOrientation>(*view.orientation);
  std::vector<EmbeddingVector> genuine;
  std::vector<EmbeddingVector> mirrored;
  double weakest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!roi_within(d.connector_roi, frames[i].width(), frames[i].height())) {
      throw Error(ErrorCode::RoiOutOfBounds, "view '" + view.view_id + "' sample " +
                                                 sample_name(opt, i) +
                                                 ": connector region outside the frame");
    }
    const auto crop = crop_roi(frames[i], d.connector_roi);
    weakest = std::min(weakest, edge_energy(crop));
    genuine.push_back(extractor.extract(crop));
    mirrored.push_back(extractor.extract(mirror_horizontal(crop)));
    if (genuine.back().l2_norm == 0.0) {
      throw Error(ErrorCode::TrainingSampleUnclear, "view '" + view.view_id + "' sample " +
                                                        sample_name(opt, i) +
                                                        ": connector region has no features");
    }
  }
  d.reference = mean_embedding(genuine);
  d.min_edge_energy = kSharpnessFloor * weakest;
  if (opt.calibrate_similarity) {
    double min_genuine = 1.0;
    double max_mirrored = -1.0;
    for (const auto& e : genuine) min_genuine = std::min(min_genuine, cosine_similarity(e, d.reference));
    for (const auto& e : mirrored) {
      if (e.l2_norm > 0.0) max_mirrored = std::max(max_mirrored, cosine_similarity(e, d.reference));
    }
    d.similarity_threshold = calibrate_similarity_threshold(min_genuine, max_mirrored);
  }
  return d;
}

/// Wrong wire count that both primary rows agree on, with every run a
/// plausible single-wire width. Returns the count, or nullopt.
std::optional<int> plausible_placement_error(const Segmentation& seg, int expected,
                                             double nominal_width) {
  if (seg.observed_top.empty() || seg.observed_top.size() != seg.observed_bottom.size()) {
    return std::nullopt;
  }
  const int count = static_cast<int>(seg.observed_top.size());
  if (count == expected) return std::nullopt;
  const auto plausible = [&](const std::vector<Interval>& runs) {
    return std::all_of(runs.begin(), runs.end(), [&](const Interval& r) {
      return r.width() >= kPlausibleWidthLo * nominal_width &&
             r.width() <= kPlausibleWidthHi * nominal_width;
    });
  };
  if (!plausible(seg.observed_top) || !plausible(seg.observed_bottom)) return std::nullopt;
  return count;
}

std::string describe_failure(const InspectionResult& r) {
  std::string out;
  const auto append = [&](const std::string& s) { out += (out.empty() ? "" : "; ") + s; };
  for (std::size_t v = 0; v < r.views.size(); ++v) {
    const auto& view = r.views[v];
    const std::string where = r.views.size() > 1 ? " in view '" + view.view_id + "'" : "";
    if (view.placement_mismatch) {
      append("found " + std::to_string(view.observed_wires) + " wires" + where + ", expected " +
             std::to_string(view.expected_wires));
    }
    const auto bad = r.mismatched_wires(v);
    if (!bad.empty()) {
      std::string list;
      for (int i : bad) list += (list.empty() ? "" : ", ") + std::to_string(i);
      append("wrong colour at wire " + list + where);
    }
    if (view.orientation && view.orientation->verdict == OrientationVerdict::Reversed) {
      append("connector reversed" + where);
    }
  }
  return out;
}

}  // namespace

ViewSpec ViewSpec::with_defaults(std::string view_id, Roi roi, int expected_wires) {
  ViewSpec v;
  v.view_id = std::move(view_id);
  v.roi = roi;
  v.expected_wires = expected_wires;
  v.scan = ScanLineConfig::for_height(roi.height);
  v.gradient = GradientConfig::for_layout(roi.width, std::max(1, expected_wires));
  return v;
}

void ViewSpec::validate() const {
  if (view_id.empty()) throw Error(ErrorCode::InvalidConfig, "view_id must not be empty");
  if (expected_wires < 1) {
    throw Error(ErrorCode::InvalidConfig, "view '" + view_id + "': expected_wires must be >= 1");
  }
  if (roi.width < 2 || roi.height < 1) {
    throw Error(ErrorCode::InvalidConfig, "view '" + view_id + "': ROI too small");
  }
  bg_range.validate();
  scan.validate(roi.height);
  gradient.validate();
  if (orientation) wireinspect::validate(*orientation);
}

void TrainedProfile::validate() const {
  const auto corrupt = [](const std::string& why) { throw Error(ErrorCode::CorruptProfile, why); };
  if (views.empty()) corrupt("profile has no views");
  if (references.size() != views.size()) corrupt("reference count differs from view count");
  if (sample_count < kMinTrainingSamples) corrupt("profile records fewer than five samples");
  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto n = static_cast<std::size_t>(views[v].expected_wires);
    const auto& ref = references[v];
    if (ref.patches.size() != n || ref.thresholds.size() != n) {
      corrupt("view '" + views[v].view_id + "': reference shape differs from expected_wires");
    }
    for (const auto& p : ref.patches) {
      const auto cells = static_cast<std::size_t>(patch_size.width) * patch_size.height * 3;
      if (p.width != patch_size.width || p.height != patch_size.height ||
          p.mean_rgb.size() != cells || p.mean_hsv.size() != cells) {
        corrupt("view '" + views[v].view_id + "': reference patch has the wrong size");
      }
    }
  }
}

RgbImage mirror_horizontal(const RgbImage& img) {
  RgbImage out(img.width(), img.height(), Rgb{});
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.set(img.width() - 1 - x, y, img.at(x, y));
  }
  return out;
}

TrainedProfile train(const std::string& harness_type, const std::vector<ViewSpec>& views,
                     const std::vector<std::vector<RgbImage>>& samples, const TrainOptions& options,
                     const EmbeddingExtractor& extractor) {
  if (views.empty()) throw Error(ErrorCode::InvalidConfig, "at least one view is required");
  for (const auto& v : views) v.validate();
  if (samples.size() != views.size()) {
    throw Error(ErrorCode::InvalidConfig, "got samples for " + std::to_string(samples.size()) +
                                              " views, configured " + std::to_string(views.size()));
  }
  const std::size_t count = samples.front().size();
  for (const auto& per_view : samples) {
    if (per_view.size() != count) {
      throw Error(ErrorCode::WireCountInconsistent, "every view needs the same number of samples");
    }
  }
  if (count < static_cast<std::size_t>(kMinTrainingSamples)) {
    throw Error(ErrorCode::SampleCountTooLow, "training needs a minimum of five correct samples, got " +
                                                  std::to_string(count));
  }

  TrainedProfile p;
  p.profile_id = options.profile_id.empty() ? random_id() : options.profile_id;
  p.harness_type = harness_type;
  p.extractor_version = extractor.version();
  p.patch_size = options.patch_size;
  p.created_at = options.created_at.empty() ? now_iso8601() : options.created_at;
  p.sample_count = static_cast<int>(count);
  p.sample_sources = options.sample_sources;
  p.views = views;

  for (std::size_t v = 0; v < views.size(); ++v) {
    const auto& view = views[v];
    const auto n = static_cast<std::size_t>(view.expected_wires);
    std::vector<std::vector<RgbImage>> patches(n);
    std::vector<double> widths;
    for (std::size_t s = 0; s < count; ++s) {
      const auto cropped = crop_roi(samples[v][s], view.roi);
      const auto seg = segment_wires(cropped, view.bg_range, view.scan, view.expected_wires,
                                     view.gradient);
      if (seg.unclear()) {
        throw Error(ErrorCode::TrainingSampleUnclear, "view '" + view.view_id + "' sample " +
                                                          sample_name(options, s) + ": " + seg.detail);
      }
      for (std::size_t w = 0; w < n; ++w) {
        patches[w].push_back(resample_patch(cropped, seg.boxes[w], options.patch_size));
        widths.push_back(seg.boxes[w].x_right - seg.boxes[w].x_left);
      }
    }
    ViewReference ref;
    for (std::size_t w = 0; w < n; ++w) {
      ref.patches.push_back(reference_from_patches(static_cast<int>(w), patches[w]));
    }
    ref.thresholds = calibrate_thresholds(patches);
    ref.nominal_wire_width = median(std::move(widths));
    p.references.push_back(std::move(ref));
    p.views[v].orientation = train_orientation(view, samples[v], options, extractor);
  }
  p.validate();
  return p;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "Pass";
    case Verdict::Fail: return "Fail";
    case Verdict::Unclear: return "Unclear";
  }
  return "Unclear";
}

std::vector<int> InspectionResult::mismatched_wires(std::size_t view) const {
  std::vector<int> out;
  if (view >= views.size()) return out;
  for (const auto& w : views[view].wires) {
    if (w.verdict == WireVerdict::Mismatch) out.push_back(w.box.index);
  }
  return out;
}

Verdict overall_verdict(std::span<const WireVerdict> wires,
                        std::span<const OrientationVerdict> orientations) {
  bool unclear = false;
  for (auto w : wires) {
    if (w == WireVerdict::Mismatch) return Verdict::Fail;
    unclear |= w == WireVerdict::Unclear;
  }
  for (auto o : orientations) {
    if (o == OrientationVerdict::Reversed) return Verdict::Fail;
    unclear |= o == OrientationVerdict::Unclear;
  }
  return unclear ? Verdict::Unclear : Verdict::Pass;
}

Verdict view_verdict(const ViewResult& view) {
  std::vector<WireVerdict> wires;
  for (const auto& w : view.wires) wires.push_back(w.verdict);
  std::vector<OrientationVerdict> orient;
  if (view.orientation) orient.push_back(view.orientation->verdict);
  const auto v = overall_verdict(wires, orient);
  if (v == Verdict::Fail || view.placement_mismatch) return Verdict::Fail;
  if (view.segmentation == SegmentationPath::Unclear) return Verdict::Unclear;
  return v;
}

Verdict overall_verdict(std::span<const ViewResult> views) {
  bool unclear = false;
  for (const auto& v : views) {
    const auto verdict = view_verdict(v);
    if (verdict == Verdict::Fail) return Verdict::Fail;
    unclear |= verdict == Verdict::Unclear;
  }
  return unclear ? Verdict::Unclear : Verdict::Pass;
}

InspectionResult inspect(const std::vector<RgbImage>& frames, const TrainedProfile& profile,
                         const EmbeddingExtractor& extractor) {
  if (profile.format_version != kProfileFormatVersion) {
    throw Error(ErrorCode::ProfileVersionMismatch,
                "profile format " + std::to_string(profile.format_version) + ", this build reads " +
                    std::to_string(kProfileFormatVersion));
  }
  if (profile.extractor_version != extractor.version()) {
    throw Error(ErrorCode::ProfileVersionMismatch, "profile was trained with extractor '" +
                                                       profile.extractor_version + "', running '" +
                                                       extractor.version() + "'");
  }
  if (frames.size() != profile.views.size()) {
    throw Error(ErrorCode::InvalidConfig, "got " + std::to_string(frames.size()) +
                                              " frames for " + std::to_string(profile.views.size()) +
                                              " views");
  }

  InspectionResult result;
  result.profile_id = profile.profile_id;
  for (std::size_t v = 0; v < frames.size(); ++v) {
    const auto& view = profile.views[v];
    const auto& ref = profile.references[v];
    ViewResult vr;
    vr.view_id = view.view_id;
    vr.expected_wires = view.expected_wires;

    const auto cropped = crop_roi(frames[v], view.roi);
    const auto seg = segment_wires(cropped, view.bg_range, view.scan, view.expected_wires,
                                   view.gradient);
    vr.segmentation = seg.path;
    vr.segmentation_detail = seg.detail;
    if (seg.unclear()) {
      if (auto count = plausible_placement_error(seg, view.expected_wires, ref.nominal_wire_width)) {
        vr.placement_mismatch = true;
        vr.observed_wires = *count;
      }
    } else {
      vr.observed_wires = static_cast<int>(seg.boxes.size());
      for (std::size_t w = 0; w < seg.boxes.size(); ++w) {
        const auto patch = resample_patch(cropped, seg.boxes[w], profile.patch_size);
        WireResult wr;
        wr.box = seg.boxes[w];
        wr.score = score_patch(patch, ref.patches[w]);
        wr.verdict = classify_wire(wr.score, ref.thresholds[w]);
        vr.wires.push_back(wr);
      }
    }
    if (view.orientation) vr.orientation = verify_orientation(frames[v], *view.orientation, extractor);
    vr.verdict = view_verdict(vr);
    result.views.push_back(std::move(vr));
  }

  result.overall = overall_verdict(result.views);
  switch (result.overall) {
    case Verdict::Pass: result.message = "Pass"; break;
    case Verdict::Unclear: result.message = "Image not clear"; break;
    case Verdict::Fail: result.message = "Fail: " + describe_failure(result); break;
  }
  return result;
}

}  // namespace wireinspect
