#include "wireinspect/color_compare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wireinspect/error.hpp"

namespace wireinspect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct NormalizedHsv {
  double h, s, v;
};

NormalizedHsv normalized_hsv(Rgb p) {
  const auto hsv = rgb_to_hsv(p);
  return {std::fmod(hsv.h, 360.0) / 360.0, hsv.s, hsv.v};
}

double hue_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

void require_same_shape(int w1, int h1, int w2, int h2) {
  if (w1 != w2 || h1 != h2) {
    throw Error(ErrorCode::ShapeMismatch, "patch " + std::to_string(w1) + "x" +
                                              std::to_string(h1) + " vs reference " +
                                              std::to_string(w2) + "x" + std::to_string(h2));
  }
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - out.mean) * (x - out.mean);
  out.stddev = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

}  // namespace

std::string_view to_string(WireVerdict v) {
  switch (v) {
    case WireVerdict::Match: return "Match";
    case WireVerdict::Mismatch: return "Mismatch";
    case WireVerdict::Unclear: return "Unclear";
  }
  return "Unclear";
}

void Thresholds::validate() const {
  if (!(t_match_rgb >= 0.0 && t_match_rgb < t_mismatch_rgb && t_match_hsv >= 0.0 &&
        t_match_hsv < t_mismatch_hsv)) {
    throw Error(ErrorCode::InvalidConfig, "thresholds need 0 <= t_match < t_mismatch per space");
  }
}

RgbImage resample_patch(const RgbImage& cropped, const WireBox& box, PatchSize size) {
  const int w = box.x_right - box.x_left;
  const int h = box.y_bottom - box.y_top + 1;
  if (w < 1 || h < 1) {
    throw Error(ErrorCode::DegenerateBox, "wire " + std::to_string(box.index) + " box is empty");
  }
  if (box.x_left < 0 || box.y_top < 0 || box.x_right > cropped.width() ||
      box.y_bottom >= cropped.height()) {
    throw Error(ErrorCode::RoiOutOfBounds, "wire box lies outside the cropped frame");
  }
  RgbImage out(size.width, size.height);
  for (int j = 0; j < size.height; ++j) {
    const int sy = box.y_top + ((2 * j + 1) * h) / (2 * size.height);
    for (int i = 0; i < size.width; ++i) {
      const int sx = box.x_left + ((2 * i + 1) * w) / (2 * size.width);
      out.set(i, j, cropped.at(sx, sy));
    }
  }
  return out;
}

ReferencePatch reference_from_patches(int wire_index, std::span<const RgbImage> patches) {
  if (patches.empty()) {
    throw Error(ErrorCode::SampleCountTooLow, "no patches to average");
  }
  const int w = patches.front().width();
  const int h = patches.front().height();
  for (const auto& p : patches) require_same_shape(p.width(), p.height(), w, h);

  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  ReferencePatch ref;
  ref.wire_index = wire_index;
  ref.width = w;
  ref.height = h;
  ref.mean_rgb.assign(pixels * 3, 0.0);
  ref.mean_hsv.assign(pixels * 3, 0.0);
  std::vector<double> hue_cos(pixels, 0.0);
  std::vector<double> hue_sin(pixels, 0.0);

  for (const auto& patch : patches) {
    const auto src = patch.data();
    for (std::size_t i = 0; i < pixels; ++i) {
      const Rgb p{src[3 * i], src[3 * i + 1], src[3 * i + 2]};
      ref.mean_rgb[3 * i] += p.r;
      ref.mean_rgb[3 * i + 1] += p.g;
      ref.mean_rgb[3 * i + 2] += p.b;
      const auto hsv = normalized_hsv(p);
      hue_cos[i] += std::cos(kTwoPi * hsv.h);
      hue_sin[i] += std::sin(kTwoPi * hsv.h);
      ref.mean_hsv[3 * i + 1] += hsv.s;
      ref.mean_hsv[3 * i + 2] += hsv.v;
    }
  }

  const double n = static_cast<double>(patches.size());
  for (auto& v : ref.mean_rgb) v /= n;
  for (std::size_t i = 0; i < pixels; ++i) {
    const double resultant = std::hypot(hue_cos[i], hue_sin[i]) / n;
    double hue = 0.0;
    if (resultant < 1e-9) {
      ref.hue_low_confidence = true;
    } else {
      hue = std::atan2(hue_sin[i], hue_cos[i]) / kTwoPi;
      if (hue < 0.0) hue += 1.0;
      if (hue >= 1.0) hue -= 1.0;
    }
    ref.mean_hsv[3 * i] = hue;
    ref.mean_hsv[3 * i + 1] /= n;
    ref.mean_hsv[3 * i + 2] /= n;
  }
  return ref;
}

std::vector<ReferencePatch> mean_patches(std::span<const SampleView> samples, PatchSize size) {
  if (static_cast<int>(samples.size()) < kMinTrainingSamples) {
    throw Error(ErrorCode::SampleCountTooLow,
                "training needs a minimum of five correct samples, got " +
                    std::to_string(samples.size()));
  }
  const std::size_t wires = samples.front().boxes.size();
  for (const auto& s : samples) {
    if (s.boxes.size() != wires) {
      throw Error(ErrorCode::WireCountInconsistent, "samples disagree on the wire count");
    }
  }
  std::vector<ReferencePatch> refs;
  refs.reserve(wires);
  for (std::size_t w = 0; w < wires; ++w) {
    std::vector<RgbImage> patches;
    patches.reserve(samples.size());
    for (const auto& s : samples) patches.push_back(resample_patch(s.cropped, s.boxes[w], size));
    refs.push_back(reference_from_patches(static_cast<int>(w), patches));
  }
  return refs;
}

double mse_rgb(const RgbImage& test, const ReferencePatch& ref) {
  require_same_shape(test.width(), test.height(), ref.width, ref.height);
  const auto src = test.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double d = static_cast<double>(src[i]) - ref.mean_rgb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(src.size());
}

double mse_hsv(const RgbImage& test, const ReferencePatch& ref) {
  require_same_shape(test.width(), test.height(), ref.width, ref.height);
  const auto src = test.data();
  const std::size_t pixels = src.size() / 3;
  double acc = 0.0;
  for (std::size_t i = 0; i < pixels; ++i) {
    const auto hsv = normalized_hsv({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
    const double dh = hue_distance(hsv.h, ref.mean_hsv[3 * i]);
    const double ds = hsv.s - ref.mean_hsv[3 * i + 1];
    const double dv = hsv.v - ref.mean_hsv[3 * i + 2];
    acc += dh * dh + ds * ds + dv * dv;
  }
  return acc / static_cast<double>(pixels * 3);
}

double mse_rgb(const ReferencePatch& a, const ReferencePatch& b) {
  require_same_shape(a.width, a.height, b.width, b.height);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.mean_rgb.size(); ++i) {
    const double d = a.mean_rgb[i] - b.mean_rgb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.mean_rgb.size());
}

double mse_hsv(const ReferencePatch& a, const ReferencePatch& b) {
  require_same_shape(a.width, a.height, b.width, b.height);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.mean_hsv.size(); i += 3) {
    const double dh = hue_distance(a.mean_hsv[i], b.mean_hsv[i]);
    const double ds = a.mean_hsv[i + 1] - b.mean_hsv[i + 1];
    const double dv = a.mean_hsv[i + 2] - b.mean_hsv[i + 2];
    acc += dh * dh + ds * ds + dv * dv;
  }
  return acc / static_cast<double>(a.mean_hsv.size());
}

ColorScore score_patch(const RgbImage& test, const ReferencePatch& ref) {
  return {ref.wire_index, mse_rgb(test, ref), mse_hsv(test, ref)};
}

WireVerdict classify_wire(const ColorScore& score, const Thresholds& th) {
  const auto per_space = [](double mse, double t_match, double t_mismatch) {
    if (mse <= t_match) return WireVerdict::Match;
    if (mse >= t_mismatch) return WireVerdict::Mismatch;
    return WireVerdict::Unclear;
  };
  const auto rgb = per_space(score.mse_rgb, th.t_match_rgb, th.t_mismatch_rgb);
  const auto hsv = per_space(score.mse_hsv, th.t_match_hsv, th.t_mismatch_hsv);
  if (rgb == WireVerdict::Mismatch || hsv == WireVerdict::Mismatch) return WireVerdict::Mismatch;
  if (rgb == WireVerdict::Match && hsv == WireVerdict::Match) return WireVerdict::Match;
  return WireVerdict::Unclear;
}

std::vector<Thresholds> calibrate_thresholds(const std::vector<std::vector<RgbImage>>& patches) {
  if (patches.empty()) return {};
  const std::size_t samples = patches.front().size();
  for (const auto& per_wire : patches) {
    if (per_wire.size() != samples) {
      throw Error(ErrorCode::WireCountInconsistent, "wires were seen in different sample counts");
    }
  }
  if (static_cast<int>(samples) < kMinTrainingSamples) {
    throw Error(ErrorCode::SampleCountTooLow,
                "threshold calibration needs a minimum of five correct samples");
  }

  const std::size_t wires = patches.size();
  std::vector<ReferencePatch> refs;
  std::vector<Thresholds> out(wires);
  for (std::size_t w = 0; w < wires; ++w) {
    std::vector<double> loo_rgb(samples), loo_hsv(samples);
    for (std::size_t s = 0; s < samples; ++s) {
      std::vector<RgbImage> others;
      others.reserve(samples - 1);
      for (std::size_t o = 0; o < samples; ++o) {
        if (o != s) others.push_back(patches[w][o]);
      }
      const auto ref = reference_from_patches(static_cast<int>(w), others);
      loo_rgb[s] = mse_rgb(patches[w][s], ref);
      loo_hsv[s] = mse_hsv(patches[w][s], ref);
    }
    const auto rgb = mean_std(loo_rgb);
    const auto hsv = mean_std(loo_hsv);
    refs.push_back(reference_from_patches(static_cast<int>(w), patches[w]));
    out[w].t_match_rgb = rgb.mean + 3.0 * rgb.stddev + kMatchFloorRgb;
    out[w].t_match_hsv = hsv.mean + 3.0 * hsv.stddev + kMatchFloorHsv;
    if (refs.back().hue_low_confidence) out[w].t_match_hsv *= 2.0;
  }

  for (std::size_t w = 0; w < wires; ++w) {
    double min_rgb = std::numeric_limits<double>::infinity();
    double min_hsv = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < wires; ++v) {
      if (v == w) continue;
      const double d_rgb = mse_rgb(refs[w], refs[v]);
      // Indistinguishable colours may legitimately repeat within a harness.
      if (d_rgb <= out[w].t_match_rgb) continue;
      min_rgb = std::min(min_rgb, d_rgb);
      min_hsv = std::min(min_hsv, mse_hsv(refs[w], refs[v]));
    }
    out[w].t_mismatch_rgb = 4.0 * out[w].t_match_rgb;
    out[w].t_mismatch_hsv = 4.0 * out[w].t_match_hsv;
    if (std::isfinite(min_rgb)) {
      out[w].t_mismatch_rgb = std::max(out[w].t_mismatch_rgb, 0.5 * min_rgb);
      out[w].t_mismatch_hsv = std::max(out[w].t_mismatch_hsv, 0.5 * min_hsv);
    }
  }
  return out;
}

}  // namespace wireinspect
