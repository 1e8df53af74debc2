#include "wireinspect/orientation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wireinspect/error.hpp"

namespace wireinspect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SoftBin {
  int lo;
  int hi;
  double w_hi;  // weight of `hi`; `lo` receives 1 - w_hi
};

/// Linear split of a continuous cell coordinate between its two nearest cell
/// centres, clamped at the border cells.
SoftBin spatial_bin(double pos, int extent, int cells) {
  const double c = (pos + 0.5) * cells / extent - 0.5;
  const int lo = static_cast<int>(std::floor(c));
  const double f = c - lo;
  if (lo < 0) return {0, 0, 0.0};
  if (lo >= cells - 1) return {cells - 1, cells - 1, 0.0};
  return {lo, lo + 1, f};
}

/// Circular split of a value in [0, 1) over `bins` bins.
SoftBin circular_bin(double unit, int bins) {
  const double c = unit * bins - 0.5;
  const int lo = static_cast<int>(std::floor(c));
  const double f = c - lo;
  return {(lo + bins) % bins, (lo + 1 + bins) % bins, f};
}

void normalize(std::span<double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq <= 0.0) return;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& x : v) x *= inv;
}

}  // namespace

EmbeddingVector EmbeddingVector::from_values(std::vector<double> values) {
  EmbeddingVector out;
  double sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "embedding holds a non-finite value");
    sq += v * v;
  }
  out.values = std::move(values);
  out.l2_norm = std::sqrt(sq);
  return out;
}

EmbeddingVector GridHistogramExtractor::extract(const RgbImage& patch) const {
  const int w = patch.width();
  const int h = patch.height();
  if (w < 1 || h < 1 || patch.data().empty()) {
    throw Error(ErrorCode::EmptyPatch, "cannot embed an empty patch");
  }
  constexpr int kCells = kGrid * kGrid;
  std::vector<double> values(length(), 0.0);
  std::span<double> hue_part(values.data(), kCells * kBins);
  std::span<double> grad_part(values.data() + kCells * kBins, kCells * kBins);

  const auto gray = to_grayscale(patch);
  const auto luma_at = [&](int x, int y) {
    return static_cast<double>(gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
  };

  for (int y = 0; y < h; ++y) {
    const auto by = spatial_bin(y, h, kGrid);
    for (int x = 0; x < w; ++x) {
      const auto bx = spatial_bin(x, w, kGrid);
      const double cell_w[4] = {(1 - bx.w_hi) * (1 - by.w_hi), bx.w_hi * (1 - by.w_hi),
                                (1 - bx.w_hi) * by.w_hi, bx.w_hi * by.w_hi};
      const int cell_i[4] = {by.lo * kGrid + bx.lo, by.lo * kGrid + bx.hi,
                             by.hi * kGrid + bx.lo, by.hi * kGrid + bx.hi};

      const auto deposit = [&](std::span<double> part, const SoftBin& bin, double mass) {
        for (int k = 0; k < 4; ++k) {
          if (cell_w[k] == 0.0) continue;
          part[cell_i[k] * kBins + bin.lo] += mass * cell_w[k] * (1.0 - bin.w_hi);
          part[cell_i[k] * kBins + bin.hi] += mass * cell_w[k] * bin.w_hi;
        }
      };

      const auto hsv = rgb_to_hsv(patch.at(x, y));
      if (hsv.s > 0.0) deposit(hue_part, circular_bin(hsv.h / 360.0, kBins), hsv.s);

      const double gx = luma_at(x + 1, y) - luma_at(x - 1, y);
      const double gy = luma_at(x, y + 1) - luma_at(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag >= kMinGradient) {
        double theta = std::atan2(gy, gx);
        if (theta < 0.0) theta += kTwoPi;
        deposit(grad_part, circular_bin(std::min(theta / kTwoPi, std::nextafter(1.0, 0.0)), kBins),
                mag);
      }
    }
  }
  normalize(hue_part);
  normalize(grad_part);
  normalize(values);
  return EmbeddingVector::from_values(std::move(values));
}

const EmbeddingExtractor& default_extractor() {
  static const GridHistogramExtractor extractor;
  return extractor;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::ShapeMismatch, "embeddings differ in length");
  }
  if (a.l2_norm == 0.0 || b.l2_norm == 0.0) {
    throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector is undefined");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot / (a.l2_norm * b.l2_norm), -1.0, 1.0);
}

void validate(const OrientationSpec& spec) {
  if (const auto* d = std::get_if<DistinctOrientation>(&spec)) {
    if (!(d->similarity_threshold > 0.0 && d->similarity_threshold <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "similarity_threshold must lie in (0, 1]");
    }
    if (!(d->min_edge_energy >= 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "min_edge_energy must be non-negative");
    }
  } else {
    const auto& s = std::get<SymmetricOrientation>(spec);
    if (!(s.min_area_frac > 0.0 && s.min_area_frac < 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "min_area_frac must lie in (0, 1)");
    }
    if (!(s.min_edge_energy >= 0.0)) {
      throw Error(ErrorCode::InvalidConfig, "min_edge_energy must be non-negative");
    }
    s.marker_range.validate();
  }
}

std::string_view to_string(OrientationVerdict v) {
  switch (v) {
    case OrientationVerdict::Correct: return "Correct";
    case OrientationVerdict::Reversed: return "Reversed";
    case OrientationVerdict::Unclear: return "Unclear";
  }
  return "Unclear";
}

double edge_energy(const RgbImage& region) {
  const auto gray = to_grayscale(region);
  const int w = gray.width();
  const int h = gray.height();
  const auto at = [&](int x, int y) {
    return static_cast<double>(gray.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
  };
  double sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double mag = std::hypot(at(x + 1, y) - at(x - 1, y), at(x, y + 1) - at(x, y - 1));
      if (mag >= GridHistogramExtractor::kMinGradient) sum += mag;
    }
  }
  return sum / (static_cast<double>(w) * h);
}

double marker_fraction(const RgbImage& frame, const SymmetricOrientation& spec) {
  const auto region = crop_roi(frame, spec.marker_roi);
  const auto src = region.data();
  const std::size_t pixels = src.size() / 3;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pixels; ++i) {
    if (hsv_in_range(rgb_to_hsv({src[3 * i], src[3 * i + 1], src[3 * i + 2]}),
                     spec.marker_range)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(pixels);
}

bool detect_marker(const RgbImage& frame, const SymmetricOrientation& spec) {
  return marker_fraction(frame, spec) >= spec.min_area_frac;
}

OrientationCheck verify_orientation(const RgbImage& frame, const OrientationSpec& spec,
                                    const EmbeddingExtractor& extractor) {
  OrientationCheck out;
  if (const auto* d = std::get_if<DistinctOrientation>(&spec)) {
    if (!roi_within(d->connector_roi, frame.width(), frame.height())) {
      out.detail = "connector region lies outside the frame";
      return out;
    }
    const auto crop = crop_roi(frame, d->connector_roi);
    if (d->min_edge_energy > 0.0 && edge_energy(crop) < d->min_edge_energy) {
      out.detail = "connector region is out of focus";
      return out;
    }
    const auto emb = extractor.extract(crop);
    if (emb.l2_norm == 0.0 || d->reference.l2_norm == 0.0) {
      out.detail = "connector region has no usable features";
      return out;
    }
    out.score = cosine_similarity(emb, d->reference);
    out.verdict = out.score >= d->similarity_threshold ? OrientationVerdict::Correct
                                                       : OrientationVerdict::Reversed;
    return out;
  }

  const auto& s = std::get<SymmetricOrientation>(spec);
  if (!roi_within(s.marker_roi, frame.width(), frame.height())) {
    out.detail = "marker region lies outside the frame";
    return out;
  }
  if (s.min_edge_energy > 0.0 && edge_energy(crop_roi(frame, s.marker_roi)) < s.min_edge_energy) {
    out.detail = "marker region is out of focus";
    return out;
  }
  out.score = marker_fraction(frame, s);
  out.verdict = out.score >= s.min_area_frac ? OrientationVerdict::Correct
                                             : OrientationVerdict::Reversed;
  if (out.verdict == OrientationVerdict::Reversed) out.detail = "orientation marker not found";
  return out;
}

double calibrate_similarity_threshold(double correct_similarity, double reversed_similarity) {
  return std::clamp(0.5 * (correct_similarity + reversed_similarity), 0.6, 0.99);
}

EmbeddingVector mean_embedding(const std::vector<EmbeddingVector>& embeddings) {
  if (embeddings.empty()) throw Error(ErrorCode::EmptyPatch, "no embeddings to average");
  std::vector<double> acc(embeddings.front().values.size(), 0.0);
  for (const auto& e : embeddings) {
    if (e.values.size() != acc.size()) {
      throw Error(ErrorCode::ShapeMismatch, "embeddings differ in length");
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += e.values[i];
  }
  normalize(acc);
  return EmbeddingVector::from_values(std::move(acc));
}

}  // namespace wireinspect
