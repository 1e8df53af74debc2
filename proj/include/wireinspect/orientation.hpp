#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wireinspect/imaging.hpp"

namespace wireinspect {

struct EmbeddingVector {
  std::vector<double> values;
  double l2_norm = 0.0;

  static EmbeddingVector from_values(std::vector<double> values);

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Turns a connector patch into a fixed-length descriptor. The version string
/// is written into profiles so a profile is never scored with a different
/// extractor than the one that produced its reference.
class EmbeddingExtractor {
 public:
  virtual ~EmbeddingExtractor() = default;

  virtual std::string version() const = 0;
  virtual std::size_t length() const = 0;
  /// Throws EmptyPatch on an image with no pixels.
  virtual EmbeddingVector extract(const RgbImage& patch) const = 0;
};

/// Default descriptor: a 4x4 grid of saturation-weighted 8-bin hue
/// histograms followed by a 4x4 grid of magnitude-weighted 8-bin gradient
/// orientation histograms. Spatial and angular binning are both linear
/// (soft), so a one-pixel shift moves mass between neighbouring cells rather
/// than flipping it. Each half is L2-normalised, then the whole vector is.
class GridHistogramExtractor final : public EmbeddingExtractor {
 public:
  static constexpr int kGrid = 4;
  static constexpr int kBins = 8;
  /// Luma gradients weaker than this are treated as sensor noise.
  static constexpr double kMinGradient = 24.0;

  std::string version() const override { return "grid-hist-v1"; }
  std::size_t length() const override { return 2 * kGrid * kGrid * kBins; }
  EmbeddingVector extract(const RgbImage& patch) const override;
};

const EmbeddingExtractor& default_extractor();

/// Throws ZeroVector if either vector has zero magnitude; the result is
/// clamped to [-1, 1].
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Connector with distinguishable sides, checked against a reference embedding.
struct DistinctOrientation {
  EmbeddingVector reference;
  double similarity_threshold = 0.85;
  Roi connector_roi;
  /// Below this edge_energy the region is too blurred to judge (0 disables).
  double min_edge_energy = 0.0;

  friend bool operator==(const DistinctOrientation&, const DistinctOrientation&) = default;
};

/// Symmetrical connector carrying a coloured marker on its front face.
struct SymmetricOrientation {
  HsvRange marker_range = HsvRange::default_marker();
  Roi marker_roi;
  double min_area_frac = 0.02;
  double min_edge_energy = 0.0;

  friend bool operator==(const SymmetricOrientation&, const SymmetricOrientation&) = default;
};

using OrientationSpec = std::variant<DistinctOrientation, SymmetricOrientation>;

void validate(const OrientationSpec& spec);

enum class OrientationVerdict { Correct, Reversed, Unclear };

std::string_view to_string(OrientationVerdict v);

struct OrientationCheck {
  OrientationVerdict verdict = OrientationVerdict::Unclear;
  /// Cosine similarity (distinct) or marker area fraction (symmetric).
  double score = 0.0;
  std::string detail;
};

/// Mean luma gradient magnitude per pixel, counting only pixels at or above
/// GridHistogramExtractor::kMinGradient. Blur spreads edges below that level,
/// so this falls towards zero on an out-of-focus region.
double edge_energy(const RgbImage& region);

double marker_fraction(const RgbImage& frame, const SymmetricOrientation& spec);
bool detect_marker(const RgbImage& frame, const SymmetricOrientation& spec);

OrientationCheck verify_orientation(const RgbImage& frame, const OrientationSpec& spec,
                                    const EmbeddingExtractor& extractor = default_extractor());

/// Midpoint between the weakest genuine similarity and the strongest reversed
/// similarity, clamped to [0.6, 0.99].
double calibrate_similarity_threshold(double correct_similarity, double reversed_similarity);

/// L2-normalised mean of several embeddings; used to build a reference.
EmbeddingVector mean_embedding(const std::vector<EmbeddingVector>& embeddings);

}  // namespace wireinspect
