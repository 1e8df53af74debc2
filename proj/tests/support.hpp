#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wireinspect/profile.hpp"
#include "wireinspect/synth.hpp"

namespace wireinspect::testkit {

/// Eight-wire reference harness with a distinct connector and light noise.
inline synth::HarnessSpec reference_spec(std::uint64_t seed = 0, double noise = 3.0) {
  synth::HarnessSpec s;
  s.wire_colors = synth::reference_harness_colors();
  s.noise_sigma = noise;
  s.seed = seed;
  return s;
}

inline ViewSpec view_for(const synth::HarnessSpec& spec, bool orientation = true) {
  auto v = ViewSpec::with_defaults("front", spec.wire_roi, static_cast<int>(spec.wire_colors.size()));
  if (orientation) {
    if (spec.connector_art == synth::ConnectorArt::DistinctNotch) {
      v.orientation = DistinctOrientation{{}, 0.85, synth::connector_roi(spec)};
    } else {
      SymmetricOrientation s;
      s.marker_roi = synth::marker_roi(spec);
      v.orientation = s;
    }
  }
  return v;
}

inline std::vector<RgbImage> frames(const synth::HarnessSpec& spec, int count,
                                    std::uint64_t first_seed) {
  std::vector<RgbImage> out;
  for (int i = 0; i < count; ++i) {
    auto s = spec;
    s.seed = first_seed + static_cast<std::uint64_t>(i);
    out.push_back(synth::generate(s).frame);
  }
  return out;
}

inline TrainedProfile train_on(const synth::HarnessSpec& spec, int samples,
                               std::uint64_t first_seed = 1000, bool orientation = true) {
  TrainOptions opts;
  opts.profile_id = "test-profile";
  opts.created_at = "2026-01-01T00:00:00Z";
  return train("ref8", {view_for(spec, orientation)}, {frames(spec, samples, first_seed)}, opts);
}

inline Verdict inspect_one(const synth::HarnessSpec& spec, const TrainedProfile& p) {
  return inspect({synth::generate(spec).frame}, p).overall;
}

/// Reference implementation of hexcone HSV written independently of the
/// library (normalised-difference form). Hue in degrees.
inline HsvPixel hsv_oracle(Rgb p) {
  const double r = p.r / 255.0, g = p.g / 255.0, b = p.b / 255.0;
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  HsvPixel out;
  out.v = maxc;
  if (maxc == minc) return out;
  out.s = (maxc - minc) / maxc;
  const double rc = (maxc - r) / (maxc - minc);
  const double gc = (maxc - g) / (maxc - minc);
  const double bc = (maxc - b) / (maxc - minc);
  double h;
  if (r == maxc) {
    h = bc - gc;
  } else if (g == maxc) {
    h = 2.0 + rc - bc;
  } else {
    h = 4.0 + gc - rc;
  }
  h = std::fmod(h / 6.0, 1.0);
  if (h < 0.0) h += 1.0;
  out.h = h * 360.0;
  return out;
}

inline RgbImage random_image(std::mt19937_64& rng, int w, int h) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * 3);
  std::uniform_int_distribution<int> byte(0, 255);
  for (auto& v : data) v = static_cast<std::uint8_t>(byte(rng));
  return RgbImage(w, h, std::move(data));
}

}  // namespace wireinspect::testkit
