#include "wireinspect/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wireinspect/error.hpp"

namespace wireinspect {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidConfig,
                "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

template <int Channels>
Raster<Channels>::Raster(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
}

template <int Channels>
Raster<Channels>::Raster(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != static_cast<std::size_t>(width) * height * Channels) {
    throw Error(ErrorCode::ShapeMismatch, "raster data length does not match " +
                                              std::to_string(width) + "x" +
                                              std::to_string(height));
  }
}

template class Raster<1>;
template class Raster<3>;

RgbImage::RgbImage(int width, int height, Rgb fill) : Raster<3>(width, height) {
  for (std::size_t i = 0; i < data_.size(); i += 3) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
  }
}

BinaryMask::BinaryMask(int width, int height, bool on)
    : Raster<1>(width, height, on ? 255 : 0) {}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : Raster<1>(width, height, std::move(data)) {
  if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v != 0 && v != 255; })) {
    throw Error(ErrorCode::InvalidConfig, "binary mask elements must be 0 or 255");
  }
}

HsvRange HsvRange::default_background() { return {90.0, 150.0, 0.35, 1.0, 0.25, 1.0}; }

HsvRange HsvRange::default_marker() { return {100.0, 160.0, 0.45, 1.0, 0.30, 1.0}; }

void HsvRange::validate() const {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(h_lo >= 0.0 && h_lo <= 360.0 && h_hi >= 0.0 && h_hi <= 360.0)) {
    throw Error(ErrorCode::InvalidConfig, "hue bounds must lie in [0, 360]");
  }
  if (!(in_unit(s_lo) && in_unit(s_hi) && s_lo <= s_hi)) {
    throw Error(ErrorCode::InvalidConfig, "saturation bounds must satisfy 0 <= s_lo <= s_hi <= 1");
  }
  if (!(in_unit(v_lo) && in_unit(v_hi) && v_lo <= v_hi)) {
    throw Error(ErrorCode::InvalidConfig, "value bounds must satisfy 0 <= v_lo <= v_hi <= 1");
  }
}

bool roi_within(const Roi& roi, int width, int height) noexcept {
  return roi.width >= 1 && roi.height >= 1 && roi.x >= 0 && roi.y >= 0 &&
         roi.x + roi.width <= width && roi.y + roi.height <= height;
}

RgbImage crop_roi(const RgbImage& frame, const Roi& roi) {
  if (!roi_within(roi, frame.width(), frame.height())) {
    throw Error(ErrorCode::RoiOutOfBounds,
                "roi (" + std::to_string(roi.x) + "," + std::to_string(roi.y) + "," +
                    std::to_string(roi.width) + "," + std::to_string(roi.height) +
                    ") exceeds frame " + std::to_string(frame.width()) + "x" +
                    std::to_string(frame.height()));
  }
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(roi.width) * roi.height * 3);
  for (int y = 0; y < roi.height; ++y) {
    const auto src = frame.row(roi.y + y).subspan(static_cast<std::size_t>(roi.x) * 3,
                                                   static_cast<std::size_t>(roi.width) * 3);
    out.insert(out.end(), src.begin(), src.end());
  }
  return RgbImage(roi.width, roi.height, std::move(out));
}

HsvPixel rgb_to_hsv(Rgb p) noexcept {
  const int r = p.r, g = p.g, b = p.b;
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int delta = mx - mn;

  HsvPixel out;
  out.v = mx / 255.0;
  out.s = mx == 0 ? 0.0 : static_cast<double>(delta) / mx;
  if (delta == 0) {
    out.h = 0.0;
    return out;
  }
  double h;
  if (mx == r) {
    h = 60.0 * static_cast<double>(g - b) / delta;
  } else if (mx == g) {
    h = 60.0 * (static_cast<double>(b - r) / delta + 2.0);
  } else {
    h = 60.0 * (static_cast<double>(r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

Rgb hsv_to_rgb(const HsvPixel& p) noexcept {
  const double c = p.v * p.s;
  const double hp = std::fmod(p.h, 360.0) / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c, g = x;
  } else if (hp < 2) {
    r = x, g = c;
  } else if (hp < 3) {
    g = c, b = x;
  } else if (hp < 4) {
    g = x, b = c;
  } else if (hp < 5) {
    r = x, b = c;
  } else {
    r = c, b = x;
  }
  const double m = p.v - c;
  const auto to8 = [m](double ch) {
    return static_cast<std::uint8_t>(std::clamp(std::lround((ch + m) * 255.0), 0L, 255L));
  };
  return {to8(r), to8(g), to8(b)};
}

bool hsv_in_range(const HsvPixel& p, const HsvRange& r) noexcept {
  const bool hue_ok =
      r.h_lo <= r.h_hi ? (p.h >= r.h_lo && p.h <= r.h_hi) : (p.h >= r.h_lo || p.h <= r.h_hi);
  return hue_ok && p.s >= r.s_lo && p.s <= r.s_hi && p.v >= r.v_lo && p.v <= r.v_hi;
}

std::uint8_t luma(Rgb p) noexcept {
  // Exact in integers: 0.299 R + 0.587 G + 0.114 B, rounded half up.
  const int y = (299 * p.r + 587 * p.g + 114 * p.b + 500) / 1000;
  return static_cast<std::uint8_t>(std::min(y, 255));
}

GrayImage to_grayscale(const RgbImage& img) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(img.width()) * img.height());
  const auto src = img.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = luma({src[3 * i], src[3 * i + 1], src[3 * i + 2]});
  }
  return GrayImage(img.width(), img.height(), std::move(out));
}

}  // namespace wireinspect
