#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wireinspect {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Rectangle in frame coordinates. Origin is the top-left pixel, y grows down.
struct Roi {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Roi&, const Roi&) = default;
};

/// Row-major 8-bit raster with a fixed channel count. Width and height are
/// always at least one.
template <int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster(int width, int height, std::uint8_t fill = 0);
  Raster(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<const std::uint8_t> row(int y) const noexcept {
    return {data_.data() + index(0, y), static_cast<std::size_t>(width_) * Channels};
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 protected:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * Channels;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

extern template class Raster<1>;
extern template class Raster<3>;

class RgbImage : public Raster<3> {
 public:
  using Raster<3>::Raster;
  RgbImage(int width, int height, Rgb fill);

  Rgb at(int x, int y) const noexcept {
    const auto i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, Rgb p) noexcept {
    const auto i = index(x, y);
    data_[i] = p.r;
    data_[i + 1] = p.g;
    data_[i + 2] = p.b;
  }
  std::span<std::uint8_t> mutable_data() noexcept { return data_; }
};

class GrayImage : public Raster<1> {
 public:
  using Raster<1>::Raster;

  std::uint8_t at(int x, int y) const noexcept { return data_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) noexcept { data_[index(x, y)] = v; }
};

/// Every element is exactly 0 or 255. In a background mask, 255 marks
/// background and 0 marks wire.
class BinaryMask : public Raster<1> {
 public:
  BinaryMask(int width, int height, bool on = false);
  /// Throws InvalidConfig if any element is not 0 or 255.
  BinaryMask(int width, int height, std::vector<std::uint8_t> data);

  std::uint8_t at(int x, int y) const noexcept { return data_[index(x, y)]; }
  bool on(int x, int y) const noexcept { return data_[index(x, y)] != 0; }
  void set(int x, int y, bool on) noexcept { data_[index(x, y)] = on ? 255 : 0; }
};

/// Hexcone HSV. h in degrees [0, 360), s and v in [0, 1]. Achromatic pixels
/// have h = 0.
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

/// Inclusive HSV box. When h_lo > h_hi the hue interval wraps through 0.
struct HsvRange {
  double h_lo = 0.0;
  double h_hi = 360.0;
  double s_lo = 0.0;
  double s_hi = 1.0;
  double v_lo = 0.0;
  double v_hi = 1.0;

  /// Background green used by the inspection jig.
  static HsvRange default_background();
  /// Green sticker used to mark the front of symmetrical connectors.
  static HsvRange default_marker();

  void validate() const;

  friend bool operator==(const HsvRange&, const HsvRange&) = default;
};

RgbImage crop_roi(const RgbImage& frame, const Roi& roi);
bool roi_within(const Roi& roi, int width, int height) noexcept;

HsvPixel rgb_to_hsv(Rgb p) noexcept;
Rgb hsv_to_rgb(const HsvPixel& p) noexcept;
bool hsv_in_range(const HsvPixel& p, const HsvRange& r) noexcept;

/// BT.601 luma, rounded and clamped.
GrayImage to_grayscale(const RgbImage& img);
std::uint8_t luma(Rgb p) noexcept;

}  // namespace wireinspect
