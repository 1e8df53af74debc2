#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wireinspect/imaging.hpp"

namespace wireinspect {

// 8-bit RGB PNG codec. Any PNG colour type is accepted on read and converted
// to RGB; alpha is composited away by libpng.

RgbImage read_png(const std::filesystem::path& path);
RgbImage decode_png(std::span<const std::uint8_t> bytes);

void write_png(const RgbImage& img, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

}  // namespace wireinspect
