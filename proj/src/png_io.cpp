#include "wireinspect/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "wireinspect/error.hpp"

namespace wireinspect {

namespace {

struct ImageGuard {
  png_image image{};
  ImageGuard() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~ImageGuard() { png_image_free(&image); }
};

RgbImage finish_read(ImageGuard& guard, const std::string& what) {
  guard.image.format = PNG_FORMAT_RGB;
  if (guard.image.width == 0 || guard.image.height == 0) {
    throw Error(ErrorCode::Io, what + ": empty PNG");
  }
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(guard.image));
  if (png_image_finish_read(&guard.image, nullptr, pixels.data(), 0, nullptr) == 0) {
    throw Error(ErrorCode::Io, what + ": " + guard.image.message);
  }
  return RgbImage(static_cast<int>(guard.image.width), static_cast<int>(guard.image.height),
                  std::move(pixels));
}

void prepare_write(ImageGuard& guard, const RgbImage& img) {
  guard.image.width = static_cast<png_uint_32>(img.width());
  guard.image.height = static_cast<png_uint_32>(img.height());
  guard.image.format = PNG_FORMAT_RGB;
}

}  // namespace

RgbImage read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  ImageGuard guard;
  if (bytes.empty() ||
      png_image_begin_read_from_memory(&guard.image, bytes.data(), bytes.size()) == 0) {
    throw Error(ErrorCode::Io, std::string("not a readable PNG: ") + guard.image.message);
  }
  return finish_read(guard, "PNG decode");
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  ImageGuard guard;
  prepare_write(guard, img);
  png_alloc_size_t size = 0;
  if (png_image_write_to_memory(&guard.image, nullptr, &size, 0, img.data().data(), 0,
                                nullptr) == 0) {
    throw Error(ErrorCode::Io, std::string("PNG encode: ") + guard.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (png_image_write_to_memory(&guard.image, out.data(), &size, 0, img.data().data(), 0,
                                nullptr) == 0) {
    throw Error(ErrorCode::Io, std::string("PNG encode: ") + guard.image.message);
  }
  out.resize(size);
  return out;
}

void write_png(const RgbImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::Io, "short write to " + path.string());
  }
}

}  // namespace wireinspect
