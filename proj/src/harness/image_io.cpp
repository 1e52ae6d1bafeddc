#include "abme/harness/image_io.hpp"

#include <png.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace abme::harness {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Framed read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw std::runtime_error("cannot read " + path.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw std::runtime_error("cannot decode " + path.string() + ": " + image.message);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  Framed frame(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        frame(x, y, c) = buffer[static_cast<std::size_t>((y * w + x) * 3 + c)] / 255.0;
  return frame;
}

void write_png(const std::filesystem::path& path, const Framed& frame) {
  const int w = frame.width();
  const int h = frame.height();
  std::vector<png_byte> buffer(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        buffer[static_cast<std::size_t>((y * w + x) * 3 + c)] = to_byte(frame(x, y, frame.channels() == 3 ? c : 0));

  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw std::runtime_error("cannot write " + path.string() + ": " + image.message);
}

Framed quantize8(const Framed& frame) {
  Framed out = frame;
  for (int c = 0; c < out.channels(); ++c)
    out.channel(c) = out.channel(c).unaryExpr([](double v) { return to_byte(v) / 255.0; });
  return out;
}

}  // namespace abme::harness
