#pragma once

#include "abme/core.hpp"

#include <filesystem>

namespace abme::harness {

/// Decodes an 8-bit PNG (gray, RGB, or with alpha) to an RGB frame in [0,1].
/// Throws std::runtime_error on I/O or decode failure.
Framed read_png(const std::filesystem::path& path);

/// Encodes as 8-bit RGB (gray frames are replicated), rounding half away
/// from zero after clamping to [0,1].
void write_png(const std::filesystem::path& path, const Framed& frame);

/// Quantizes to the 8-bit grid write_png would store.
Framed quantize8(const Framed& frame);

}  // namespace abme::harness
