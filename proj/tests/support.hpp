#pragma once

#include "abme/abme.hpp"

#include <random>

namespace abme::testing {

inline Framed random_frame(std::mt19937_64& rng, int w, int h, int channels = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Framed f(w, h, channels);
  for (int c = 0; c < channels; ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) f(x, y, c) = u(rng);
  return f;
}

/// Smooth random texture: a coarse random lattice resized bilinearly, plus
/// a finer lattice at lower amplitude.
inline Framed smooth_frame(std::mt19937_64& rng, int w, int h, int channels = 3) {
  Framed f(w, h, channels);
  for (int c = 0; c < channels; ++c) {
    const Framed coarse = random_frame(rng, std::max(2, w / 6), std::max(2, h / 6), 1);
    const Framed fine = random_frame(rng, std::max(2, w / 3), std::max(2, h / 3), 1);
    f.channel(c) = 0.15 + 0.5 * detail::resize_bilinear(coarse.channel(0), w, h) +
                   0.2 * detail::resize_bilinear(fine.channel(0), w, h);
  }
  return f;
}

inline MotionFieldd random_field(std::mt19937_64& rng, int w, int h, double magnitude) {
  std::uniform_real_distribution<double> u(-magnitude, magnitude);
  MotionFieldd f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) f.set(x, y, u(rng), u(rng));
  return f;
}

/// Frame shifted by an integer offset: out(x,y) = src(x - sx, y - sy), clamped.
inline Framed shifted(const Framed& src, int sx, int sy) {
  Framed out(src.width(), src.height(), src.channels());
  for (int c = 0; c < src.channels(); ++c)
    for (int y = 0; y < src.height(); ++y)
      for (int x = 0; x < src.width(); ++x)
        out(x, y, c) = src(std::clamp(x - sx, 0, src.width() - 1), std::clamp(y - sy, 0, src.height() - 1), c);
  return out;
}

}  // namespace abme::testing
