#pragma once

#include "abme/core.hpp"

#include <cmath>

namespace abme {

enum class SplatMode { Average, Softmax };

template <typename Scalar>
struct SplatResult {
  Frame<Scalar> frame;
  /// Splat coverage clamped to [0,1]; 0 marks a hole.
  Mask<Scalar> weight;
};

/// output(x,y) = target(x + dx, y + dy).
template <typename Scalar>
Frame<Scalar> backward_warp(const MotionField<Scalar>& field, const Frame<Scalar>& target,
                            BorderMode border = BorderMode::Clamp) {
  detail::require(field.same_size(target), "backward_warp: field and target differ in size");
  Frame<Scalar> out(target.width(), target.height(), target.channels());
  for_each_row(target.height(), [&](int y) {
    for (int x = 0; x < target.width(); ++x) {
      const Scalar sx = Scalar(x) + field.dx()(y, x);
      const Scalar sy = Scalar(y) + field.dy()(y, x);
      for (int c = 0; c < target.channels(); ++c)
        out.channel(c)(y, x) = detail::sample_plane(target.channel(c), sx, sy, border);
    }
  });
  return out;
}

/// Backward warp of the all-ones image with zero padding. A value below one
/// means the sample footprint leaves the frame.
template <typename Scalar>
Mask<Scalar> warp_mask(const MotionField<Scalar>& field) {
  const Frame<Scalar> ones(field.width(), field.height(), 1, Scalar(1));
  return Mask<Scalar>(backward_warp(field, ones, BorderMode::Zero).channel(0));
}

/// Scatters each source texel bilinearly to (x + dx, y + dy). Accumulation
/// is serial so the result is independent of the thread count.
template <typename Scalar>
SplatResult<Scalar> forward_splat(const Frame<Scalar>& source, const MotionField<Scalar>& field,
                                  SplatMode mode = SplatMode::Average, const Mask<Scalar>* importance = nullptr) {
  detail::require(field.same_size(source), "forward_splat: field and source differ in size");
  if (mode == SplatMode::Softmax) {
    detail::require(importance != nullptr, "forward_splat: softmax mode needs an importance mask");
    detail::require(importance->width() == source.width() && importance->height() == source.height(),
                    "forward_splat: importance mask differs in size");
  }
  const int w = source.width();
  const int h = source.height();
  const int channels = source.channels();
  std::vector<Plane<Scalar>> acc(static_cast<std::size_t>(channels), Plane<Scalar>::Zero(h, w));
  Plane<Scalar> norm = Plane<Scalar>::Zero(h, w);
  Plane<Scalar> coverage = Plane<Scalar>::Zero(h, w);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Scalar tx = Scalar(x) + field.dx()(y, x);
      const Scalar ty = Scalar(y) + field.dy()(y, x);
      if (!(tx > Scalar(-1) && ty > Scalar(-1) && tx < Scalar(w) && ty < Scalar(h))) continue;
      const Scalar scale = mode == SplatMode::Softmax ? std::exp((*importance)(x, y)) : Scalar(1);
      const int x0 = static_cast<int>(std::floor(tx));
      const int y0 = static_cast<int>(std::floor(ty));
      const Scalar fx = tx - Scalar(x0);
      const Scalar fy = ty - Scalar(y0);
      const Scalar taps[4] = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
      const int tap_x[4] = {x0, x0 + 1, x0, x0 + 1};
      const int tap_y[4] = {y0, y0, y0 + 1, y0 + 1};
      for (int k = 0; k < 4; ++k) {
        const int xi = tap_x[k];
        const int yi = tap_y[k];
        if (taps[k] == Scalar(0) || xi < 0 || yi < 0 || xi >= w || yi >= h) continue;
        const Scalar weight = taps[k] * scale;
        for (int c = 0; c < channels; ++c) acc[static_cast<std::size_t>(c)](yi, xi) += weight * source(x, y, c);
        norm(yi, xi) += weight;
        coverage(yi, xi) += taps[k];
      }
    }
  }

  SplatResult<Scalar> out{Frame<Scalar>(w, h, channels), Mask<Scalar>(coverage.min(Scalar(1)))};
  for (int c = 0; c < channels; ++c)
    out.frame.channel(c) = (norm > Scalar(0)).select(acc[static_cast<std::size_t>(c)] / norm, Scalar(0));
  return out;
}

namespace detail {

template <typename Scalar>
void require_time(Scalar t, const char* who) {
  require(t > Scalar(0) && t < Scalar(1), std::string(who) + ": t must lie in (0,1)");
}

/// (1-t)*a + t*b written so that a == b reproduces a exactly.
template <typename Scalar>
Frame<Scalar> temporal_blend(const Frame<Scalar>& a, const Frame<Scalar>& b, Scalar t) {
  Frame<Scalar> out = a;
  for (int c = 0; c < a.channels(); ++c) out.channel(c) = a.channel(c) + t * (b.channel(c) - a.channel(c));
  return out;
}

}  // namespace detail

/// Forward-warping interpolation with fields scaled from the inter-frame flows.
/// A texel reached from one side only takes that side; texels reached from
/// neither fall back to the blend of the unwarped inputs.
template <typename Scalar>
Frame<Scalar> interp_forward(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1,
                             const MotionField<Scalar>& flow01, const MotionField<Scalar>& flow10, Scalar t) {
  detail::require_time(t, "interp_forward");
  detail::require(frame0.same_shape(frame1) && flow01.same_size(frame0) && flow10.same_size(frame0),
                  "interp_forward: inputs differ in size");
  const MotionField<Scalar> v0t(flow01.dx() * t, flow01.dy() * t);
  const MotionField<Scalar> v1t(flow10.dx() * (1 - t), flow10.dy() * (1 - t));
  const auto s0 = forward_splat(frame0, v0t);
  const auto s1 = forward_splat(frame1, v1t);
  const Frame<Scalar> both = detail::temporal_blend(s0.frame, s1.frame, t);
  const Frame<Scalar> fallback = detail::temporal_blend(frame0, frame1, t);

  Frame<Scalar> out = both;
  const auto has0 = s0.weight.values() > Scalar(0);
  const auto has1 = s1.weight.values() > Scalar(0);
  for (int c = 0; c < out.channels(); ++c) {
    out.channel(c) = (has0 && has1).select(both.channel(c),
                                           has0.select(s0.frame.channel(c),
                                                       has1.select(s1.frame.channel(c), fallback.channel(c))));
  }
  return out;
}

/// (1-t) * warp(I0 by Vt0) + t * warp(I1 by Vt1), clamped borders.
template <typename Scalar>
Frame<Scalar> interp_backward(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1,
                              const MotionField<Scalar>& vt0, const MotionField<Scalar>& vt1, Scalar t) {
  detail::require_time(t, "interp_backward");
  detail::require(frame0.same_shape(frame1), "interp_backward: frames differ in shape");
  return detail::temporal_blend(backward_warp(vt0, frame0), backward_warp(vt1, frame1), t);
}

}  // namespace abme
