#pragma once

#include "abme/core.hpp"
#include "abme/metrics.hpp"
#include "abme/motion.hpp"
#include "abme/warp.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace abme {

enum class CostKind { SAD, Census };

/// Knobs of the block-matching motion search.
struct SearchParams {
  int levels = 4;         ///< search pyramid depth; the finest search level is quarter resolution
  int radius = 3;         ///< integer search radius per level
  int patch = 7;          ///< odd matching window side
  CostKind cost = CostKind::SAD;
  int refine_levels = 2;  ///< asymmetric refinement runs at quarter then half resolution
  double beta = 20.0;     ///< reliability sharpness
  bool subpixel = true;

  void validate() const {
    detail::require(levels >= 1, "SearchParams: levels must be >= 1");
    detail::require(radius >= 1, "SearchParams: radius must be >= 1");
    detail::require(patch >= 3 && patch % 2 == 1, "SearchParams: patch must be odd and >= 3");
    detail::require(refine_levels == 2, "SearchParams: refine_levels is fixed at 2");
    detail::require(beta > 0.0, "SearchParams: beta must be positive");
  }
};

template <typename Scalar>
struct AnchorResult {
  Frame<Scalar> anchor;
  Mask<Scalar> mask_t0;
  Mask<Scalar> mask_t1;
};

/// Everything the bilateral estimator produces, at input resolution.
template <typename Scalar>
struct BilateralResult {
  MotionField<Scalar> vs_t0, vs_t1;  ///< symmetric pair, vs_t0 == -(t/(1-t)) vs_t1
  MotionField<Scalar> va_t0, va_t1;  ///< asymmetric pair, refined per direction
  Frame<Scalar> anchor;
  Mask<Scalar> reliability;
  std::pair<Mask<Scalar>, Mask<Scalar>> masks;  ///< warping masks of the symmetric pair
};

namespace detail {

/// Clamped bilinear read of all channels at once; same arithmetic as
/// sample_plane with BorderMode::Clamp.
template <typename Scalar>
inline void sample_clamped(const Frame<Scalar>& f, Scalar x, Scalar y, Scalar* out) {
  const int w = f.width();
  const int h = f.height();
  x = std::clamp(x, Scalar(0), Scalar(w - 1));
  y = std::clamp(y, Scalar(0), Scalar(h - 1));
  const Scalar fx0 = std::floor(x);
  const Scalar fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const Scalar fx = x - fx0;
  const Scalar fy = y - fy0;
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  for (int c = 0; c < f.channels(); ++c) {
    const auto& p = f.channel(c);
    out[c] = bilinear_texels(p(y0, x0), p(y0, x1), p(y1, x0), p(y1, x1), fx, fy);
  }
}

/// Samples a patch centered on (x, y), displaced by (dx, dy). Layout:
/// window row-major, channels innermost. With `inside`, also writes 1 for
/// texels whose sample position lies within the frame and 0 otherwise.
template <typename Scalar>
void gather_patch(const Frame<Scalar>& f, int x, int y, int half, Scalar dx, Scalar dy, Scalar* out,
                  Scalar* inside = nullptr) {
  const int channels = f.channels();
  const Scalar xmax = Scalar(f.width() - 1);
  const Scalar ymax = Scalar(f.height() - 1);
  for (int j = -half; j <= half; ++j) {
    const Scalar sy = Scalar(y + j) + dy;
    for (int i = -half; i <= half; ++i) {
      const Scalar sx = Scalar(x + i) + dx;
      sample_clamped(f, sx, sy, out);
      out += channels;
      if (inside) *inside++ = (sx >= Scalar(0) && sx <= xmax && sy >= Scalar(0) && sy <= ymax) ? Scalar(1) : Scalar(0);
    }
  }
}

template <typename Scalar>
void gather_weights(const Plane<Scalar>& weights, int x, int y, int half, Scalar* out) {
  const int w = static_cast<int>(weights.cols());
  const int h = static_cast<int>(weights.rows());
  for (int j = -half; j <= half; ++j) {
    const int yy = std::clamp(y + j, 0, h - 1);
    for (int i = -half; i <= half; ++i) *out++ = weights(yy, std::clamp(x + i, 0, w - 1));
  }
}

/// Number of texels of the window around (x, y) that lie in a w x h frame.
inline int window_footprint(int x, int y, int half, int w, int h) {
  const int cols = std::min(x + half, w - 1) - std::max(x - half, 0) + 1;
  const int rows = std::min(y + half, h - 1) - std::max(y - half, 0) + 1;
  return cols * rows;
}

/// Matching cost between two gathered patches of `count` texels: the mean
/// per-texel term, each term scaled by its weight and by whether both
/// samples fell inside their frames. Samples outside a frame carry no
/// information, so they are left out; a candidate keeping fewer than half
/// of the window's own in-frame texels (`footprint`) costs +infinity.
template <typename Scalar>
Scalar patch_cost(const Scalar* a, const Scalar* b, const Scalar* weights, const Scalar* inside, int footprint,
                  int count, int channels, CostKind kind) {
  if (inside) {
    Scalar valid = 0;
    for (int k = 0; k < count; ++k) valid += inside[k];
    if (Scalar(2) * valid < Scalar(footprint)) return std::numeric_limits<Scalar>::infinity();
  }
  auto mean_at = [channels](const Scalar* p, int k) {
    Scalar s = 0;
    for (int c = 0; c < channels; ++c) s += p[k * channels + c];
    return s / Scalar(channels);
  };
  const int center = count / 2;
  const Scalar ac = kind == CostKind::Census ? mean_at(a, center) : Scalar(0);
  const Scalar bc = kind == CostKind::Census ? mean_at(b, center) : Scalar(0);

  Scalar total = 0;
  Scalar mass = 0;
  for (int k = 0; k < count; ++k) {
    Scalar term = 0;
    if (kind == CostKind::SAD) {
      for (int c = 0; c < channels; ++c) term += std::abs(a[k * channels + c] - b[k * channels + c]);
      term /= Scalar(channels);
    } else {
      if (k == center) continue;
      term = census::soft_hamming(census::signature(mean_at(a, k) - ac), census::signature(mean_at(b, k) - bc));
    }
    Scalar m = weights ? weights[k] : Scalar(1);
    if (inside) m *= inside[k];
    total += m * term;
    mass += m;
  }
  if (!weights && !inside) return total / Scalar(kind == CostKind::SAD ? count : count - 1);
  return total / std::max(mass, Scalar(1e-12));
}

/// Samples the square of texels (x + a, y + b), a, b in [-reach, reach],
/// displaced by (dx, dy). Layout matches gather_patch.
template <typename Scalar>
void gather_region(const Frame<Scalar>& f, int x, int y, int reach, Scalar dx, Scalar dy, Scalar* out,
                   Scalar* inside) {
  gather_patch(f, x, y, reach, dx, dy, out, inside);
}

/// Copies the patch of side `patch` at offset (ox, oy) from the center of a
/// gathered region of side `region`.
template <typename Scalar>
void crop_patch(const Scalar* region, int region_side, int patch, int ox, int oy, int channels, Scalar* out) {
  const int half = patch / 2;
  const int center = region_side / 2;
  for (int j = -half; j <= half; ++j) {
    const Scalar* row = region + ((center + oy + j) * region_side + (center + ox - half)) * channels;
    out = std::copy(row, row + patch * channels, out);
  }
}

/// One level of exhaustive block matching. For every pixel p the candidates
/// are v = init(p) + d with integer d in [-radius, radius]^2; the cost
/// compares `source` sampled at p + source_scale * v with `target` sampled
/// at p + v. Ties go to the smallest |d|^2, then to the first candidate in
/// row-major order.
///
/// Each pixel samples its whole search region once and slices candidate
/// windows out of it; sampling positions agree with a per-candidate read up
/// to floating-point rounding, and exactly when init(p) is integral.
template <typename Scalar>
MotionField<Scalar> search_level(const Frame<Scalar>& source, Scalar source_scale, const Frame<Scalar>& target,
                                 const MotionField<Scalar>& init, const Plane<Scalar>* weights, int radius,
                                 int patch, CostKind kind, bool subpixel) {
  require(source.same_shape(target), "search: source and target differ in shape");
  require(init.same_size(source), "search: initial field differs in size from the frames");
  if (weights)
    require(weights->cols() == source.width() && weights->rows() == source.height(),
            "search: weights differ in size from the frames");
  require(radius >= 0, "search: radius must be >= 0");

  const int half = patch / 2;
  const int count = patch * patch;
  const int channels = source.channels();
  const int side = 2 * radius + 1;
  const bool moving_source = source_scale != Scalar(0);
  // An integral source scale shifts the source window by whole texels per
  // candidate, so the source can be region-sampled too.
  const bool source_region = moving_source && source_scale == std::round(source_scale);
  const int source_step = source_region ? static_cast<int>(source_scale) : 0;
  const int target_reach = half + radius;
  const int source_reach = half + std::abs(source_step) * radius;
  const int target_side = 2 * target_reach + 1;
  const int source_side = 2 * source_reach + 1;
  MotionField<Scalar> out(source.width(), source.height());

  for_each_row(source.height(), [&](int y) {
    std::vector<Scalar> a(static_cast<std::size_t>(count * channels));
    std::vector<Scalar> b(a.size());
    std::vector<Scalar> w(static_cast<std::size_t>(count));
    std::vector<Scalar> target_region(static_cast<std::size_t>(target_side * target_side * channels));
    std::vector<Scalar> source_region_buf(source_region ? static_cast<std::size_t>(source_side * source_side * channels)
                                                        : 0U);
    std::vector<Scalar> a_in(static_cast<std::size_t>(count));
    std::vector<Scalar> b_in(static_cast<std::size_t>(count));
    std::vector<Scalar> inside(static_cast<std::size_t>(count));
    std::vector<Scalar> target_in(static_cast<std::size_t>(target_side * target_side));
    std::vector<Scalar> source_in(source_region ? static_cast<std::size_t>(source_side * source_side) : 0U);
    std::vector<Scalar> costs(static_cast<std::size_t>(side * side));
    for (int x = 0; x < source.width(); ++x) {
      const Scalar bx = init.dx()(y, x);
      const Scalar by = init.dy()(y, x);
      const int footprint = window_footprint(x, y, half, source.width(), source.height());
      if (!moving_source) gather_patch(source, x, y, half, Scalar(0), Scalar(0), a.data(), a_in.data());
      if (source_region)
        gather_region(source, x, y, source_reach, source_scale * bx, source_scale * by, source_region_buf.data(),
                      source_in.data());
      gather_region(target, x, y, target_reach, bx, by, target_region.data(), target_in.data());
      if (weights) gather_weights(*weights, x, y, half, w.data());

      Scalar best = std::numeric_limits<Scalar>::infinity();
      int best_d2 = std::numeric_limits<int>::max();
      int best_i = 0;
      int best_j = 0;
      for (int j = -radius; j <= radius; ++j) {
        for (int i = -radius; i <= radius; ++i) {
          if (source_region) {
            crop_patch(source_region_buf.data(), source_side, patch, source_step * i, source_step * j, channels,
                       a.data());
            crop_patch(source_in.data(), source_side, patch, source_step * i, source_step * j, 1, a_in.data());
          } else if (moving_source) {
            gather_patch(source, x, y, half, source_scale * (bx + Scalar(i)), source_scale * (by + Scalar(j)),
                         a.data(), a_in.data());
          }
          crop_patch(target_region.data(), target_side, patch, i, j, channels, b.data());
          crop_patch(target_in.data(), target_side, patch, i, j, 1, b_in.data());
          for (std::size_t k = 0; k < inside.size(); ++k) inside[k] = a_in[k] * b_in[k];
          const Scalar c = patch_cost(a.data(), b.data(), weights ? w.data() : nullptr, inside.data(), footprint,
                                      count, channels, kind);
          costs[static_cast<std::size_t>((j + radius) * side + (i + radius))] = c;
          const int d2 = i * i + j * j;
          if (c < best || (c == best && d2 < best_d2)) {
            best = c;
            best_d2 = d2;
            best_i = i;
            best_j = j;
          }
        }
      }

      Scalar off_x = 0;
      Scalar off_y = 0;
      if (subpixel && best > Scalar(0) && std::isfinite(best)) {
        auto at = [&](int i, int j) { return costs[static_cast<std::size_t>((j + radius) * side + (i + radius))]; };
        auto parabola = [](Scalar cm, Scalar c0, Scalar cp) {
          if (!std::isfinite(cm) || !std::isfinite(cp)) return Scalar(0);
          const Scalar den = cm - Scalar(2) * c0 + cp;
          if (!(den > Scalar(0))) return Scalar(0);
          return std::clamp((cm - cp) / (Scalar(2) * den), Scalar(-0.5), Scalar(0.5));
        };
        if (std::abs(best_i) < radius) off_x = parabola(at(best_i - 1, best_j), best, at(best_i + 1, best_j));
        if (std::abs(best_j) < radius) off_y = parabola(at(best_i, best_j - 1), best, at(best_i, best_j + 1));
      }
      out.set(x, y, bx + Scalar(best_i) + off_x, by + Scalar(best_j) + off_y);
    }
  });
  return out;
}

template <typename Scalar>
Plane<Scalar> mean_abs_difference(const Frame<Scalar>& a, const Frame<Scalar>& b) {
  Plane<Scalar> sum = (a.channel(0) - b.channel(0)).abs();
  for (int c = 1; c < a.channels(); ++c) sum += (a.channel(c) - b.channel(c)).abs();
  return sum / Scalar(a.channels());
}

template <typename Scalar>
Mask<Scalar> reliability_from(const Frame<Scalar>& warped0, const Frame<Scalar>& warped1, Scalar beta) {
  return Mask<Scalar>((-beta * mean_abs_difference(warped0, warped1)).exp());
}

}  // namespace detail

/// Patch cost of the symmetric candidate v at (x, y): I0 is read at
/// p - (t/(1-t)) v and I1 at p + v over the window around (x, y).
template <typename Scalar>
Scalar bilateral_cost(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1, int x, int y,
                      const Eigen::Matrix<Scalar, 2, 1>& v, Scalar t, const SearchParams& params) {
  detail::require_time(t, "bilateral_cost");
  detail::require(frame0.same_shape(frame1), "bilateral_cost: frames differ in shape");
  params.validate();
  const int half = params.patch / 2;
  const int count = params.patch * params.patch;
  const Scalar k = -(t / (Scalar(1) - t));
  std::vector<Scalar> a(static_cast<std::size_t>(count * frame0.channels()));
  std::vector<Scalar> b(a.size());
  std::vector<Scalar> a_in(static_cast<std::size_t>(count));
  std::vector<Scalar> b_in(a_in.size());
  detail::gather_patch(frame0, x, y, half, k * v.x(), k * v.y(), a.data(), a_in.data());
  detail::gather_patch(frame1, x, y, half, v.x(), v.y(), b.data(), b_in.data());
  for (std::size_t i = 0; i < a_in.size(); ++i) a_in[i] *= b_in[i];
  const int footprint = detail::window_footprint(x, y, half, frame0.width(), frame0.height());
  return detail::patch_cost<Scalar>(a.data(), b.data(), nullptr, a_in.data(), footprint, count, frame0.channels(),
                                    params.cost);
}

/// Coarse-to-fine symmetric bilateral search. Returns (Vt0, Vt1) at quarter
/// resolution of the input, with Vt0 derived from Vt1 by the linear-motion
/// constraint.
template <typename Scalar>
BilateralPair<Scalar> estimate_symmetric(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1, Scalar t,
                                         const SearchParams& params) {
  detail::require_time(t, "estimate_symmetric");
  detail::require(frame0.same_shape(frame1), "estimate_symmetric: frames differ in shape");
  params.validate();
  const auto pyr0 = build_pyramid(frame0, params.levels + 2);
  const auto pyr1 = build_pyramid(frame1, params.levels + 2);
  const auto& coarsest = pyr0.coarsest();
  detail::require(coarsest.width() >= params.patch && coarsest.height() >= params.patch,
                  "estimate_symmetric: coarsest level (" + std::to_string(coarsest.width()) + "x" +
                      std::to_string(coarsest.height()) + ") is smaller than the patch");

  const Scalar k = -(t / (Scalar(1) - t));
  MotionField<Scalar> vt1(coarsest.width(), coarsest.height());
  for (int l = 0; l < params.levels; ++l) {
    const auto& f0 = pyr0.levels[static_cast<std::size_t>(l)];
    const auto& f1 = pyr1.levels[static_cast<std::size_t>(l)];
    vt1 = upsample_field(vt1, f0.width(), f0.height());
    vt1 = detail::search_level(f0, k, f1, vt1, static_cast<const Plane<Scalar>*>(nullptr), params.radius,
                               params.patch, params.cost, params.subpixel);
  }
  return {symmetric_counterpart(vt1, t), std::move(vt1)};
}

/// Occlusion-aware blend of two warped frames:
///   (1-t) (1 - M1 + M0) W0 + t (1 - M0 + M1) W1,
/// with weights clamped to [0,2] and the result clamped to [0,1].
template <typename Scalar>
Frame<Scalar> blend_anchor(const Frame<Scalar>& warped0, const Frame<Scalar>& warped1, const Mask<Scalar>& mask0,
                           const Mask<Scalar>& mask1, Scalar t) {
  detail::require(warped0.same_shape(warped1) && warped0.same_size(mask0) && warped0.same_size(mask1),
                  "blend_anchor: inputs differ in size");
  const Plane<Scalar> w0 = (Scalar(1) - mask1.values() + mask0.values()).max(Scalar(0)).min(Scalar(2));
  const Plane<Scalar> w1 = (Scalar(1) - mask0.values() + mask1.values()).max(Scalar(0)).min(Scalar(2));
  Frame<Scalar> out = warped0;
  for (int c = 0; c < out.channels(); ++c) {
    const Plane<Scalar> a0 = w0 * warped0.channel(c);
    const Plane<Scalar> a1 = w1 * warped1.channel(c);
    out.channel(c) = a0 + t * (a1 - a0);
  }
  return out.clamp(Scalar(0), Scalar(1));
}

template <typename Scalar>
AnchorResult<Scalar> build_anchor(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1,
                                  const MotionField<Scalar>& vs_t0, const MotionField<Scalar>& vs_t1, Scalar t) {
  detail::require_time(t, "build_anchor");
  detail::require(frame0.same_shape(frame1) && vs_t0.same_size(frame0) && vs_t1.same_size(frame0),
                  "build_anchor: inputs differ in size");
  Mask<Scalar> m0 = warp_mask(vs_t0);
  Mask<Scalar> m1 = warp_mask(vs_t1);
  Frame<Scalar> anchor = blend_anchor(backward_warp(vs_t0, frame0), backward_warp(vs_t1, frame1), m0, m1, t);
  return {std::move(anchor), std::move(m0), std::move(m1)};
}

/// exp(-beta * mean_c |warp(I0 by Vt0) - warp(I1 by Vt1)|) per pixel.
template <typename Scalar>
Mask<Scalar> init_reliability(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1,
                              const MotionField<Scalar>& vs_t0, const MotionField<Scalar>& vs_t1, Scalar beta) {
  detail::require(beta > Scalar(0), "init_reliability: beta must be positive");
  detail::require(frame0.same_shape(frame1) && vs_t0.same_size(frame0) && vs_t1.same_size(frame0),
                  "init_reliability: inputs differ in size");
  return detail::reliability_from(backward_warp(vs_t0, frame0), backward_warp(vs_t1, frame1), beta);
}

/// Two-level refinement of one direction of the bilateral pair, anchor to
/// target. `init` and `reliability` are at quarter resolution of the
/// anchor; the result is at half resolution. Level 1 searches at quarter
/// resolution weighting anchor texels by `reliability`; level 2 searches
/// at half resolution with the reliability recomputed from the anchor and
/// the target warped by the current field.
///
/// Accepts radius 0 (a pure resampling of `init`).
template <typename Scalar>
MotionField<Scalar> refine_asymmetric(const Frame<Scalar>& anchor, const Frame<Scalar>& target,
                                      const MotionField<Scalar>& init, const Mask<Scalar>& reliability,
                                      const SearchParams& params) {
  SearchParams checked = params;
  checked.radius = std::max(1, params.radius);
  checked.validate();
  detail::require(params.radius >= 0, "refine_asymmetric: radius must be >= 0");
  detail::require(anchor.same_shape(target), "refine_asymmetric: anchor and target differ in shape");
  const auto anchors = build_pyramid(anchor, 3);
  const auto targets = build_pyramid(target, 3);
  const auto& quarter = anchors.levels[0];
  const auto& half = anchors.levels[1];
  detail::require(init.same_size(quarter), "refine_asymmetric: initial field is not at quarter resolution");
  detail::require(reliability.width() == quarter.width() && reliability.height() == quarter.height(),
                  "refine_asymmetric: reliability is not at quarter resolution");

  MotionField<Scalar> field =
      detail::search_level(quarter, Scalar(0), targets.levels[0], init, &reliability.values(), params.radius,
                           params.patch, params.cost, params.subpixel);

  field = upsample_field(field, half.width(), half.height());
  const Mask<Scalar> z = detail::reliability_from(half, backward_warp(field, targets.levels[1]), Scalar(params.beta));
  return detail::search_level(half, Scalar(0), targets.levels[1], field, &z.values(), params.radius, params.patch,
                              params.cost, params.subpixel);
}

/// Full bilateral estimation: symmetric search, anchor synthesis,
/// reliability, and per-direction asymmetric refinement. All outputs are at
/// input resolution.
template <typename Scalar>
BilateralResult<Scalar> estimate_abme(const Frame<Scalar>& frame0, const Frame<Scalar>& frame1, Scalar t,
                                      const SearchParams& params) {
  detail::require_time(t, "estimate_abme");
  const int w = frame0.width();
  const int h = frame0.height();
  auto [q_t0, q_t1] = estimate_symmetric(frame0, frame1, t, params);

  BilateralResult<Scalar> r;
  r.vs_t1 = upsample_field(q_t1, w, h);
  r.vs_t0 = symmetric_counterpart(r.vs_t1, t);
  auto anchor = build_anchor(frame0, frame1, r.vs_t0, r.vs_t1, t);
  r.anchor = std::move(anchor.anchor);
  r.masks = {std::move(anchor.mask_t0), std::move(anchor.mask_t1)};
  r.reliability = init_reliability(frame0, frame1, r.vs_t0, r.vs_t1, Scalar(params.beta));

  const Mask<Scalar> z_quarter = downsample(downsample(r.reliability));
  r.va_t0 = upsample_field(refine_asymmetric(r.anchor, frame0, q_t0, z_quarter, params), w, h);
  r.va_t1 = upsample_field(refine_asymmetric(r.anchor, frame1, q_t1, z_quarter, params), w, h);
  return r;
}

/// Coarse-to-fine one-sided block matching from `from` to `to`, searched
/// down to quarter resolution and returned upsampled to input resolution.
template <typename Scalar>
MotionField<Scalar> estimate_flow(const Frame<Scalar>& from, const Frame<Scalar>& to, const SearchParams& params) {
  detail::require(from.same_shape(to), "estimate_flow: frames differ in shape");
  params.validate();
  const auto pyr0 = build_pyramid(from, params.levels + 2);
  const auto pyr1 = build_pyramid(to, params.levels + 2);
  const auto& coarsest = pyr0.coarsest();
  detail::require(coarsest.width() >= params.patch && coarsest.height() >= params.patch,
                  "estimate_flow: coarsest level is smaller than the patch");
  MotionField<Scalar> v(coarsest.width(), coarsest.height());
  for (int l = 0; l < params.levels; ++l) {
    const auto& f0 = pyr0.levels[static_cast<std::size_t>(l)];
    v = upsample_field(v, f0.width(), f0.height());
    v = detail::search_level(f0, Scalar(0), pyr1.levels[static_cast<std::size_t>(l)], v,
                             static_cast<const Plane<Scalar>*>(nullptr), params.radius, params.patch, params.cost,
                             params.subpixel);
  }
  return upsample_field(v, from.width(), from.height());
}

}  // namespace abme
