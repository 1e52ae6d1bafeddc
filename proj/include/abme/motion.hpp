#pragma once

#include "abme/core.hpp"

#include <utility>

namespace abme {

/// Which inter-frame flow the borrowed approximation takes its vectors from.
enum class BorrowFrom { Flow01, Flow10 };

template <typename Scalar>
using BilateralPair = std::pair<MotionField<Scalar>, MotionField<Scalar>>;

template <typename Scalar>
MotionField<Scalar> scale_field(const MotionField<Scalar>& field, Scalar s) {
  detail::require(std::isfinite(s), "scale_field: non-finite scale");
  return MotionField<Scalar>(field.dx() * s, field.dy() * s);
}

namespace detail {

template <typename Scalar>
MotionField<Scalar> combine(const MotionField<Scalar>& a, Scalar wa, const MotionField<Scalar>& b, Scalar wb) {
  require(a.same_size(b), "motion: fields differ in size");
  return MotionField<Scalar>(wa * a.dx() + wb * b.dx(), wa * a.dy() + wb * b.dy());
}

}  // namespace detail

/// Intermediate fields borrowed from one inter-frame flow:
///   Flow01: (-t V01, (1-t) V01)    Flow10: (t V10, -(1-t) V10)
template <typename Scalar>
BilateralPair<Scalar> approx_borrowed(const MotionField<Scalar>& flow01, const MotionField<Scalar>& flow10, Scalar t,
                                      BorrowFrom source) {
  detail::require(t > Scalar(0) && t < Scalar(1), "approx_borrowed: t must lie in (0,1)");
  if (source == BorrowFrom::Flow01) return {scale_field(flow01, -t), scale_field(flow01, Scalar(1) - t)};
  return {scale_field(flow10, t), scale_field(flow10, -(Scalar(1) - t))};
}

/// Blend of both borrowed candidates:
///   Vt0 = -(1-t)t V01 + t^2 V10,   Vt1 = (1-t)^2 V01 - t(1-t) V10
template <typename Scalar>
BilateralPair<Scalar> approx_blended(const MotionField<Scalar>& flow01, const MotionField<Scalar>& flow10, Scalar t) {
  detail::require(t > Scalar(0) && t < Scalar(1), "approx_blended: t must lie in (0,1)");
  const Scalar s = Scalar(1) - t;
  return {detail::combine(flow01, -s * t, flow10, t * t), detail::combine(flow01, s * s, flow10, -t * s)};
}

/// The t->0 field implied by a t->1 field under linear motion.
template <typename Scalar>
MotionField<Scalar> symmetric_counterpart(const MotionField<Scalar>& vt1, Scalar t) {
  detail::require(t > Scalar(0) && t < Scalar(1), "symmetric_counterpart: t must lie in (0,1)");
  return scale_field(vt1, -(t / (Scalar(1) - t)));
}

}  // namespace abme
