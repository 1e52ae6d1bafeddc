#pragma once

#include "abme/core.hpp"

#include <cmath>
#include <limits>

namespace abme {

/// Constants of the soft census transform. Intensities are on the [0,1] scale.
namespace census {
inline constexpr double kNormalization = 0.81;  // c = d / sqrt(d^2 + kNormalization)
inline constexpr double kSaturation = 0.1;      // soft Hamming term d^2 / (kSaturation + d^2)
inline constexpr int kWindow = 7;
inline constexpr double kIntensityScale = 255.0;  // constants are tuned for 8-bit intensity steps

template <typename Scalar>
inline Scalar signature(Scalar neighbor_minus_center) {
  const Scalar d = neighbor_minus_center * Scalar(kIntensityScale);
  return d / std::sqrt(d * d + Scalar(kNormalization));
}

template <typename Scalar>
inline Scalar soft_hamming(Scalar a, Scalar b) {
  const Scalar d = a - b;
  return d * d / (Scalar(kSaturation) + d * d);
}
}  // namespace census

namespace detail {

template <typename Scalar>
void require_same(const Frame<Scalar>& a, const Frame<Scalar>& b, const char* who) {
  require(a.same_shape(b), std::string(who) + ": frames differ in shape");
}

template <typename Scalar>
Scalar mean_squared_error(const Frame<Scalar>& a, const Frame<Scalar>& b) {
  Scalar sum = 0;
  for (int c = 0; c < a.channels(); ++c) sum += (a.channel(c) - b.channel(c)).square().sum();
  return sum / Scalar(a.channels() * a.width() * a.height());
}

/// Separable "valid" correlation with a symmetric 1-D kernel.
template <typename Scalar>
Plane<Scalar> filter_valid(const Plane<Scalar>& src, const Eigen::Array<Scalar, Eigen::Dynamic, 1>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int w = static_cast<int>(src.cols());
  const int h = static_cast<int>(src.rows());
  Plane<Scalar> rows(h, w - k + 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + k <= w; ++x) rows(y, x) = (src.row(y).segment(x, k).transpose() * kernel).sum();
  Plane<Scalar> out(h - k + 1, w - k + 1);
  for (int y = 0; y + k <= h; ++y)
    for (int x = 0; x < out.cols(); ++x) out(y, x) = (rows.col(x).segment(y, k) * kernel).sum();
  return out;
}

}  // namespace detail

/// Peak-1 PSNR in dB; identical frames give +infinity.
template <typename Scalar>
Scalar psnr(const Frame<Scalar>& a, const Frame<Scalar>& b) {
  detail::require_same(a, b, "psnr");
  const Scalar mse = detail::mean_squared_error(a, b);
  if (mse == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return Scalar(10) * std::log10(Scalar(1) / mse);
}

/// Mean SSIM of the channel-mean images: 11x11 Gaussian window with
/// sigma 1.5, C1 = 0.01^2, C2 = 0.03^2, averaged over fully interior windows.
template <typename Scalar>
Scalar ssim(const Frame<Scalar>& a, const Frame<Scalar>& b) {
  detail::require_same(a, b, "ssim");
  constexpr int kSize = 11;
  detail::require(a.width() >= kSize && a.height() >= kSize, "ssim: frames must be at least 11x11");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> g(kSize);
  for (int i = 0; i < kSize; ++i) {
    const Scalar d = Scalar(i - kSize / 2);
    g(i) = std::exp(-d * d / Scalar(2 * 1.5 * 1.5));
  }
  g /= g.sum();

  const Plane<Scalar> x = a.channel_mean();
  const Plane<Scalar> y = b.channel_mean();
  const Plane<Scalar> mx = detail::filter_valid<Scalar>(x, g);
  const Plane<Scalar> my = detail::filter_valid<Scalar>(y, g);
  const Plane<Scalar> sxx = detail::filter_valid<Scalar>(x * x, g) - mx * mx;
  const Plane<Scalar> syy = detail::filter_valid<Scalar>(y * y, g) - my * my;
  const Plane<Scalar> sxy = detail::filter_valid<Scalar>(x * y, g) - mx * my;
  const Scalar c1 = Scalar(0.01 * 0.01);
  const Scalar c2 = Scalar(0.03 * 0.03);
  const Plane<Scalar> map = ((Scalar(2) * mx * my + c1) * (Scalar(2) * sxy + c2)) /
                            ((mx * mx + my * my + c1) * (sxx + syy + c2));
  return map.mean();
}

/// Mean of (d^2 + eps^2)^alpha over all texels and channels.
template <typename Scalar>
Scalar charbonnier(const Frame<Scalar>& a, const Frame<Scalar>& b, Scalar alpha = Scalar(0.5),
                   Scalar eps = Scalar(1e-6)) {
  detail::require_same(a, b, "charbonnier");
  Scalar sum = 0;
  for (int c = 0; c < a.channels(); ++c)
    sum += ((a.channel(c) - b.channel(c)).square() + eps * eps).pow(alpha).sum();
  return sum / Scalar(a.channels() * a.width() * a.height());
}

/// Soft Hamming distance between 7x7 soft census signatures of the
/// channel-mean images, averaged over pixels whose window is fully inside.
template <typename Scalar>
Scalar census_distance(const Frame<Scalar>& a, const Frame<Scalar>& b) {
  detail::require_same(a, b, "census_distance");
  constexpr int r = census::kWindow / 2;
  detail::require(a.width() >= census::kWindow && a.height() >= census::kWindow,
                  "census_distance: frames must be at least 7x7");
  const Plane<Scalar> pa = a.channel_mean();
  const Plane<Scalar> pb = b.channel_mean();
  Scalar total = 0;
  long count = 0;
  for (int y = r; y < a.height() - r; ++y) {
    for (int x = r; x < a.width() - r; ++x) {
      Scalar sum = 0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i) {
          if (i == 0 && j == 0) continue;
          const Scalar ca = census::signature(pa(y + j, x + i) - pa(y, x));
          const Scalar cb = census::signature(pb(y + j, x + i) - pb(y, x));
          sum += census::soft_hamming(ca, cb);
        }
      total += sum;
      ++count;
    }
  }
  return total / Scalar(count);
}

}  // namespace abme
