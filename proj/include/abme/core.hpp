#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace abme {

/// A single image channel or scalar map. Rows are y, columns are x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class BorderMode { Clamp, Zero };

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

template <typename Scalar>
bool all_finite(const Plane<Scalar>& plane) {
  return plane.isFinite().all();
}

}  // namespace detail

/// Runs `fn(y)` for every row. Rows are independent, so the result does not
/// depend on the thread count.
template <typename Fn>
void for_each_row(int height, Fn&& fn) {
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) fn(y);
}

inline void set_thread_count(int threads) {
#ifdef _OPENMP
  omp_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Multi-channel image with planar storage. Values are nominally in [0,1];
/// warping intermediates may leave that range but stay within [-1,2].
template <typename Scalar>
class Frame {
 public:
  using PlaneType = Plane<Scalar>;

  Frame() = default;

  Frame(int width, int height, int channels, Scalar fill = Scalar(0)) : width_(width), height_(height) {
    detail::require(width > 0 && height > 0, "Frame: dimensions must be positive");
    detail::require(channels == 1 || channels == 3, "Frame: channels must be 1 or 3");
    planes_.assign(static_cast<std::size_t>(channels), PlaneType::Constant(height, width, fill));
  }

  explicit Frame(std::vector<PlaneType> planes) : planes_(std::move(planes)) {
    detail::require(planes_.size() == 1 || planes_.size() == 3, "Frame: channels must be 1 or 3");
    height_ = static_cast<int>(planes_.front().rows());
    width_ = static_cast<int>(planes_.front().cols());
    detail::require(width_ > 0 && height_ > 0, "Frame: dimensions must be positive");
    for (const auto& p : planes_)
      detail::require(p.rows() == height_ && p.cols() == width_, "Frame: channel planes differ in size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return static_cast<int>(planes_.size()); }
  bool empty() const { return planes_.empty(); }

  PlaneType& channel(int c) { return planes_[static_cast<std::size_t>(c)]; }
  const PlaneType& channel(int c) const { return planes_[static_cast<std::size_t>(c)]; }

  Scalar& operator()(int x, int y, int c = 0) { return channel(c)(y, x); }
  Scalar operator()(int x, int y, int c = 0) const { return channel(c)(y, x); }

  template <typename Other>
  bool same_size(const Other& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool same_shape(const Frame& other) const { return same_size(other) && channels() == other.channels(); }

  /// Mean over channels, as a single plane.
  PlaneType channel_mean() const {
    PlaneType sum = planes_.front();
    for (std::size_t c = 1; c < planes_.size(); ++c) sum += planes_[c];
    return sum / Scalar(planes_.size());
  }

  bool is_valid() const {
    if (planes_.empty()) return false;
    return std::all_of(planes_.begin(), planes_.end(), [](const PlaneType& p) {
      return detail::all_finite<Scalar>(p) && (p >= Scalar(-1)).all() && (p <= Scalar(2)).all();
    });
  }

  bool operator==(const Frame& other) const {
    if (!same_shape(other)) return false;
    for (int c = 0; c < channels(); ++c)
      if ((channel(c) != other.channel(c)).any()) return false;
    return true;
  }

  Scalar max_abs_difference(const Frame& other) const {
    Scalar m = 0;
    for (int c = 0; c < channels(); ++c) m = std::max(m, (channel(c) - other.channel(c)).abs().maxCoeff());
    return m;
  }

  Frame& clamp(Scalar lo, Scalar hi) {
    for (auto& p : planes_) p = p.max(lo).min(hi);
    return *this;
  }

 private:
  std::vector<PlaneType> planes_;
  int width_ = 0;
  int height_ = 0;
};

/// Scalar map with values in [0,1]: warping masks and reliability maps.
template <typename Scalar>
class Mask {
 public:
  using PlaneType = Plane<Scalar>;

  Mask() = default;
  Mask(int width, int height, Scalar fill = Scalar(0)) : values_(PlaneType::Constant(height, width, fill)) {
    detail::require(width > 0 && height > 0, "Mask: dimensions must be positive");
  }
  explicit Mask(PlaneType values) : values_(std::move(values)) {}

  int width() const { return static_cast<int>(values_.cols()); }
  int height() const { return static_cast<int>(values_.rows()); }

  PlaneType& values() { return values_; }
  const PlaneType& values() const { return values_; }

  Scalar& operator()(int x, int y) { return values_(y, x); }
  Scalar operator()(int x, int y) const { return values_(y, x); }

  bool is_valid() const {
    return values_.size() > 0 && detail::all_finite<Scalar>(values_) && (values_ >= Scalar(0)).all() &&
           (values_ <= Scalar(1)).all();
  }

 private:
  PlaneType values_;
};

/// Per-pixel displacement (dx, dy) in pixels of the field's own grid.
template <typename Scalar>
class MotionField {
 public:
  using PlaneType = Plane<Scalar>;

  MotionField() = default;
  MotionField(int width, int height, Scalar dx = Scalar(0), Scalar dy = Scalar(0))
      : dx_(PlaneType::Constant(height, width, dx)), dy_(PlaneType::Constant(height, width, dy)) {
    detail::require(width > 0 && height > 0, "MotionField: dimensions must be positive");
  }
  MotionField(PlaneType dx, PlaneType dy) : dx_(std::move(dx)), dy_(std::move(dy)) {
    detail::require(dx_.rows() == dy_.rows() && dx_.cols() == dy_.cols(), "MotionField: component sizes differ");
  }

  int width() const { return static_cast<int>(dx_.cols()); }
  int height() const { return static_cast<int>(dx_.rows()); }

  PlaneType& dx() { return dx_; }
  PlaneType& dy() { return dy_; }
  const PlaneType& dx() const { return dx_; }
  const PlaneType& dy() const { return dy_; }

  Eigen::Matrix<Scalar, 2, 1> operator()(int x, int y) const { return {dx_(y, x), dy_(y, x)}; }
  void set(int x, int y, Scalar vx, Scalar vy) {
    dx_(y, x) = vx;
    dy_(y, x) = vy;
  }

  template <typename Other>
  bool same_size(const Other& other) const {
    return width() == other.width() && height() == other.height();
  }

  bool is_valid() const {
    if (dx_.size() == 0) return false;
    const Scalar bound = Scalar(std::max(width(), height()));
    return detail::all_finite<Scalar>(dx_) && detail::all_finite<Scalar>(dy_) && (dx_.abs() <= bound).all() &&
           (dy_.abs() <= bound).all();
  }

  bool operator==(const MotionField& other) const {
    return same_size(other) && (dx_ == other.dx_).all() && (dy_ == other.dy_).all();
  }

 private:
  PlaneType dx_;
  PlaneType dy_;
};

/// Coarse-to-fine image stack; level 0 is the coarsest.
template <typename Scalar>
struct Pyramid {
  std::vector<Frame<Scalar>> levels;

  int size() const { return static_cast<int>(levels.size()); }
  const Frame<Scalar>& coarsest() const { return levels.front(); }
  const Frame<Scalar>& finest() const { return levels.back(); }
};

using Framed = Frame<double>;
using Framef = Frame<float>;
using Maskd = Mask<double>;
using Maskf = Mask<float>;
using MotionFieldd = MotionField<double>;
using MotionFieldf = MotionField<float>;

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

/// Bilinear read of one plane. Every caller that needs bit-identical results
/// (the warps and the search kernels) goes through this formula.
template <typename Scalar>
inline Scalar bilinear_texels(Scalar v00, Scalar v10, Scalar v01, Scalar v11, Scalar fx, Scalar fy) {
  return (Scalar(1) - fy) * ((Scalar(1) - fx) * v00 + fx * v10) + fy * ((Scalar(1) - fx) * v01 + fx * v11);
}

template <typename Scalar>
inline Scalar sample_plane(const Plane<Scalar>& plane, Scalar x, Scalar y, BorderMode border) {
  const int w = static_cast<int>(plane.cols());
  const int h = static_cast<int>(plane.rows());
  if (border == BorderMode::Clamp) {
    x = std::clamp(x, Scalar(0), Scalar(w - 1));
    y = std::clamp(y, Scalar(0), Scalar(h - 1));
  } else {
    if (x <= Scalar(-1) || y <= Scalar(-1) || x >= Scalar(w) || y >= Scalar(h)) return Scalar(0);
  }
  const Scalar fx0 = std::floor(x);
  const Scalar fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const Scalar fx = x - fx0;
  const Scalar fy = y - fy0;

  auto texel = [&](int xi, int yi) -> Scalar {
    if (border == BorderMode::Clamp) return plane(std::clamp(yi, 0, h - 1), std::clamp(xi, 0, w - 1));
    if (xi < 0 || yi < 0 || xi >= w || yi >= h) return Scalar(0);
    return plane(yi, xi);
  };
  return bilinear_texels(texel(x0, y0), texel(x0 + 1, y0), texel(x0, y0 + 1), texel(x0 + 1, y0 + 1), fx, fy);
}

/// 2x box downsample; odd trailing rows/columns average the texels present.
template <typename Scalar>
Plane<Scalar> downsample_box(const Plane<Scalar>& src) {
  const int w = static_cast<int>(src.cols());
  const int h = static_cast<int>(src.rows());
  const int cw = (w + 1) / 2;
  const int ch = (h + 1) / 2;
  Plane<Scalar> dst(ch, cw);
  for (int y = 0; y < ch; ++y) {
    const int y1 = std::min(2 * y + 1, h - 1);
    for (int x = 0; x < cw; ++x) {
      const int x1 = std::min(2 * x + 1, w - 1);
      Scalar sum = 0;
      int n = 0;
      for (int yy = 2 * y; yy <= y1; ++yy)
        for (int xx = 2 * x; xx <= x1; ++xx) {
          sum += src(yy, xx);
          ++n;
        }
      dst(y, x) = sum / Scalar(n);
    }
  }
  return dst;
}

/// Center-aligned bilinear resize with clamped borders.
template <typename Scalar>
Plane<Scalar> resize_bilinear(const Plane<Scalar>& src, int target_w, int target_h) {
  const int w = static_cast<int>(src.cols());
  const int h = static_cast<int>(src.rows());
  if (w == target_w && h == target_h) return src;
  const Scalar sx = Scalar(w) / Scalar(target_w);
  const Scalar sy = Scalar(h) / Scalar(target_h);
  Plane<Scalar> dst(target_h, target_w);
  for_each_row(target_h, [&](int y) {
    const Scalar yy = (Scalar(y) + Scalar(0.5)) * sy - Scalar(0.5);
    for (int x = 0; x < target_w; ++x) {
      const Scalar xx = (Scalar(x) + Scalar(0.5)) * sx - Scalar(0.5);
      dst(y, x) = sample_plane(src, xx, yy, BorderMode::Clamp);
    }
  });
  return dst;
}

}  // namespace detail

/// Bilinear sample of every channel at (x, y).
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> sample_bilinear(const Frame<Scalar>& frame, Scalar x, Scalar y,
                                                        BorderMode border = BorderMode::Clamp) {
  detail::require(std::isfinite(x) && std::isfinite(y), "sample_bilinear: non-finite coordinate");
  detail::require(!frame.empty(), "sample_bilinear: empty frame");
  Eigen::Array<Scalar, Eigen::Dynamic, 1> out(frame.channels());
  for (int c = 0; c < frame.channels(); ++c) out(c) = detail::sample_plane(frame.channel(c), x, y, border);
  return out;
}

template <typename Scalar>
Frame<Scalar> downsample(const Frame<Scalar>& frame) {
  std::vector<Plane<Scalar>> planes;
  planes.reserve(static_cast<std::size_t>(frame.channels()));
  for (int c = 0; c < frame.channels(); ++c) planes.push_back(detail::downsample_box(frame.channel(c)));
  return Frame<Scalar>(std::move(planes));
}

template <typename Scalar>
Mask<Scalar> downsample(const Mask<Scalar>& mask) {
  return Mask<Scalar>(detail::downsample_box(mask.values()));
}

template <typename Scalar>
Pyramid<Scalar> build_pyramid(const Frame<Scalar>& frame, int levels) {
  detail::require(levels >= 1, "build_pyramid: levels must be >= 1");
  const long need = 1L << (levels - 1);
  detail::require(frame.width() >= need && frame.height() >= need,
                  "build_pyramid: " + std::to_string(levels) + " levels need at least " + std::to_string(need) +
                      " pixels per side");
  Pyramid<Scalar> pyr;
  pyr.levels.resize(static_cast<std::size_t>(levels));
  pyr.levels.back() = frame;
  for (int l = levels - 2; l >= 0; --l)
    pyr.levels[static_cast<std::size_t>(l)] = downsample(pyr.levels[static_cast<std::size_t>(l + 1)]);
  return pyr;
}

/// Resizes a field and rescales its vectors so they stay in target pixels.
template <typename Scalar>
MotionField<Scalar> upsample_field(const MotionField<Scalar>& field, int target_w, int target_h) {
  detail::require(target_w >= field.width() && target_h >= field.height(),
                  "upsample_field: target smaller than source");
  if (target_w == field.width() && target_h == field.height()) return field;
  const Scalar rx = Scalar(target_w) / Scalar(field.width());
  const Scalar ry = Scalar(target_h) / Scalar(field.height());
  return MotionField<Scalar>(detail::resize_bilinear(field.dx(), target_w, target_h) * rx,
                             detail::resize_bilinear(field.dy(), target_w, target_h) * ry);
}

template <typename Scalar>
Mask<Scalar> upsample_mask(const Mask<Scalar>& mask, int target_w, int target_h) {
  return Mask<Scalar>(detail::resize_bilinear(mask.values(), target_w, target_h));
}

}  // namespace abme
