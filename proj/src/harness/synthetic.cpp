#include "abme/harness/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace abme::harness {

namespace {

class Rng {
 public:
  Rng(std::uint64_t seed, SceneKind kind, int size) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(size)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  int sign() { return (engine_() & 1U) ? 1 : -1; }

 private:
  std::mt19937_64 engine_;
};

/// Smoothstep-interpolated lattice noise in [0,1].
class ValueNoise {
 public:
  ValueNoise(Rng& rng, double extent, double cell) : cell_(cell) {
    side_ = static_cast<int>(std::ceil(extent / cell)) + 3;
    values_.resize(static_cast<std::size_t>(side_ * side_));
    for (auto& v : values_) v = rng.uniform();
  }

  double operator()(double u, double v) const {
    const double gu = std::clamp(u / cell_ + 1.0, 0.0, side_ - 1.001);
    const double gv = std::clamp(v / cell_ + 1.0, 0.0, side_ - 1.001);
    const int iu = static_cast<int>(gu);
    const int iv = static_cast<int>(gv);
    const double fu = smooth(gu - iu);
    const double fv = smooth(gv - iv);
    auto at = [&](int a, int b) { return values_[static_cast<std::size_t>(b * side_ + a)]; };
    const double top = at(iu, iv) + fu * (at(iu + 1, iv) - at(iu, iv));
    const double bottom = at(iu, iv + 1) + fu * (at(iu + 1, iv + 1) - at(iu, iv + 1));
    return top + fv * (bottom - top);
  }

 private:
  static double smooth(double f) { return f * f * (3.0 - 2.0 * f); }

  double cell_;
  int side_;
  std::vector<double> values_;
};

/// Three-channel texture: base + amplitude * (coarse/fine noise mix).
struct Texture {
  std::array<ValueNoise, 3> coarse;
  std::array<ValueNoise, 3> fine;
  std::array<double, 3> base;
  double amplitude;

  static Texture make(Rng& rng, double extent, double coarse_cell, double fine_cell, double lo, double hi,
                      double amplitude) {
    auto noise = [&](double cell) {
      return std::array<ValueNoise, 3>{ValueNoise(rng, extent, cell), ValueNoise(rng, extent, cell),
                                       ValueNoise(rng, extent, cell)};
    };
    auto coarse = noise(coarse_cell);
    auto fine = noise(fine_cell);
    const std::array<double, 3> base{rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
    return Texture{std::move(coarse), std::move(fine), base, amplitude};
  }

  double operator()(double u, double v, int c) const {
    const auto i = static_cast<std::size_t>(c);
    const double n = 0.6 * coarse[i](u, v) + 0.4 * fine[i](u, v) - 0.5;
    return std::clamp(base[i] + amplitude * n, 0.0, 1.0);
  }
};

/// A textured square of side `side` placed with its top-left corner at
/// `origin` and turned by `angle` about its center.
struct Sprite {
  const Texture* texture;
  double side;
  Eigen::Vector2d origin;
  double angle = 0.0;

  Eigen::Vector2d center() const { return origin + Eigen::Vector2d::Constant(side / 2.0); }

  /// Texture coordinates of pixel p, or nothing when p is outside.
  bool local(const Eigen::Vector2d& p, Eigen::Vector2d& uv) const {
    const Eigen::Vector2d q = p - center();
    const double c = std::cos(-angle);
    const double s = std::sin(-angle);
    uv = Eigen::Vector2d(c * q.x() - s * q.y(), s * q.x() + c * q.y()) + Eigen::Vector2d::Constant(side / 2.0);
    return uv.x() >= 0.0 && uv.y() >= 0.0 && uv.x() < side && uv.y() < side;
  }

  /// Position of texture point uv in image coordinates.
  Eigen::Vector2d place(const Eigen::Vector2d& uv) const {
    const Eigen::Vector2d q = uv - Eigen::Vector2d::Constant(side / 2.0);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return center() + Eigen::Vector2d(c * q.x() - s * q.y(), s * q.x() + c * q.y());
  }
};

/// Paints background, then sprites in order (later sprites on top).
Framed render(int size, const Texture& background, const std::vector<Sprite>& sprites) {
  Framed frame(size, size, 3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const Eigen::Vector2d p(x, y);
      const Texture* tex = &background;
      Eigen::Vector2d uv = p;
      for (const auto& s : sprites) {
        Eigen::Vector2d local;
        if (s.local(p, local)) {
          tex = s.texture;
          uv = local;
        }
      }
      for (int c = 0; c < 3; ++c) frame(x, y, c) = (*tex)(uv.x(), uv.y(), c);
    }
  }
  return frame;
}

/// Field on the middle frame's grid pointing at where each mover texel sits
/// in `other`; zero elsewhere. The mover is the last sprite.
MotionFieldd true_field(int size, const std::vector<Sprite>& mid, const Sprite& mover_other) {
  MotionFieldd field(size, size);
  const Sprite& mover = mid.back();
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      Eigen::Vector2d uv;
      const Eigen::Vector2d p(x, y);
      if (!mover.local(p, uv)) continue;
      const Eigen::Vector2d d = mover_other.place(uv) - p;
      field.set(x, y, d.x(), d.y());
    }
  return field;
}

}  // namespace

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::Translate: return "translate";
    case SceneKind::Accelerate: return "accelerate";
    case SceneKind::Occlude: return "occlude";
    case SceneKind::Rotate: return "rotate";
  }
  return "unknown";
}

SceneKind parse_scene_kind(const std::string& name) {
  std::string lower = name;
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  for (SceneKind k : {SceneKind::Translate, SceneKind::Accelerate, SceneKind::Occlude, SceneKind::Rotate})
    if (to_string(k) == lower) return k;
  throw std::invalid_argument("unknown scene kind '" + name + "'");
}

SyntheticScene gen_synthetic(std::uint64_t seed, SceneKind kind, int size) {
  detail::require(size >= 32, "gen_synthetic: size must be >= 32");
  Rng rng(seed, kind, size);
  const int side = size / 4;
  const int margin = 2;
  const int hi = size - side - margin;

  const Texture background = Texture::make(rng, size, 12.0, 5.0, 0.3, 0.7, 0.6);
  const Texture mover_tex = Texture::make(rng, side, 8.0, 4.0, 0.15, 0.85, 0.8);
  const Texture static_tex = Texture::make(rng, side, 8.0, 4.0, 0.15, 0.85, 0.8);

  auto nonzero_pair = [&](int lo, int hi_) {
    Eigen::Vector2i d;
    do {
      d.x() = rng.integer(lo, hi_);
      d.y() = rng.integer(lo, hi_);
    } while (d.isZero());
    return d;
  };
  // Origin range so that origin + k * d stays in [margin, hi] for k in {0, reach}.
  auto pick_origin = [&](const Eigen::Vector2i& total) {
    Eigen::Vector2d o;
    for (int a = 0; a < 2; ++a) o[a] = rng.integer(margin + std::max(0, -total[a]), hi - std::max(0, total[a]));
    return o;
  };

  std::vector<Sprite> first;
  std::vector<Sprite> middle;
  std::vector<Sprite> last;
  Eigen::Vector2d to_mid = Eigen::Vector2d::Zero();
  Eigen::Vector2d to_end = Eigen::Vector2d::Zero();

  switch (kind) {
    case SceneKind::Translate: {
      const Eigen::Vector2i d = nonzero_pair(-3, 3) * 2;
      const Eigen::Vector2d o = pick_origin(d);
      to_end = d.cast<double>();
      to_mid = to_end / 2.0;
      first = {{&mover_tex, double(side), o}};
      middle = {{&mover_tex, double(side), o + to_mid}};
      last = {{&mover_tex, double(side), o + to_end}};
      break;
    }
    case SceneKind::Accelerate: {
      Eigen::Vector2d d;
      do {
        d.x() = rng.uniform(-3.0, 3.0);
        d.y() = rng.uniform(-3.0, 3.0);
      } while (d.norm() < 1.0);
      const Eigen::Vector2d o = pick_origin((d * 3.0).array().round().cast<int>().matrix());
      to_mid = d;
      to_end = 3.0 * to_mid;
      first = {{&mover_tex, double(side), o}};
      middle = {{&mover_tex, double(side), o + to_mid}};
      last = {{&mover_tex, double(side), o + to_end}};
      break;
    }
    case SceneKind::Occlude: {
      const int spread = size / 8;
      Eigen::Vector2d fixed;
      for (int a = 0; a < 2; ++a) fixed[a] = rng.integer(size / 2 - side / 2 - spread, size / 2 - side / 2 + spread);
      const int axis = rng.integer(0, 1);
      Eigen::Vector2d d;
      d[axis] = rng.uniform(6.0, 10.0) * rng.sign();
      d[1 - axis] = rng.uniform(-2.0, 2.0);
      Eigen::Vector2d mid;
      for (int a = 0; a < 2; ++a) {
        const int reach = static_cast<int>(std::ceil(std::abs(d[a]) / 2.0));
        mid[a] = std::clamp(fixed[a] + rng.integer(-side / 2, side / 2), double(margin + reach), double(hi - reach));
      }
      to_mid = d / 2.0;
      to_end = d;
      const Sprite obstacle{&static_tex, double(side), fixed};
      first = {obstacle, {&mover_tex, double(side), mid - to_mid}};
      middle = {obstacle, {&mover_tex, double(side), mid}};
      last = {obstacle, {&mover_tex, double(side), mid + to_mid}};
      break;
    }
    case SceneKind::Rotate: {
      const int pad = side / 4 + 1;
      Eigen::Vector2d o;
      for (int a = 0; a < 2; ++a) o[a] = rng.integer(margin + pad, hi - pad);
      const double theta = rng.uniform(4.0, 10.0) * std::numbers::pi / 180.0 * rng.sign();
      first = {{&mover_tex, double(side), o, -theta}};
      middle = {{&mover_tex, double(side), o, 0.0}};
      last = {{&mover_tex, double(side), o, theta}};
      break;
    }
  }

  SyntheticScene scene;
  scene.triplet.id = to_string(kind) + "_" + std::to_string(seed);
  scene.triplet.frame0 = render(size, background, first);
  scene.triplet.gt = render(size, background, middle);
  scene.triplet.frame1 = render(size, background, last);
  scene.triplet.t = 0.5;
  scene.true_t0 = true_field(size, middle, first.back());
  scene.true_t1 = true_field(size, middle, last.back());
  scene.sprite_to_mid = to_mid;
  scene.sprite_to_end = to_end;
  return scene;
}

}  // namespace abme::harness
