#pragma once

#include "abme/core.hpp"
#include "abme/harness/dataset.hpp"

#include <cstdint>
#include <string>

namespace abme::harness {

enum class SceneKind { Translate, Accelerate, Occlude, Rotate };

std::string to_string(SceneKind kind);
SceneKind parse_scene_kind(const std::string& name);

/// A generated triplet with the true intermediate fields on the gt grid.
struct SyntheticScene {
  Triplet triplet;
  MotionFieldd true_t0;
  MotionFieldd true_t1;
  /// Sprite displacement between frame 0 and the middle frame (rotation: 0).
  Eigen::Vector2d sprite_to_mid = Eigen::Vector2d::Zero();
  /// Sprite displacement between frame 0 and frame 1 (rotation: 0).
  Eigen::Vector2d sprite_to_end = Eigen::Vector2d::Zero();
};

/// Textured background plus a textured moving square, a pure function of
/// (seed, kind, size). Translate: linear motion. Accelerate: positions
/// x0, x0 + d, x0 + 3d. Occlude: the mover passes over a static square.
/// Rotate: the mover turns by -theta, 0, +theta about its center. t = 0.5.
SyntheticScene gen_synthetic(std::uint64_t seed, SceneKind kind, int size);

}  // namespace abme::harness
