#pragma once

#include "abme/core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace abme::harness {

/// One evaluation unit: two inputs and the ground-truth frame between them.
struct Triplet {
  std::string id;
  Framed frame0;
  Framed gt;
  Framed frame1;
  double t = 0.5;

  void validate() const;
};

struct DatasetLoad {
  std::vector<Triplet> triplets;
  std::vector<std::string> skipped;  ///< one diagnostic per rejected folder
};

/// Loads every subdirectory holding im1.png, im2.png (ground truth), and
/// im3.png, in lexicographic order. Bad folders are skipped with a
/// diagnostic; an unreadable root throws std::runtime_error.
DatasetLoad load_triplet_dir(const std::filesystem::path& root);

/// Writes a triplet as <dir>/im1.png, im2.png, im3.png.
void save_triplet(const std::filesystem::path& dir, const Triplet& triplet);

}  // namespace abme::harness
