#include "abme/harness/dataset.hpp"

#include "abme/harness/image_io.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace abme::harness {

void Triplet::validate() const {
  detail::require(frame0.same_shape(gt) && frame0.same_shape(frame1), "triplet " + id + ": frames differ in shape");
  detail::require(t > 0.0 && t < 1.0, "triplet " + id + ": t must lie in (0,1)");
}

DatasetLoad load_triplet_dir(const fs::path& root) {
  std::error_code ec;
  fs::directory_iterator it(root, ec);
  if (ec) throw std::runtime_error("cannot read dataset directory " + root.string() + ": " + ec.message());

  std::vector<fs::path> folders;
  for (const auto& entry : it)
    if (entry.is_directory()) folders.push_back(entry.path());
  std::sort(folders.begin(), folders.end());

  DatasetLoad out;
  for (const auto& dir : folders) {
    const std::string id = dir.filename().string();
    try {
      for (const char* name : {"im1.png", "im2.png", "im3.png"})
        if (!fs::is_regular_file(dir / name)) throw std::runtime_error(std::string("missing ") + name);
      Triplet t{id, read_png(dir / "im1.png"), read_png(dir / "im2.png"), read_png(dir / "im3.png"), 0.5};
      if (!t.frame0.same_shape(t.gt) || !t.frame0.same_shape(t.frame1))
        throw std::runtime_error("dimension mismatch between im1/im2/im3");
      out.triplets.push_back(std::move(t));
    } catch (const std::exception& e) {
      out.skipped.push_back(id + ": " + e.what());
      std::cerr << "skipping triplet " << id << ": " << e.what() << '\n';
    }
  }
  return out;
}

void save_triplet(const fs::path& dir, const Triplet& triplet) {
  fs::create_directories(dir);
  write_png(dir / "im1.png", triplet.frame0);
  write_png(dir / "im2.png", triplet.gt);
  write_png(dir / "im3.png", triplet.frame1);
}

}  // namespace abme::harness
