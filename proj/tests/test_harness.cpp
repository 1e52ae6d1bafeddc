#include "abme/harness/benchmark.hpp"
#include "abme/harness/dataset.hpp"
#include "abme/harness/image_io.hpp"
#include "abme/harness/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace abme;
using namespace abme::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("abme_test_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(ABME_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("png round trip is exact on the 8-bit grid") {
  std::mt19937_64 rng(51);
  const Framed f = quantize8(abme::testing::random_frame(rng, 17, 11));
  const fs::path dir = scratch("png");
  write_png(dir / "a.png", f);
  const Framed g = read_png(dir / "a.png");
  CHECK(g == f);
  CHECK_THROWS_AS(read_png(dir / "missing.png"), std::runtime_error);
}

TEST_CASE("quantization rounds half away from zero") {
  Framed f(2, 1, 1);
  f(0, 0) = 0.5 / 255.0;
  f(1, 0) = 1.7;
  const Framed q = quantize8(f);
  CHECK(q(0, 0) == doctest::Approx(1.0 / 255.0));
  CHECK(q(1, 0) == 1.0);
}

TEST_CASE("gray frames are written as RGB") {
  const fs::path dir = scratch("gray");
  write_png(dir / "g.png", Framed(4, 4, 1, 0.2));
  const Framed g = read_png(dir / "g.png");
  CHECK(g.channels() == 3);
  CHECK(g(1, 1, 2) == doctest::Approx(51.0 / 255.0));
}

TEST_CASE("triplet directory loading skips bad folders") {
  const fs::path dir = scratch("dataset");
  const auto scene = gen_synthetic(3, SceneKind::Translate, 32);
  save_triplet(dir / "b_good", scene.triplet);
  save_triplet(dir / "a_good", scene.triplet);
  fs::create_directories(dir / "c_missing");
  write_png(dir / "c_missing" / "im1.png", scene.triplet.frame0);
  save_triplet(dir / "d_mismatch", scene.triplet);
  write_png(dir / "d_mismatch" / "im2.png", Framed(16, 16, 3));

  const auto load = load_triplet_dir(dir);
  REQUIRE(load.triplets.size() == 2);
  CHECK(load.triplets[0].id == "a_good");
  CHECK(load.triplets[1].id == "b_good");
  CHECK(load.skipped.size() == 2);
  CHECK(load.triplets[0].gt == quantize8(scene.triplet.gt));
  CHECK_THROWS_AS(load_triplet_dir(dir / "nope"), std::runtime_error);
}

TEST_CASE("synthetic scenes are a pure function of their inputs") {
  for (SceneKind k : {SceneKind::Translate, SceneKind::Accelerate, SceneKind::Occlude, SceneKind::Rotate}) {
    const auto a = gen_synthetic(9, k, 48);
    const auto b = gen_synthetic(9, k, 48);
    CHECK(a.triplet.frame0 == b.triplet.frame0);
    CHECK(a.triplet.gt == b.triplet.gt);
    CHECK(a.true_t1 == b.true_t1);
    CHECK(a.triplet.frame0.is_valid());
    CHECK(parse_scene_kind(to_string(k)) == k);
  }
  CHECK_FALSE(gen_synthetic(1, SceneKind::Translate, 48).triplet.frame0 ==
              gen_synthetic(2, SceneKind::Translate, 48).triplet.frame0);
  CHECK_THROWS_AS(gen_synthetic(0, SceneKind::Translate, 16), std::invalid_argument);
}

TEST_CASE("translate ground truth sits at the linear midpoint") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = gen_synthetic(seed, SceneKind::Translate, 64);
    CHECK(s.sprite_to_mid.isApprox(s.sprite_to_end / 2.0));
    // true Vt1 on the sprite is half the end displacement
    const double expected = s.sprite_to_end.x() / 2.0;
    bool found = false;
    for (int y = 0; y < 64 && !found; ++y)
      for (int x = 0; x < 64 && !found; ++x)
        if (s.true_t1.dx()(y, x) != 0.0 || s.true_t1.dy()(y, x) != 0.0) {
          CHECK(s.true_t1.dx()(y, x) == doctest::Approx(expected));
          CHECK(s.true_t0.dx()(y, x) == doctest::Approx(-expected));
          found = true;
        }
    CHECK(found);
  }
}

TEST_CASE("accelerate ground truth is off the linear midpoint by half the step") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = gen_synthetic(seed, SceneKind::Accelerate, 64);
    const Eigen::Vector2d linear = s.sprite_to_end / 2.0;
    // positions 0, d, 3d: linear midpoint 1.5 d, true d
    CHECK((linear - s.sprite_to_mid).isApprox(s.sprite_to_mid / 2.0));
    CHECK(s.sprite_to_mid.norm() > 0.0);
  }
}

TEST_CASE("report values use six significant digits") {
  CHECK(format_value(20.0) == "20.0000");
  CHECK(format_value(0.123456789) == "0.123457");
  CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_value(std::nan("")) == "nan");
}

TEST_CASE("benchmark aggregates are the mean of the data rows") {
  std::vector<Triplet> triplets;
  for (std::uint64_t seed = 0; seed < 3; ++seed) triplets.push_back(gen_synthetic(seed, SceneKind::Translate, 64).triplet);
  BenchmarkOptions opt;
  opt.search.levels = 2;
  const auto rows = run_benchmark(triplets, {Method::Approx1, Method::SBMF}, opt);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].id == triplets[0].id);
  CHECK(rows[1].method == "sbmf");
  CHECK(rows[6].id == kAggregateId);
  double sum = 0;
  for (int i = 0; i < 6; i += 2) sum += rows[static_cast<std::size_t>(i)].psnr_db;
  CHECK(std::abs(rows[6].psnr_db - sum / 3.0) <= 1e-9);

  const fs::path dir = scratch("report");
  write_report(rows, dir / "r.csv");
  const std::string csv = slurp(dir / "r.csv");
  CHECK(csv.rfind("id,method,psnr_db,ssim,charbonnier,census,wall_ms\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  write_report({}, dir / "empty.csv");
  CHECK(slurp(dir / "empty.csv") == "id,method,psnr_db,ssim,charbonnier,census,wall_ms\n");
}

TEST_CASE("benchmark rows record per-triplet failures") {
  Triplet bad{"bad", Framed(32, 32, 3), Framed(32, 32, 3), Framed(16, 16, 3), 0.5};
  const auto rows = run_benchmark({bad}, {Method::SBMF}, BenchmarkOptions{});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].error.has_value());
  CHECK(rows[1].error.has_value());
}

TEST_CASE("identical inputs report infinite psnr") {
  const auto s = gen_synthetic(0, SceneKind::Translate, 64);
  Triplet still{"still", s.triplet.frame0, s.triplet.frame0, s.triplet.frame0, 0.5};
  BenchmarkOptions opt;
  opt.search.levels = 2;
  const auto rows = run_benchmark({still}, {Method::ABMF}, opt);
  CHECK(std::isinf(rows[0].psnr_db));
  const fs::path dir = scratch("inf");
  write_report(rows, dir / "r.csv");
  CHECK(slurp(dir / "r.csv").find("still,abmf,inf,") != std::string::npos);
}

TEST_CASE("command line synth, interpolate, and bench") {
  const fs::path dir = scratch("cli");
  const std::string d = dir.string();
  REQUIRE(run("synth --seed 5 --kind occlude --count 2 --size 64 --out " + d + "/data") == 0);
  CHECK(fs::exists(dir / "data" / "occlude_5" / "im2.png"));
  CHECK(fs::exists(dir / "data" / "occlude_6" / "im3.png"));

  const std::string f0 = d + "/data/occlude_5/im1.png";
  const std::string f1 = d + "/data/occlude_5/im3.png";
  CHECK(run("interpolate --frame0 " + f0 + " --frame1 " + f1 + " --t 0.5 --method full --levels 2 --out " + d +
            "/mid.png") == 0);
  CHECK(read_png(dir / "mid.png").width() == 64);

  {
    std::ofstream cfg(dir / "bench.ini");
    cfg << "levels = 2\nradius = 2\n";
  }
  CHECK(run("bench --dataset " + d + "/data --methods sbmf,abmf --no-timing --config " + d + "/bench.ini --report " +
            d + "/a.csv") == 0);
  CHECK(run("bench --dataset " + d + "/data --methods sbmf,abmf --no-timing --levels 2 --radius 2 --report " + d +
            "/b.csv") == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  {
    std::ofstream cfg(dir / "deep.ini");
    cfg << "levels = 9\nradius = 2\n";
  }
  // flags override the file
  CHECK(run("bench --dataset " + d + "/data --methods sbmf,abmf --no-timing --config " + d + "/deep.ini --levels 2 " +
            "--report " + d + "/c.csv") == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
  CHECK(slurp(dir / "a.csv").find("mean,abmf,") != std::string::npos);
}

TEST_CASE("command line failures exit nonzero") {
  const fs::path dir = scratch("cli_fail");
  CHECK(run("bench --dataset " + dir.string() + " --report " + (dir / "r.csv").string()) != 0);
  CHECK(run("interpolate --frame0 /nonexistent.png --frame1 /nonexistent.png --out x.png") != 0);
  CHECK(run("bench --dataset " + dir.string() + " --methods nope --report r.csv") != 0);
  CHECK(run("") != 0);
}
