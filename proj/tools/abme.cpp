// Command-line front end: interpolate, bench, synth.

#include "abme/abme.hpp"
#include "abme/harness/benchmark.hpp"
#include "abme/harness/dataset.hpp"
#include "abme/harness/image_io.hpp"
#include "abme/harness/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace abme;
using namespace abme::harness;

namespace {

struct Tuning {
  SearchParams search;
  FilterParams filter;
  std::string cost = "sad";
  bool no_subpixel = false;
  int threads = 1;

  void apply() {
    search.cost = cost == "census" ? CostKind::Census : CostKind::SAD;
    search.subpixel = !no_subpixel;
    set_thread_count(threads);
  }
};

// Tuning options live on the top-level app; subcommands fall through to
// them, so they may be given after the subcommand name or in the config file.
void add_tuning(CLI::App* cmd, Tuning& tuning) {
  cmd->set_config("--config", "", "Flat `key = value` file; flags override it");
  cmd->add_option("--levels", tuning.search.levels, "Symmetric search pyramid depth")->capture_default_str();
  cmd->add_option("--radius", tuning.search.radius, "Search radius per level (pixels)")->capture_default_str();
  cmd->add_option("--patch", tuning.search.patch, "Odd matching window side")->capture_default_str();
  cmd->add_option("--cost", tuning.cost, "Matching cost")->check(CLI::IsMember({"sad", "census"}))->capture_default_str();
  cmd->add_option("--beta", tuning.search.beta, "Reliability sharpness")->capture_default_str();
  cmd->add_option("--gamma", tuning.filter.gamma, "Fusion weight sharpness")->capture_default_str();
  cmd->add_option("--sigma", tuning.filter.sigma, "Fusion tap spread")->capture_default_str();
  cmd->add_flag("--no-subpixel", tuning.no_subpixel, "Disable parabolic subpixel refinement");
  cmd->add_option("--threads", tuning.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> methods;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) methods.push_back(parse_method(item));
  if (methods.empty()) throw std::invalid_argument("no methods given");
  return methods;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral motion frame interpolation"};
  app.require_subcommand(1);
  app.fallthrough();

  Tuning tuning;
  add_tuning(&app, tuning);

  auto* interp = app.add_subcommand("interpolate", "Synthesize the frame between two PNGs");
  std::string frame0, frame1, out, method = "full";
  double t = 0.5;
  interp->add_option("--frame0", frame0, "First input frame")->required()->check(CLI::ExistingFile);
  interp->add_option("--frame1", frame1, "Second input frame")->required()->check(CLI::ExistingFile);
  interp->add_option("--t", t, "Time of the output in (0,1)")->capture_default_str();
  interp->add_option("--method", method, "approx1|approx2|sbmf|abmf|full")->capture_default_str();
  interp->add_option("--out", out, "Output PNG")->required();

  auto* bench = app.add_subcommand("bench", "Score methods on a triplet directory");
  std::string dataset, methods = "approx1,approx2,sbmf,abmf,full", report;
  bool no_timing = false;
  bench->add_option("--dataset", dataset, "Directory of im1/im2/im3 folders")->required();
  bench->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  bench->add_option("--report", report, "Output CSV")->required();
  bench->add_flag("--no-timing", no_timing, "Report wall_ms as 0 so reports are reproducible byte for byte");

  auto* synth = app.add_subcommand("synth", "Generate synthetic triplets");
  std::uint64_t seed = 0;
  std::string kind = "translate", out_dir;
  int count = 1, size = 128;
  synth->add_option("--seed", seed, "First seed; triplet i uses seed + i")->capture_default_str();
  synth->add_option("--kind", kind, "translate|accelerate|occlude|rotate")->capture_default_str();
  synth->add_option("--count", count, "Number of triplets")->check(CLI::PositiveNumber)->capture_default_str();
  synth->add_option("--size", size, "Frame side in pixels (>= 32)")->capture_default_str();
  synth->add_option("--out", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*interp) {
      tuning.apply();
      const Framed f0 = read_png(frame0);
      const Framed f1 = read_png(frame1);
      const Framed result = interpolate(f0, f1, t, tuning.search, parse_method(method), tuning.filter);
      write_png(out, result);
    } else if (*bench) {
      tuning.apply();
      const auto load = load_triplet_dir(dataset);
      if (load.triplets.empty()) throw std::runtime_error("no usable triplets in " + dataset);
      BenchmarkOptions options{tuning.search, tuning.filter, !no_timing};
      const auto rows = run_benchmark(load.triplets, parse_methods(methods), options);
      write_report(rows, report);
      for (const auto& row : rows)
        if (row.id == kAggregateId) {
          if (row.error)
            std::cerr << row.method << ": " << *row.error << '\n';
          else
            std::cerr << row.method << ": psnr " << format_value(row.psnr_db) << " dB, ssim " << format_value(row.ssim)
                      << '\n';
        }
    } else if (*synth) {
      const SceneKind k = parse_scene_kind(kind);
      for (int i = 0; i < count; ++i) {
        const auto scene = gen_synthetic(seed + static_cast<std::uint64_t>(i), k, size);
        save_triplet(fs::path(out_dir) / scene.triplet.id, scene.triplet);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
