#include "abme/harness/benchmark.hpp"

#include "abme/metrics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace abme::harness {

std::vector<ReportRow> run_benchmark(const std::vector<Triplet>& triplets, const std::vector<Method>& methods,
                                     const BenchmarkOptions& options) {
  detail::require(!triplets.empty(), "run_benchmark: no triplets");
  detail::require(!methods.empty(), "run_benchmark: no methods");
  options.search.validate();

  std::vector<ReportRow> rows;
  rows.reserve(triplets.size() * methods.size() + methods.size());
  for (const auto& triplet : triplets) {
    for (Method method : methods) {
      ReportRow row;
      row.id = triplet.id;
      row.method = to_string(method);
      try {
        triplet.validate();
        const auto start = std::chrono::steady_clock::now();
        const Framed out = interpolate(triplet.frame0, triplet.frame1, triplet.t, options.search, method, options.filter);
        const auto stop = std::chrono::steady_clock::now();
        row.psnr_db = psnr(out, triplet.gt);
        row.ssim = ssim(out, triplet.gt);
        row.charbonnier = charbonnier(out, triplet.gt);
        row.census = census_distance(out, triplet.gt);
        row.wall_ms = options.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      } catch (const std::exception& e) {
        row.error = e.what();
        std::cerr << "benchmark " << triplet.id << "/" << row.method << " failed: " << e.what() << '\n';
      }
      rows.push_back(std::move(row));
    }
  }

  for (Method method : methods) {
    ReportRow mean;
    mean.id = kAggregateId;
    mean.method = to_string(method);
    int n = 0;
    for (const auto& row : rows) {
      if (row.method != mean.method || row.error || row.id == kAggregateId) continue;
      mean.psnr_db += row.psnr_db;
      mean.ssim += row.ssim;
      mean.charbonnier += row.charbonnier;
      mean.census += row.census;
      mean.wall_ms += row.wall_ms;
      ++n;
    }
    if (n == 0) {
      mean.error = "no successful rows";
    } else {
      mean.psnr_db /= n;
      mean.ssim /= n;
      mean.charbonnier /= n;
      mean.census /= n;
      mean.wall_ms /= n;
    }
    rows.push_back(std::move(mean));
  }
  return rows;
}

std::string format_value(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", value);
  return buf;
}

void write_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report " + path.string() + " for writing");
  out << "id,method,psnr_db,ssim,charbonnier,census,wall_ms\n";
  for (const auto& row : rows) {
    out << row.id << ',' << row.method;
    if (row.error) {
      out << ",nan,nan,nan,nan,nan\n";
      continue;
    }
    for (double v : {row.psnr_db, row.ssim, row.charbonnier, row.census, row.wall_ms}) out << ',' << format_value(v);
    out << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing report " + path.string());
}

}  // namespace abme::harness
