#pragma once

#include "abme/estimator.hpp"
#include "abme/harness/dataset.hpp"
#include "abme/synthesis.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace abme::harness {

struct ReportRow {
  std::string id;
  std::string method;
  double psnr_db = 0;  ///< +inf when the output matches gt exactly
  double ssim = 0;
  double charbonnier = 0;
  double census = 0;
  double wall_ms = 0;
  std::optional<std::string> error;
};

inline constexpr const char* kAggregateId = "mean";

struct BenchmarkOptions {
  SearchParams search;
  FilterParams filter;
  bool timing = true;  ///< when false, wall_ms is reported as 0 for reproducible reports
};

/// Interpolates every triplet with every method, scores against gt, and
/// appends one aggregate row per method (id "mean", arithmetic means over
/// the method's successful rows). Failures become rows with `error` set.
std::vector<ReportRow> run_benchmark(const std::vector<Triplet>& triplets, const std::vector<Method>& methods,
                                     const BenchmarkOptions& options);

/// "%#.6g", or "inf" / "nan".
std::string format_value(double value);

/// CSV with header id,method,psnr_db,ssim,charbonnier,census,wall_ms.
/// Throws std::runtime_error naming the path on I/O failure.
void write_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

}  // namespace abme::harness
