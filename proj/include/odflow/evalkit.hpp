#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odflow/flow.hpp"
#include "odflow/lstat.hpp"

namespace odflow {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double detected_scale = 0.0;
  std::size_t n_predicted = 0;
};

/// Positives are the flows labelled aggregated. Duplicate ids count once.
EvalReport score(std::span<const std::size_t> predicted, std::span<const Label> labels);
EvalReport score(std::span<const std::size_t> predicted, const FlowDataset& dataset);

enum class Method { mlf, elf, dbscan };
std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view text);

struct BenchmarkConfig {
  std::vector<int> patterns{1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t seeds_per_pattern = 20;
  std::uint64_t master_seed = 0;
  std::vector<Method> methods{Method::mlf, Method::elf, Method::dbscan};
  std::size_t t_max = 40;
  std::size_t grid_steps = 100;
  std::size_t dbscan_min_pts = 10;
  ScaleDetectionOptions detection;
};

/// Seed of one pattern x seed cell.
std::uint64_t cell_seed(std::uint64_t master_seed, int pattern, std::size_t seed_index);

struct BenchmarkCell {
  int pattern = 0;
  std::size_t seed_index = 0;
  Method method = Method::mlf;
  EvalReport report;
  std::size_t best_t = 0;  ///< 0 for DBSCAN
  bool scale_found = true;
};

struct BenchmarkRow {
  std::string pattern;  ///< "1".."8" or "average"
  Method method = Method::mlf;
  double scale = 0.0;   ///< mean detected scale; DBSCAN reports epsilon
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double n_predicted = 0.0;
  std::size_t cells = 0;
};

struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<BenchmarkCell> cells;
  std::vector<BenchmarkRow> rows;  ///< per pattern and method, then the averages

  const BenchmarkRow& average(Method method) const;
};

/// Generates every pattern x seed dataset and scores each method on it. MLF
/// and ELF detect a scale from the L-curve of their metric and cluster with
/// the best-F1 T in 1..t_max; DBSCAN uses the planted scale as epsilon under
/// the Manhattan maximum metric and predicts its largest cluster.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace odflow
