#include "odflow/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "odflow/clustering.hpp"
#include "odflow/error.hpp"
#include "odflow/simgen.hpp"

namespace odflow {

EvalReport score(std::span<const std::size_t> predicted, std::span<const Label> labels) {
  if (labels.empty()) throw InvalidInput("scoring needs ground-truth labels");
  std::vector<char> seen(labels.size(), 0);
  std::size_t n_pred = 0, hits = 0;
  for (auto id : predicted) {
    if (id >= labels.size()) throw InvalidInput("predicted id " + std::to_string(id) + " out of range");
    if (seen[id]) continue;
    seen[id] = 1;
    ++n_pred;
    if (labels[id] == Label::aggregated) ++hits;
  }
  const auto positives = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), Label::aggregated));
  EvalReport out;
  out.n_predicted = n_pred;
  out.precision = n_pred ? static_cast<double>(hits) / static_cast<double>(n_pred) : 0.0;
  out.recall = positives ? static_cast<double>(hits) / static_cast<double>(positives) : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

EvalReport score(std::span<const std::size_t> predicted, const FlowDataset& dataset) {
  if (!dataset.has_labels()) throw InvalidInput("scoring needs ground-truth labels");
  return score(predicted, dataset.labels());
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::mlf: return "mlf";
    case Method::elf: return "elf";
    case Method::dbscan: return "dbscan";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "mlf") return Method::mlf;
  if (text == "elf") return Method::elf;
  if (text == "dbscan") return Method::dbscan;
  return std::nullopt;
}

std::uint64_t cell_seed(std::uint64_t master_seed, int pattern, std::size_t seed_index) {
  return master_seed + 1000u * static_cast<std::uint64_t>(pattern) + seed_index;
}

const BenchmarkRow& BenchmarkResult::average(Method method) const {
  for (const auto& row : rows) {
    if (row.pattern == "average" && row.method == method) return row;
  }
  throw InvalidInput("benchmark has no average row for " + std::string(to_string(method)));
}

namespace {

BenchmarkCell run_l_method(const FlowDataset& data, const DistanceSpec& spec,
                           const std::vector<double>& grid, const BenchmarkConfig& config) {
  BenchmarkCell cell;
  const DistanceMatrix distances(data, spec);
  const LCurve curve = compute_l_curve(distances, grid, std::nullopt,
                                       config.detection.smoothing_window);
  const DetectedScales scales = detect_scales(curve, config.detection);
  cell.scale_found = scales.found;
  if (!scales.found) {
    // Nothing detected: the prediction is empty.
    cell.report = score(std::span<const std::size_t>{}, data);
    return cell;
  }
  const auto sweep =
      key_cluster_sweep(distances, scales.maximal_scale, config.t_max, curve.lambda_used);
  for (std::size_t t = 0; t < sweep.size(); ++t) {
    const EvalReport rep = score(sweep[t].member_ids, data);
    if (cell.best_t == 0 || rep.f1 > cell.report.f1) {
      cell.report = rep;
      cell.best_t = t + 1;
    }
  }
  cell.report.detected_scale = scales.maximal_scale;
  return cell;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  if (config.seeds_per_pattern == 0) throw InvalidParameter("need at least one seed per pattern");
  if (config.patterns.empty()) throw InvalidParameter("need at least one pattern");
  if (config.methods.empty()) throw InvalidParameter("need at least one method");
  if (config.t_max == 0) throw InvalidParameter("t_max must be at least 1");
  for (int p : config.patterns) grid_pattern(p);

  BenchmarkResult result;
  result.config = config;
  for (int pattern : config.patterns) {
    const RoadNetwork network = generate_network(pattern);
    for (std::size_t s = 0; s < config.seeds_per_pattern; ++s) {
      SimConfig sim;
      sim.pattern = pattern;
      sim.seed = cell_seed(config.master_seed, pattern, s);
      const SimulatedData data = generate_dataset(sim, network);
      const auto grid = default_r_grid(data.dataset.domain(), config.grid_steps);
      for (Method m : config.methods) {
        BenchmarkCell cell;
        if (m == Method::dbscan) {
          const auto labels = flow_dbscan(DistanceMatrix(data.dataset, DistanceSpec{}), sim.scale,
                                          config.dbscan_min_pts);
          cell.report = score(largest_cluster(labels), data.dataset);
          cell.report.detected_scale = sim.scale;
        } else {
          const auto spec = m == Method::mlf ? DistanceSpec::maximum_manhattan()
                                             : DistanceSpec::maximum_euclidean();
          cell = run_l_method(data.dataset, spec, grid, config);
        }
        cell.pattern = pattern;
        cell.seed_index = s;
        cell.method = m;
        result.cells.push_back(cell);
      }
    }
  }

  // Accumulate in a fixed key order so the sums do not depend on cell order.
  auto accumulate = [&](auto select, const std::string& name, Method m) {
    BenchmarkRow row;
    row.pattern = name;
    row.method = m;
    for (const auto& c : result.cells) {
      if (c.method != m || !select(c)) continue;
      row.scale += c.report.detected_scale;
      row.precision += c.report.precision;
      row.recall += c.report.recall;
      row.f1 += c.report.f1;
      row.n_predicted += static_cast<double>(c.report.n_predicted);
      ++row.cells;
    }
    if (row.cells) {
      const double k = static_cast<double>(row.cells);
      row.scale /= k;
      row.precision /= k;
      row.recall /= k;
      row.f1 /= k;
      row.n_predicted /= k;
    }
    return row;
  };
  for (int pattern : config.patterns) {
    for (Method m : config.methods) {
      result.rows.push_back(accumulate([&](const BenchmarkCell& c) { return c.pattern == pattern; },
                                       std::to_string(pattern), m));
    }
  }
  for (Method m : config.methods) {
    result.rows.push_back(accumulate([](const BenchmarkCell&) { return true; }, "average", m));
  }
  return result;
}

}  // namespace odflow
