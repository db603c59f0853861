#include "odflow/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "odflow/error.hpp"
#include "odflow/lstat.hpp"

namespace odflow {

namespace {

void require_scale(double scale) {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidParameter("scale must be non-negative");
}

void require_top_t(std::size_t top_t, std::size_t n) {
  if (top_t == 0) throw InvalidParameter("top_t must be at least 1");
  if (top_t > n)
    throw InvalidParameter("top_t (" + std::to_string(top_t) + ") exceeds the number of flows (" +
                           std::to_string(n) + ")");
}

// L_i is strictly increasing in the neighbour count, so ranking counts ranks L_i.
std::vector<std::size_t> rank_by_count(const std::vector<std::size_t>& counts) {
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  return order;
}

std::vector<std::size_t> neighbour_counts(const DistanceMatrix& distances, double scale) {
  std::vector<std::size_t> counts(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i) counts[i] = distances.count_within(i, scale);
  return counts;
}

}  // namespace

std::vector<std::size_t> select_core_flows(const FlowDataset& dataset, double scale,
                                           std::size_t top_t, double lambda,
                                           const DistanceSpec& spec) {
  return select_core_flows(DistanceMatrix(dataset, spec), scale, top_t, lambda);
}

std::vector<std::size_t> select_core_flows(const DistanceMatrix& distances, double scale,
                                           std::size_t top_t, double lambda) {
  require_scale(scale);
  require_top_t(top_t, distances.size());
  if (!(lambda > 0.0)) throw InvalidParameter("intensity lambda must be positive");
  auto order = rank_by_count(neighbour_counts(distances, scale));
  order.resize(top_t);
  return order;
}

std::vector<std::size_t> neighborhood(const FlowDataset& dataset, std::size_t i, double scale,
                                      const DistanceSpec& spec) {
  require_scale(scale);
  spec.validate();
  const Flow& centre = dataset.flow(i);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    if (j == i || flow_distance(centre, dataset[j], spec) <= scale) out.push_back(j);
  }
  return out;
}

KeyCluster extract_key_cluster(const FlowDataset& dataset, const ClusterConfig& config,
                               double lambda) {
  return extract_key_cluster(DistanceMatrix(dataset, config.spec), config.scale, config.top_t,
                             lambda);
}

KeyCluster extract_key_cluster(const DistanceMatrix& distances, double scale, std::size_t top_t,
                               double lambda) {
  require_top_t(top_t, distances.size());
  auto sweep = key_cluster_sweep(distances, scale, top_t, lambda);
  return std::move(sweep.back());
}

std::vector<KeyCluster> key_cluster_sweep(const DistanceMatrix& distances, double scale,
                                          std::size_t max_t, double lambda) {
  require_scale(scale);
  if (!(lambda > 0.0)) throw InvalidParameter("intensity lambda must be positive");
  const std::size_t n = distances.size();
  if (n == 0) throw InsufficientData("cannot cluster an empty dataset");
  if (max_t == 0) throw InvalidParameter("max_t must be at least 1");
  max_t = std::min(max_t, n);

  const auto counts = neighbour_counts(distances, scale);
  const auto order = rank_by_count(counts);

  std::vector<KeyCluster> out;
  out.reserve(max_t);
  std::vector<char> member(n, 1);
  KeyCluster current;
  current.scale = scale;
  for (std::size_t t = 0; t < max_t; ++t) {
    const std::size_t core = order[t];
    const auto row = distances.row(core);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != core && row[j] > scale) member[j] = 0;
    }
    current.core_flow_ids.push_back(core);
    current.local_l_values.push_back(local_l_from_count(counts[core], n, scale, lambda));
    current.member_ids.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (member[j]) current.member_ids.push_back(j);
    }
    out.push_back(current);
  }
  return out;
}

std::vector<int> flow_dbscan(const FlowDataset& dataset, const DbscanConfig& config) {
  return flow_dbscan(DistanceMatrix(dataset, config.spec), config.epsilon, config.min_pts);
}

std::vector<int> flow_dbscan(const DistanceMatrix& distances, double epsilon, std::size_t min_pts) {
  if (!(epsilon > 0.0)) throw InvalidParameter("DBSCAN epsilon must be positive");
  if (min_pts == 0) throw InvalidParameter("DBSCAN min_pts must be at least 1");
  constexpr int kUnvisited = -2;
  const std::size_t n = distances.size();

  auto region = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const auto row = distances.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || row[j] <= epsilon) out.push_back(j);
    }
    return out;
  };

  std::vector<int> labels(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    const auto seeds = region(i);
    if (seeds.size() < min_pts) {
      labels[i] = kDbscanNoise;
      continue;
    }
    labels[i] = cluster;
    std::vector<std::size_t> queue(seeds.begin(), seeds.end());
    std::vector<char> queued(n, 0);
    for (auto s : queue) queued[s] = 1;
    for (std::size_t k = 0; k < queue.size(); ++k) {
      const std::size_t q = queue[k];
      if (labels[q] == kDbscanNoise) labels[q] = cluster;  // border flow
      if (labels[q] != kUnvisited) continue;
      labels[q] = cluster;
      const auto reach = region(q);
      if (reach.size() < min_pts) continue;
      for (auto r : reach) {
        if (!queued[r]) {
          queued[r] = 1;
          queue.push_back(r);
        }
      }
    }
    ++cluster;
  }
  return labels;
}

std::vector<std::size_t> largest_cluster(const std::vector<int>& labels) {
  int max_id = -1;
  for (int l : labels) max_id = std::max(max_id, l);
  if (max_id < 0) return {};
  std::vector<std::size_t> sizes(static_cast<std::size_t>(max_id) + 1, 0);
  for (int l : labels) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  const auto best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == best) out.push_back(i);
  }
  return out;
}

}  // namespace odflow
