#pragma once

#include <cstddef>
#include <vector>

#include "odflow/flow.hpp"

namespace odflow {

struct ClusterConfig {
  double scale = 0.0;  ///< R-hat
  std::size_t top_t = 1;
  DistanceSpec spec;
};

/// Intersection of the R-hat neighbourhoods of the T core flows.
struct KeyCluster {
  std::vector<std::size_t> core_flow_ids;  ///< descending local L
  std::vector<double> local_l_values;      ///< one per core flow
  std::vector<std::size_t> member_ids;     ///< ascending
  double scale = 0.0;
  bool empty_intersection() const { return member_ids.empty(); }
};

/// The top_t flows by L_i(scale), descending; ties go to the smaller id.
std::vector<std::size_t> select_core_flows(const FlowDataset& dataset, double scale,
                                           std::size_t top_t, double lambda,
                                           const DistanceSpec& spec);
std::vector<std::size_t> select_core_flows(const DistanceMatrix& distances, double scale,
                                           std::size_t top_t, double lambda);

/// All flows within scale of flow i, i itself included; ascending ids.
std::vector<std::size_t> neighborhood(const FlowDataset& dataset, std::size_t i, double scale,
                                      const DistanceSpec& spec);

KeyCluster extract_key_cluster(const FlowDataset& dataset, const ClusterConfig& config,
                               double lambda);
KeyCluster extract_key_cluster(const DistanceMatrix& distances, double scale, std::size_t top_t,
                               double lambda);

/// Key clusters for T = 1..max_t sharing one core ranking; element t-1 holds
/// the cluster for T = t. max_t is clamped to n.
std::vector<KeyCluster> key_cluster_sweep(const DistanceMatrix& distances, double scale,
                                          std::size_t max_t, double lambda);

struct DbscanConfig {
  double epsilon = 0.1;
  std::size_t min_pts = 10;
  DistanceSpec spec;
};

inline constexpr int kDbscanNoise = -1;

/// Cluster id per flow (0, 1, ...) or kDbscanNoise. A flow is core when its
/// epsilon-neighbourhood, itself included, holds at least min_pts flows.
/// Flows are scanned in ascending id order.
std::vector<int> flow_dbscan(const FlowDataset& dataset, const DbscanConfig& config);
std::vector<int> flow_dbscan(const DistanceMatrix& distances, double epsilon, std::size_t min_pts);

/// Ids of the most populous DBSCAN cluster (smaller cluster id on ties);
/// empty when everything is noise.
std::vector<std::size_t> largest_cluster(const std::vector<int>& labels);

}  // namespace odflow
