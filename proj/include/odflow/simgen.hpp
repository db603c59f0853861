#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "odflow/aaa.hpp"
#include "odflow/flow.hpp"

namespace odflow {

/// One row of the layout table. Grid lines sit at anchor + k * pitch inside
/// [0, 1] plus the two boundary lines; every segment on a listed main line
/// is main.
struct GridPattern {
  int pattern = 0;
  double pitch_x = 0.05;  ///< spacing of the vertical lines
  double pitch_y = 0.05;  ///< spacing of the horizontal lines
  double anchor = 0.3;
  std::vector<double> main_horizontal;  ///< y of main horizontal lines
  std::vector<double> main_vertical;    ///< x of main vertical lines
};

inline constexpr int kPatternCount = 8;

/// Layout table row for pattern 1..8; InvalidParameter outside that range.
const GridPattern& grid_pattern(int pattern);

/// Axis-aligned grid on the unit square split at every crossing. Ids run
/// over the main segments first, then the secondary ones; within a class,
/// horizontal segments (by y, then x) precede vertical ones (by x, then y).
RoadNetwork grid_network(const GridPattern& layout);
RoadNetwork generate_network(int pattern);

struct SimConfig {
  int pattern = 1;
  std::size_t n_aggregated = 300;
  std::size_t n_noise = 100;
  std::size_t n_background = 300;
  Flow centre_flow{{0.3, 0.3}, {0.7, 0.7}};
  double scale = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedData {
  FlowDataset dataset;  ///< unit domain; aggregated, then noise, then background
  RoadNetwork network;
};

/// Aggregated endpoints are uniform by length on main segments inside the
/// Manhattan ball of radius `scale` around the centre endpoint; noise
/// endpoints on secondary segments inside the Euclidean disk; background
/// endpoints on every segment.
SimulatedData generate_dataset(const SimConfig& config);
SimulatedData generate_dataset(const SimConfig& config, const RoadNetwork& network);

}  // namespace odflow
