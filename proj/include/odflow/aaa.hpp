#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "odflow/clustering.hpp"
#include "odflow/flow.hpp"

namespace odflow {

enum class RoadClass { main, secondary };

std::string_view to_string(RoadClass road_class);
std::optional<RoadClass> parse_road_class(std::string_view text);

struct RoadSegment {
  std::size_t id = 0;
  PlanePoint a;
  PlanePoint b;
  RoadClass road_class = RoadClass::secondary;

  double length() const;
};

/// Road segments with unique ids and positive lengths.
class RoadNetwork {
 public:
  RoadNetwork() = default;
  explicit RoadNetwork(std::vector<RoadSegment> segments);

  std::span<const RoadSegment> segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }
  /// Throws InvalidInput for an unknown id.
  const RoadSegment& segment(std::size_t id) const;
  Bounds bounds() const;
  /// 2% of the bounding-box diagonal.
  double default_snap_tolerance() const;

 private:
  std::vector<RoadSegment> segments_;
  std::vector<std::size_t> index_;  // id -> position, sorted by id
};

struct Projection {
  PlanePoint point;
  double t = 0.0;         ///< parameter along a->b in [0, 1]
  double distance = 0.0;  ///< Euclidean
};

Projection project_onto_segment(const PlanePoint& p, const RoadSegment& segment);

struct Snap {
  std::size_t segment_id = 0;
  PlanePoint point;
  double distance = 0.0;
};

/// Nearest segment by Euclidean point-to-segment distance, if within
/// tolerance. Equal distances go to the smaller segment id.
std::optional<Snap> snap_to_network(const PlanePoint& p, const RoadNetwork& network,
                                    double tolerance);

/// Convex hull, counter-clockwise, starting at the lowest-then-leftmost
/// vertex, without collinear vertices. Collinear input gives its two extreme
/// points; a single distinct point gives one vertex.
std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> points);

struct AaaResult {
  std::vector<std::size_t> o_segment_ids;  ///< ascending
  std::vector<std::size_t> d_segment_ids;  ///< ascending
  std::vector<PlanePoint> o_hull;
  std::vector<PlanePoint> d_hull;
  double snap_tolerance = 0.0;
  bool empty_cluster = false;
};

/// Road segments receiving at least one snapped origin (destination) of a
/// member flow, plus the convex hulls of the member O and D points.
AaaResult extract_aaa(const KeyCluster& cluster, const FlowDataset& dataset,
                      const RoadNetwork& network, double tolerance);

}  // namespace odflow
