#include "odflow/aaa.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "odflow/error.hpp"

namespace odflow {

std::string_view to_string(RoadClass road_class) {
  return road_class == RoadClass::main ? "main" : "secondary";
}

std::optional<RoadClass> parse_road_class(std::string_view text) {
  if (text == "main") return RoadClass::main;
  if (text == "secondary") return RoadClass::secondary;
  return std::nullopt;
}

double RoadSegment::length() const { return std::hypot(b.x - a.x, b.y - a.y); }

RoadNetwork::RoadNetwork(std::vector<RoadSegment> segments) : segments_(std::move(segments)) {
  index_.resize(segments_.size());
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& s = segments_[k];
    if (!std::isfinite(s.a.x) || !std::isfinite(s.a.y) || !std::isfinite(s.b.x) ||
        !std::isfinite(s.b.y))
      throw InvalidInput("road segment " + std::to_string(s.id) + " has non-finite coordinates");
    if (!(s.length() > 0.0))
      throw InvalidInput("road segment " + std::to_string(s.id) + " has zero length");
    index_[k] = k;
  }
  std::sort(index_.begin(), index_.end(),
            [&](std::size_t x, std::size_t y) { return segments_[x].id < segments_[y].id; });
  for (std::size_t k = 1; k < index_.size(); ++k) {
    if (segments_[index_[k]].id == segments_[index_[k - 1]].id)
      throw InvalidInput("duplicate road segment id " + std::to_string(segments_[index_[k]].id));
  }
}

const RoadSegment& RoadNetwork::segment(std::size_t id) const {
  auto it = std::lower_bound(index_.begin(), index_.end(), id,
                             [&](std::size_t k, std::size_t v) { return segments_[k].id < v; });
  if (it == index_.end() || segments_[*it].id != id)
    throw InvalidInput("unknown road segment id " + std::to_string(id));
  return segments_[*it];
}

Bounds RoadNetwork::bounds() const {
  std::vector<PlanePoint> pts;
  pts.reserve(segments_.size() * 2);
  for (const auto& s : segments_) {
    pts.push_back(s.a);
    pts.push_back(s.b);
  }
  return Bounds::enclosing(pts);
}

double RoadNetwork::default_snap_tolerance() const {
  const Bounds b = bounds();
  return 0.02 * std::hypot(b.width(), b.height());
}

Projection project_onto_segment(const PlanePoint& p, const RoadSegment& segment) {
  const double vx = segment.b.x - segment.a.x;
  const double vy = segment.b.y - segment.a.y;
  const double len2 = vx * vx + vy * vy;
  double t = ((p.x - segment.a.x) * vx + (p.y - segment.a.y) * vy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  Projection out;
  out.t = t;
  // Endpoints are returned exactly so snapped points sit on the network.
  if (t == 0.0) out.point = segment.a;
  else if (t == 1.0) out.point = segment.b;
  else out.point = {segment.a.x + t * vx, segment.a.y + t * vy};
  // Axis-aligned segments keep the fixed coordinate exact.
  if (vx == 0.0) out.point.x = segment.a.x;
  if (vy == 0.0) out.point.y = segment.a.y;
  out.distance = std::hypot(p.x - out.point.x, p.y - out.point.y);
  return out;
}

std::optional<Snap> snap_to_network(const PlanePoint& p, const RoadNetwork& network,
                                    double tolerance) {
  if (network.empty()) throw InvalidInput("cannot snap to an empty road network");
  if (!(tolerance >= 0.0)) throw InvalidParameter("snap tolerance must be non-negative");
  std::optional<Snap> best;
  for (const auto& s : network.segments()) {
    const auto proj = project_onto_segment(p, s);
    if (!best || proj.distance < best->distance ||
        (proj.distance == best->distance && s.id < best->segment_id)) {
      best = Snap{s.id, proj.point, proj.distance};
    }
  }
  if (best && best->distance <= tolerance) return best;
  return std::nullopt;
}

std::vector<PlanePoint> convex_hull(std::vector<PlanePoint> points) {
  std::sort(points.begin(), points.end(), [](const PlanePoint& a, const PlanePoint& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
  });
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() <= 2) return points;

  auto cross = [](const PlanePoint& o, const PlanePoint& a, const PlanePoint& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  // Andrew's monotone chain over the (y, x) order.
  std::vector<PlanePoint> hull(2 * points.size());
  std::size_t k = 0;
  for (const auto& p : points) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = points.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0.0) --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

AaaResult extract_aaa(const KeyCluster& cluster, const FlowDataset& dataset,
                      const RoadNetwork& network, double tolerance) {
  if (network.empty()) throw InvalidInput("cannot extract AAA on an empty road network");
  if (!(tolerance >= 0.0)) throw InvalidParameter("snap tolerance must be non-negative");
  AaaResult out;
  out.snap_tolerance = tolerance;
  if (cluster.member_ids.empty()) {
    out.empty_cluster = true;
    return out;
  }
  std::set<std::size_t> o_ids, d_ids;
  std::vector<PlanePoint> o_pts, d_pts;
  for (auto id : cluster.member_ids) {
    const Flow& f = dataset.flow(id);
    o_pts.push_back(f.origin);
    d_pts.push_back(f.destination);
    if (auto s = snap_to_network(f.origin, network, tolerance)) o_ids.insert(s->segment_id);
    if (auto s = snap_to_network(f.destination, network, tolerance)) d_ids.insert(s->segment_id);
  }
  out.o_segment_ids.assign(o_ids.begin(), o_ids.end());
  out.d_segment_ids.assign(d_ids.begin(), d_ids.end());
  out.o_hull = convex_hull(std::move(o_pts));
  out.d_hull = convex_hull(std::move(d_pts));
  return out;
}

}  // namespace odflow
