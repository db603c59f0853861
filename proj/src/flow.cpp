#include "odflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odflow/error.hpp"

namespace odflow {

namespace {

bool finite(const PlanePoint& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

FlowDomain enclosing_domain(std::span<const Flow> flows) {
  if (flows.empty()) return FlowDomain{};
  std::vector<PlanePoint> origins, destinations;
  origins.reserve(flows.size());
  destinations.reserve(flows.size());
  for (const auto& f : flows) {
    origins.push_back(f.origin);
    destinations.push_back(f.destination);
  }
  return {Bounds::enclosing(origins), Bounds::enclosing(destinations)};
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::aggregated: return "aggregated";
    case Label::noise: return "noise";
    case Label::background: return "background";
    case Label::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "aggregated") return Label::aggregated;
  if (text == "noise") return Label::noise;
  if (text == "background") return Label::background;
  if (text == "unlabeled") return Label::unlabeled;
  return std::nullopt;
}

std::string_view to_string(PointMetric metric) {
  return metric == PointMetric::manhattan ? "manhattan" : "euclidean";
}

std::string_view to_string(Combinator combinator) {
  return combinator == Combinator::maximum ? "max" : "additive";
}

Bounds Bounds::enclosing(std::span<const PlanePoint> points) {
  if (points.empty()) throw InvalidInput("cannot compute bounds of an empty point set");
  Bounds b{points[0].x, points[0].y, points[0].x, points[0].y};
  for (const auto& p : points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

double FlowDomain::l1_diameter() const {
  return std::max(origin.width() + origin.height(), destination.width() + destination.height());
}

FlowDataset::FlowDataset(std::vector<Flow> flows, std::vector<Label> labels)
    : flows_(std::move(flows)), labels_(std::move(labels)) {
  for (const auto& f : flows_) {
    if (!finite(f.origin) || !finite(f.destination))
      throw InvalidInput("flow coordinates must be finite");
  }
  domain_ = enclosing_domain(flows_);
  validate();
}

FlowDataset::FlowDataset(std::vector<Flow> flows, std::vector<Label> labels, FlowDomain domain)
    : flows_(std::move(flows)), labels_(std::move(labels)), domain_(domain) {
  validate();
}

void FlowDataset::validate() const {
  if (!labels_.empty() && labels_.size() != flows_.size())
    throw InvalidInput("expected one label per flow (" + std::to_string(flows_.size()) +
                       "), got " + std::to_string(labels_.size()));
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const auto& f = flows_[i];
    if (!finite(f.origin) || !finite(f.destination))
      throw InvalidInput("flow " + std::to_string(i) + " has non-finite coordinates");
    if (!domain_.origin.contains(f.origin) || !domain_.destination.contains(f.destination))
      throw InvalidInput("flow " + std::to_string(i) + " lies outside the dataset domain");
  }
}

const Flow& FlowDataset::flow(std::size_t id) const {
  if (id >= flows_.size())
    throw InvalidInput("flow id " + std::to_string(id) + " out of range [0, " +
                       std::to_string(flows_.size()) + ")");
  return flows_[id];
}

Label FlowDataset::label(std::size_t id) const {
  if (labels_.empty()) return Label::unlabeled;
  if (id >= labels_.size()) throw InvalidInput("flow id " + std::to_string(id) + " out of range");
  return labels_[id];
}

FlowDataset FlowDataset::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InvalidParameter("scale factor must be positive and finite");
  auto scale = [factor](PlanePoint p) { return PlanePoint{p.x * factor, p.y * factor}; };
  auto scale_bounds = [factor](Bounds b) {
    return Bounds{b.min_x * factor, b.min_y * factor, b.max_x * factor, b.max_y * factor};
  };
  std::vector<Flow> out;
  out.reserve(flows_.size());
  for (const auto& f : flows_) out.push_back({scale(f.origin), scale(f.destination)});
  return FlowDataset(std::move(out), labels_,
                     {scale_bounds(domain_.origin), scale_bounds(domain_.destination)});
}

FlowDataset FlowDataset::translated(PlanePoint o_shift, PlanePoint d_shift) const {
  auto shift = [](PlanePoint p, PlanePoint s) { return PlanePoint{p.x + s.x, p.y + s.y}; };
  auto shift_bounds = [](Bounds b, PlanePoint s) {
    return Bounds{b.min_x + s.x, b.min_y + s.y, b.max_x + s.x, b.max_y + s.y};
  };
  std::vector<Flow> out;
  out.reserve(flows_.size());
  for (const auto& f : flows_) out.push_back({shift(f.origin, o_shift), shift(f.destination, d_shift)});
  // Rounding in the shift can push an endpoint a hair outside the shifted
  // bounds, so take the union with the recomputed envelope.
  FlowDomain moved{shift_bounds(domain_.origin, o_shift), shift_bounds(domain_.destination, d_shift)};
  if (!out.empty()) {
    FlowDomain env = enclosing_domain(out);
    auto unite = [](Bounds a, const Bounds& b) {
      return Bounds{std::min(a.min_x, b.min_x), std::min(a.min_y, b.min_y),
                    std::max(a.max_x, b.max_x), std::max(a.max_y, b.max_y)};
    };
    moved = {unite(moved.origin, env.origin), unite(moved.destination, env.destination)};
  }
  return FlowDataset(std::move(out), labels_, moved);
}

DistanceSpec DistanceSpec::additive(PointMetric metric, double origin_weight,
                                    double destination_weight) {
  DistanceSpec spec{metric, Combinator::additive, origin_weight, destination_weight};
  spec.validate();
  return spec;
}

void DistanceSpec::validate() const {
  if (combinator != Combinator::additive) return;
  if (!(origin_weight >= 0.0) || !(destination_weight >= 0.0))
    throw InvalidParameter("additive weights must be non-negative");
  if (std::abs(origin_weight + destination_weight - 1.0) > 1e-12)
    throw InvalidParameter("additive weights must sum to 1");
}

double point_distance(const PlanePoint& a, const PlanePoint& b, PointMetric metric) {
  if (!finite(a) || !finite(b)) throw InvalidInput("point coordinates must be finite");
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  if (metric == PointMetric::manhattan) return std::abs(dx) + std::abs(dy);
  return std::hypot(dx, dy);
}

double flow_distance(const Flow& f, const Flow& g, const DistanceSpec& spec) {
  const double d_o = point_distance(f.origin, g.origin, spec.metric);
  const double d_d = point_distance(f.destination, g.destination, spec.metric);
  if (spec.combinator == Combinator::maximum) return std::max(d_o, d_d);
  return spec.origin_weight * d_o + spec.destination_weight * d_d;
}

std::size_t count_within(const FlowDataset& dataset, std::size_t i, double r,
                         const DistanceSpec& spec) {
  if (!(r >= 0.0)) throw InvalidParameter("radius must be non-negative");
  spec.validate();
  const Flow& fi = dataset.flow(i);
  std::size_t count = 0;
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    if (j != i && flow_distance(fi, dataset[j], spec) <= r) ++count;
  }
  return count;
}

double sphere_volume(double radius, const DistanceSpec& spec) {
  if (spec.metric != PointMetric::manhattan || spec.combinator != Combinator::maximum)
    throw UnsupportedMetric("closed-form sphere volume exists only for maximum-Manhattan");
  if (!(radius >= 0.0)) throw InvalidParameter("radius must be non-negative");
  const double r2 = radius * radius;
  return 4.0 * r2 * r2;
}

DistanceMatrix::DistanceMatrix(const FlowDataset& dataset, const DistanceSpec& spec)
    : n_(dataset.size()), spec_(spec), d_(dataset.size() * dataset.size(), 0.0) {
  spec.validate();
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = flow_distance(dataset[i], dataset[j], spec);
      d_[i * n_ + j] = d;
      d_[j * n_ + i] = d;
    }
  }
}

std::size_t DistanceMatrix::count_within(std::size_t i, double r) const {
  if (i >= n_) throw InvalidInput("flow id " + std::to_string(i) + " out of range");
  if (!(r >= 0.0)) throw InvalidParameter("radius must be non-negative");
  const auto d = row(i);
  std::size_t count = 0;
  for (std::size_t j = 0; j < n_; ++j) {
    if (j != i && d[j] <= r) ++count;
  }
  return count;
}

}  // namespace odflow
