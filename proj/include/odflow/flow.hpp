#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace odflow {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
};

/// An origin-destination pair; a single point of the 4-D flow space.
struct Flow {
  PlanePoint origin;
  PlanePoint destination;

  friend bool operator==(const Flow&, const Flow&) = default;
};

enum class Label { aggregated, noise, background, unlabeled };

std::string_view to_string(Label label);
/// Parses "aggregated", "noise", "background" or "unlabeled"; nullopt otherwise.
std::optional<Label> parse_label(std::string_view text);

/// Axis-aligned rectangle. Degenerate (zero-area) bounds are representable.
struct Bounds {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  static Bounds unit() { return {0.0, 0.0, 1.0, 1.0}; }
  /// Smallest bounds containing every point; throws InvalidInput on an empty span.
  static Bounds enclosing(std::span<const PlanePoint> points);

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  bool contains(const PlanePoint& p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool degenerate() const { return !(width() > 0.0) || !(height() > 0.0); }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// The O plane and D plane supports. volume() is S_O * S_D.
struct FlowDomain {
  Bounds origin;
  Bounds destination;

  static FlowDomain unit() { return {Bounds::unit(), Bounds::unit()}; }
  double volume() const { return origin.area() * destination.area(); }
  /// Largest L1 extent (width + height) over the two planes.
  double l1_diameter() const;

  friend bool operator==(const FlowDomain&, const FlowDomain&) = default;
};

/// Flows with dense ids [0, n), optional ground-truth labels and a domain.
/// Immutable after construction.
class FlowDataset {
 public:
  FlowDataset() = default;
  /// Domain defaults to the bounding boxes of the endpoints.
  explicit FlowDataset(std::vector<Flow> flows, std::vector<Label> labels = {});
  FlowDataset(std::vector<Flow> flows, std::vector<Label> labels, FlowDomain domain);

  std::size_t size() const { return flows_.size(); }
  bool empty() const { return flows_.empty(); }
  const Flow& flow(std::size_t id) const;
  const Flow& operator[](std::size_t id) const { return flows_[id]; }
  std::span<const Flow> flows() const { return flows_; }

  bool has_labels() const { return !labels_.empty(); }
  Label label(std::size_t id) const;
  std::span<const Label> labels() const { return labels_; }

  const FlowDomain& domain() const { return domain_; }

  /// Multiplies every coordinate (and the domain) by factor > 0.
  FlowDataset scaled(double factor) const;
  /// Shifts O points by o_shift and D points by d_shift.
  FlowDataset translated(PlanePoint o_shift, PlanePoint d_shift) const;

 private:
  void validate() const;

  std::vector<Flow> flows_;
  std::vector<Label> labels_;
  FlowDomain domain_;
};

enum class PointMetric { manhattan, euclidean };
enum class Combinator { maximum, additive };

std::string_view to_string(PointMetric metric);
std::string_view to_string(Combinator combinator);

/// Point metric x flow combinator. Additive weights are non-negative and sum to 1.
struct DistanceSpec {
  PointMetric metric = PointMetric::manhattan;
  Combinator combinator = Combinator::maximum;
  double origin_weight = 0.5;
  double destination_weight = 0.5;

  static DistanceSpec maximum_manhattan() { return {}; }
  static DistanceSpec maximum_euclidean() { return {PointMetric::euclidean, Combinator::maximum}; }
  static DistanceSpec additive(PointMetric metric, double origin_weight, double destination_weight);

  /// Throws InvalidParameter when the weights are inadmissible.
  void validate() const;

  friend bool operator==(const DistanceSpec&, const DistanceSpec&) = default;
};

double point_distance(const PlanePoint& a, const PlanePoint& b, PointMetric metric);
double flow_distance(const Flow& f, const Flow& g, const DistanceSpec& spec);

/// Number of flows j != i with flow_distance(F_i, F_j) <= r. Exact brute force.
std::size_t count_within(const FlowDataset& dataset, std::size_t i, double r,
                         const DistanceSpec& spec);

/// Volume 4 R^4 of a flow sphere; only defined for maximum-Manhattan.
double sphere_volume(double radius, const DistanceSpec& spec = DistanceSpec::maximum_manhattan());

/// Dense symmetric matrix of pairwise flow distances. Callers that query the
/// same dataset many times build this once; results are identical to the
/// brute-force functions above.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(const FlowDataset& dataset, const DistanceSpec& spec);

  std::size_t size() const { return n_; }
  const DistanceSpec& spec() const { return spec_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

  /// Flows j != i within r of flow i.
  std::size_t count_within(std::size_t i, double r) const;

 private:
  std::size_t n_ = 0;
  DistanceSpec spec_;
  std::vector<double> d_;
};

}  // namespace odflow
