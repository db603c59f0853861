#include "odflow/simgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "odflow/error.hpp"
#include "odflow/random.hpp"

namespace odflow {

namespace {

const std::array<GridPattern, kPatternCount>& layout_table() {
  static const std::array<GridPattern, kPatternCount> table = {{
      {1, 0.05, 0.05, 0.3, {0.3, 0.7}, {0.3, 0.7}},
      {2, 0.05, 0.05, 0.3, {0.3, 0.7}, {}},
      {3, 0.05, 0.05, 0.3, {}, {0.3, 0.7}},
      {4, 0.04, 0.04, 0.3, {0.3, 0.7}, {0.3, 0.7}},
      {5, 0.05, 0.05, 0.3, {0.3}, {0.7}},
      {6, 0.05, 0.10, 0.3, {0.3, 0.7}, {0.3, 0.7}},
      {7, 0.10, 0.05, 0.3, {0.3, 0.7}, {0.3, 0.7}},
      {8, 0.08, 0.08, 0.3, {0.3, 0.7}, {0.3, 0.7}},
  }};
  return table;
}

constexpr double kLineTol = 1e-9;

double round10(double v) { return std::round(v * 1e10) / 1e10; }

std::vector<double> grid_lines(double pitch, double anchor) {
  std::vector<double> lines{0.0, 1.0};
  const long k0 = -static_cast<long>(std::floor(anchor / pitch + kLineTol));
  for (long k = k0;; ++k) {
    const double v = anchor + static_cast<double>(k) * pitch;
    if (v > 1.0 + kLineTol) break;
    if (v >= -kLineTol) lines.push_back(std::clamp(round10(v), 0.0, 1.0));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end(),
                          [](double a, double b) { return std::abs(a - b) < kLineTol; }),
              lines.end());
  return lines;
}

bool on_any(double v, const std::vector<double>& mains) {
  return std::any_of(mains.begin(), mains.end(),
                     [&](double m) { return std::abs(v - m) < kLineTol; });
}

struct Piece {
  const RoadSegment* segment;
  double t0;
  double t1;
  double length;
};

using Interval = std::optional<std::pair<double, double>>;

// Parameter range of the segment inside |x - cx| + |y - cy| <= r.
Interval clip_to_diamond(const RoadSegment& s, const PlanePoint& c, double r) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  double t0 = 0.0, t1 = 1.0;
  for (auto [u, v] : {std::pair{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}}) {
    const double p = u * dx + v * dy;
    const double q = r - (u * (s.a.x - c.x) + v * (s.a.y - c.y));
    if (std::abs(p) < 1e-15) {
      if (q < 0.0) return std::nullopt;
    } else if (p > 0.0) {
      t1 = std::min(t1, q / p);
    } else {
      t0 = std::max(t0, q / p);
    }
  }
  if (t1 > t0) return std::pair{t0, t1};
  return std::nullopt;
}

// Parameter range of the segment inside the Euclidean disk of radius r.
Interval clip_to_disk(const RoadSegment& s, const PlanePoint& c, double r) {
  const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
  const double fx = s.a.x - c.x, fy = s.a.y - c.y;
  const double a = dx * dx + dy * dy;
  const double b = 2.0 * (fx * dx + fy * dy);
  const double cc = fx * fx + fy * fy - r * r;
  const double disc = b * b - 4.0 * a * cc;
  if (disc <= 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-b - sq) / (2.0 * a));
  const double t1 = std::min(1.0, (-b + sq) / (2.0 * a));
  if (t1 > t0) return std::pair{t0, t1};
  return std::nullopt;
}

template <class Keep, class Clip>
std::vector<Piece> eligible_pieces(const RoadNetwork& network, Keep keep, Clip clip) {
  std::vector<Piece> out;
  for (const auto& s : network.segments()) {
    if (!keep(s)) continue;
    if (auto iv = clip(s)) {
      out.push_back({&s, iv->first, iv->second, s.length() * (iv->second - iv->first)});
    }
  }
  return out;
}

class PieceSampler {
 public:
  PieceSampler(std::vector<Piece> pieces, const std::string& what) : pieces_(std::move(pieces)) {
    double total = 0.0;
    for (const auto& p : pieces_) {
      total += p.length;
      cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw GenerationError("no eligible road length for " + what + " flows");
    for (auto& c : cumulative_) c /= total;
  }

  PlanePoint draw(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    k = std::min(k, pieces_.size() - 1);
    const Piece& p = pieces_[k];
    const double t = p.t0 + (p.t1 - p.t0) * rng.uniform();
    const RoadSegment& s = *p.segment;
    // Axis-aligned roads keep their fixed coordinate exactly.
    PlanePoint out{s.a.x + t * (s.b.x - s.a.x), s.a.y + t * (s.b.y - s.a.y)};
    if (s.a.x == s.b.x) out.x = s.a.x;
    if (s.a.y == s.b.y) out.y = s.a.y;
    return out;
  }

 private:
  std::vector<Piece> pieces_;
  std::vector<double> cumulative_;
};

std::vector<PlanePoint> draw_many(const PieceSampler& sampler, std::size_t k, Rng& rng) {
  std::vector<PlanePoint> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(sampler.draw(rng));
  return out;
}

}  // namespace

const GridPattern& grid_pattern(int pattern) {
  if (pattern < 1 || pattern > kPatternCount)
    throw InvalidParameter("pattern must be in 1.." + std::to_string(kPatternCount) + ", got " +
                           std::to_string(pattern));
  return layout_table()[static_cast<std::size_t>(pattern - 1)];
}

RoadNetwork grid_network(const GridPattern& layout) {
  if (!(layout.pitch_x > 0.0) || !(layout.pitch_y > 0.0))
    throw InvalidParameter("grid pitch must be positive");
  const auto xs = grid_lines(layout.pitch_x, layout.anchor);
  const auto ys = grid_lines(layout.pitch_y, layout.anchor);
  std::vector<RoadSegment> segs;
  for (double y : ys) {
    const auto cls = on_any(y, layout.main_horizontal) ? RoadClass::main : RoadClass::secondary;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
      segs.push_back({0, {xs[k], y}, {xs[k + 1], y}, cls});
  }
  for (double x : xs) {
    const auto cls = on_any(x, layout.main_vertical) ? RoadClass::main : RoadClass::secondary;
    for (std::size_t k = 0; k + 1 < ys.size(); ++k)
      segs.push_back({0, {x, ys[k]}, {x, ys[k + 1]}, cls});
  }
  // Main segments take the low ids, so a point on a crossing snaps to the main road.
  std::stable_partition(segs.begin(), segs.end(),
                        [](const RoadSegment& s) { return s.road_class == RoadClass::main; });
  for (std::size_t id = 0; id < segs.size(); ++id) segs[id].id = id;
  return RoadNetwork(std::move(segs));
}

RoadNetwork generate_network(int pattern) { return grid_network(grid_pattern(pattern)); }

void SimConfig::validate() const {
  grid_pattern(pattern);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidParameter("scale must be positive");
  const Bounds unit = Bounds::unit();
  if (!unit.contains(centre_flow.origin) || !unit.contains(centre_flow.destination))
    throw InvalidParameter("centre flow endpoints must lie in the unit square");
}

SimulatedData generate_dataset(const SimConfig& config) {
  config.validate();
  return generate_dataset(config, generate_network(config.pattern));
}

SimulatedData generate_dataset(const SimConfig& config, const RoadNetwork& network) {
  if (!(config.scale > 0.0) || !std::isfinite(config.scale))
    throw InvalidParameter("scale must be positive");
  if (network.empty()) throw GenerationError("road network is empty");
  const double r = config.scale;
  const PlanePoint co = config.centre_flow.origin;
  const PlanePoint cd = config.centre_flow.destination;
  auto is_main = [](const RoadSegment& s) { return s.road_class == RoadClass::main; };
  auto is_secondary = [](const RoadSegment& s) { return s.road_class == RoadClass::secondary; };
  auto any = [](const RoadSegment&) { return true; };
  auto whole = [](const RoadSegment&) -> Interval { return std::pair{0.0, 1.0}; };

  auto sampler = [&](auto keep, auto clip, std::size_t count, const char* what) {
    // Pools only matter when something is drawn from them.
    std::optional<PieceSampler> out;
    if (count > 0) out.emplace(eligible_pieces(network, keep, clip), what);
    return out;
  };
  auto agg_o = sampler(is_main, [&](const RoadSegment& s) { return clip_to_diamond(s, co, r); },
                       config.n_aggregated, "aggregated origin");
  auto agg_d = sampler(is_main, [&](const RoadSegment& s) { return clip_to_diamond(s, cd, r); },
                       config.n_aggregated, "aggregated destination");
  auto noise_o = sampler(is_secondary, [&](const RoadSegment& s) { return clip_to_disk(s, co, r); },
                         config.n_noise, "noise origin");
  auto noise_d = sampler(is_secondary, [&](const RoadSegment& s) { return clip_to_disk(s, cd, r); },
                         config.n_noise, "noise destination");
  auto back = sampler(any, whole, config.n_background, "background");

  Rng rng(config.seed);
  std::vector<PlanePoint> o, d;
  std::vector<Label> labels;
  auto append = [&](const std::optional<PieceSampler>& os, const std::optional<PieceSampler>& ds,
                    std::size_t count, Label label) {
    if (count == 0) return;
    // All origins of a group are drawn before its destinations.
    auto og = draw_many(*os, count, rng);
    auto dg = draw_many(*ds, count, rng);
    o.insert(o.end(), og.begin(), og.end());
    d.insert(d.end(), dg.begin(), dg.end());
    labels.insert(labels.end(), count, label);
  };
  append(agg_o, agg_d, config.n_aggregated, Label::aggregated);
  append(noise_o, noise_d, config.n_noise, Label::noise);
  append(back, back, config.n_background, Label::background);

  std::vector<Flow> flows(o.size());
  for (std::size_t i = 0; i < flows.size(); ++i) flows[i] = {o[i], d[i]};
  return {FlowDataset(std::move(flows), std::move(labels), FlowDomain::unit()), network};
}

}  // namespace odflow
