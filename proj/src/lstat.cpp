#include "odflow/lstat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "odflow/error.hpp"
#include "odflow/random.hpp"

namespace odflow {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidParameter("intensity lambda must be positive and finite");
}

void require_radius(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("radius must be non-negative");
}

void require_grid(std::span<const double> r_grid) {
  if (r_grid.empty()) throw InvalidParameter("r grid is empty");
  if (!(r_grid[0] > 0.0)) throw InvalidParameter("r grid must start above zero");
  for (std::size_t i = 1; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > r_grid[i - 1])) throw InvalidParameter("r grid must be strictly increasing");
  }
}

IntensityEstimate intensity_from_nn(std::vector<double> nn) {
  double sum4 = 0.0;
  for (double d : nn) {
    const double d2 = d * d;
    sum4 += d2 * d2;
  }
  if (!(sum4 > 0.0))
    throw DegenerateIntensity("all nearest-neighbour distances are zero; intensity is unbounded");
  IntensityEstimate est;
  est.lambda_hat = static_cast<double>(nn.size()) / (4.0 * sum4);
  est.nn_distances = std::move(nn);
  return est;
}

// Index of the grid point closest to r; ties resolve to the smaller index.
std::size_t nearest_grid_index(std::span<const double> grid, double r) {
  std::size_t best = 0;
  double best_gap = std::abs(grid[0] - r);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double gap = std::abs(grid[i] - r);
    if (gap < best_gap) {
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

// Local minima of v with topographic prominence: the climb needed before
// reaching a strictly lower value on the cheaper side. A side that never gets
// lower does not bound the climb.
std::vector<LPrimeMinimum> prominent_minima(std::span<const double> r, std::span<const double> v) {
  std::vector<LPrimeMinimum> out;
  const std::size_t n = v.size();
  const double global_max = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] < v[i - 1] && v[i] <= v[i + 1])) continue;
    double left_top = v[i];
    bool left_lower = false;
    for (std::size_t j = i; j-- > 0;) {
      if (v[j] < v[i]) {
        left_lower = true;
        break;
      }
      left_top = std::max(left_top, v[j]);
    }
    double right_top = v[i];
    bool right_lower = false;
    for (std::size_t k = i + 1; k < n; ++k) {
      if (v[k] < v[i]) {
        right_lower = true;
        break;
      }
      right_top = std::max(right_top, v[k]);
    }
    double col;
    if (left_lower && right_lower) col = std::min(left_top, right_top);
    else if (left_lower) col = left_top;
    else if (right_lower) col = right_top;
    else col = global_max;
    out.push_back({r[i], v[i], col - v[i], i});
  }
  return out;
}

}  // namespace

IntensityEstimate estimate_intensity(const FlowDataset& dataset, const DistanceSpec& spec) {
  const std::size_t n = dataset.size();
  if (n < 2) throw InsufficientData("intensity estimation needs at least two flows");
  spec.validate();
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = flow_distance(dataset[i], dataset[j], spec);
      nn[i] = std::min(nn[i], d);
      nn[j] = std::min(nn[j], d);
    }
  }
  return intensity_from_nn(std::move(nn));
}

IntensityEstimate estimate_intensity(const DistanceMatrix& distances) {
  const std::size_t n = distances.size();
  if (n < 2) throw InsufficientData("intensity estimation needs at least two flows");
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = distances.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) nn[i] = std::min(nn[i], row[j]);
    }
  }
  return intensity_from_nn(std::move(nn));
}

double l_from_k(double k, double r) { return std::pow(k / 4.0, 0.25) - r; }

double k_from_pairs(std::size_t ordered_pairs, std::size_t n, double lambda) {
  require_lambda(lambda);
  if (n == 0) throw InsufficientData("K-function of an empty dataset");
  return static_cast<double>(ordered_pairs) / (lambda * static_cast<double>(n));
}

double local_l_from_count(std::size_t count, std::size_t n, double r, double lambda) {
  require_lambda(lambda);
  if (n == 0) throw InsufficientData("local L-function of an empty dataset");
  return std::pow(static_cast<double>(count) / (4.0 * lambda * static_cast<double>(n)), 0.25) - r;
}

double k_function(const FlowDataset& dataset, double r, double lambda, const DistanceSpec& spec) {
  require_lambda(lambda);
  require_radius(r);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) pairs += count_within(dataset, i, r, spec);
  return k_from_pairs(pairs, dataset.size(), lambda);
}

double l_function(const FlowDataset& dataset, double r, double lambda, const DistanceSpec& spec) {
  return l_from_k(k_function(dataset, r, lambda, spec), r);
}

double local_l_function(const FlowDataset& dataset, std::size_t i, double r, double lambda,
                        const DistanceSpec& spec) {
  require_lambda(lambda);
  require_radius(r);
  return local_l_from_count(count_within(dataset, i, r, spec), dataset.size(), r, lambda);
}

std::vector<double> local_l_values(const DistanceMatrix& distances, double r, double lambda) {
  require_lambda(lambda);
  require_radius(r);
  std::vector<double> out(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i)
    out[i] = local_l_from_count(distances.count_within(i, r), distances.size(), r, lambda);
  return out;
}

std::vector<double> default_r_grid(const FlowDomain& domain, std::size_t steps) {
  const double diameter = domain.l1_diameter();
  if (!(diameter > 0.0)) throw InvalidParameter("domain has zero extent");
  if (steps < 2) throw InvalidParameter("r grid needs at least two steps");
  const double lo = diameter / 200.0;
  const double hi = diameter / 4.0;
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return grid;
}

std::vector<double> boxcar_smooth(std::span<const double> values, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw InvalidParameter("smoothing window must be odd");
  const std::size_t n = values.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += values[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<double> finite_difference(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw InvalidParameter("finite_difference: size mismatch");
  if (n < 2) throw InvalidParameter("finite_difference needs at least two points");
  std::vector<double> out(n);
  out[0] = (y[1] - y[0]) / (x[1] - x[0]);
  out[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
  return out;
}

LCurve compute_l_curve(const FlowDataset& dataset, std::span<const double> r_grid,
                       const DistanceSpec& spec, std::optional<double> lambda,
                       std::size_t smoothing_window) {
  return compute_l_curve(DistanceMatrix(dataset, spec), r_grid, lambda, smoothing_window);
}

LCurve compute_l_curve(const DistanceMatrix& distances, std::span<const double> r_grid,
                       std::optional<double> lambda, std::size_t smoothing_window) {
  require_grid(r_grid);
  const std::size_t n = distances.size();
  const double lam = lambda ? *lambda : estimate_intensity(distances).lambda_hat;
  require_lambda(lam);

  std::vector<double> pair_d;
  pair_d.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = distances.row(i);
    for (std::size_t j = i + 1; j < n; ++j) pair_d.push_back(row[j]);
  }
  std::sort(pair_d.begin(), pair_d.end());

  LCurve curve;
  curve.spec = distances.spec();
  curve.lambda_used = lam;
  curve.smoothing_window = smoothing_window;
  curve.r_grid.assign(r_grid.begin(), r_grid.end());
  curve.k_values.reserve(r_grid.size());
  curve.l_values.reserve(r_grid.size());
  for (double r : r_grid) {
    const auto within = static_cast<std::size_t>(
        std::upper_bound(pair_d.begin(), pair_d.end(), r) - pair_d.begin());
    const double k = k_from_pairs(2 * within, n, lam);
    curve.k_values.push_back(k);
    curve.l_values.push_back(l_from_k(k, r));
  }
  if (r_grid.size() >= 2) {
    curve.l_prime_values =
        finite_difference(curve.r_grid, boxcar_smooth(curve.l_values, smoothing_window));
  } else {
    curve.l_prime_values.assign(1, 0.0);
  }
  return curve;
}

DetectedScales detect_scales(const LCurve& curve, const ScaleDetectionOptions& options) {
  if (options.smoothing_window == 0 || options.smoothing_window % 2 == 0)
    throw InvalidParameter("smoothing window must be odd and at least 1");
  if (!(options.prominence >= 0.0)) throw InvalidParameter("prominence must be non-negative");
  const auto& r = curve.r_grid;
  const auto& l = curve.l_values;
  if (r.size() != l.size() || r.empty()) throw InvalidInput("L curve is not populated");

  DetectedScales out;
  const auto peak = static_cast<std::size_t>(std::max_element(l.begin(), l.end()) - l.begin());
  out.argmax_l = r[peak];
  if (r.size() < 3) return out;

  const auto l_prime = finite_difference(r, boxcar_smooth(l, options.smoothing_window));
  const auto [lo_it, hi_it] = std::minmax_element(l_prime.begin(), l_prime.end());
  const double threshold = options.prominence * (*hi_it - *lo_it);

  for (const auto& m : prominent_minima(r, l_prime)) {
    if (m.index >= peak && m.prominence > 0.0 && m.prominence >= threshold)
      out.l_prime_minima.push_back(m);
  }
  if (out.l_prime_minima.empty()) return out;

  // Pair counts of an aggregation saturate once r spans its diameter; the
  // aggregation radius is half of that.
  out.found = true;
  out.saturation_r = out.l_prime_minima.front().r;
  out.maximal_scale = r[nearest_grid_index(r, out.saturation_r / 2.0)];
  for (std::size_t k = 1; k < out.l_prime_minima.size(); ++k) {
    const double s = r[nearest_grid_index(r, out.l_prime_minima[k].r / 2.0)];
    const double last = out.secondary_scales.empty() ? out.maximal_scale : out.secondary_scales.back();
    if (s > last) out.secondary_scales.push_back(s);
  }
  out.ambiguous = out.argmax_l < out.maximal_scale || out.argmax_l > out.saturation_r;
  return out;
}

FlowDataset sample_csr(std::size_t n, const FlowDomain& domain, std::uint64_t seed) {
  if (n == 0) throw InvalidParameter("sample_csr needs n >= 1");
  if (domain.origin.degenerate() || domain.destination.degenerate())
    throw InvalidParameter("CSR sampling needs a non-degenerate domain");
  Rng rng(seed);
  std::vector<Flow> flows;
  flows.reserve(n);
  const auto& o = domain.origin;
  const auto& d = domain.destination;
  for (std::size_t i = 0; i < n; ++i) {
    Flow f;
    f.origin.x = rng.uniform(o.min_x, o.max_x);
    f.origin.y = rng.uniform(o.min_y, o.max_y);
    f.destination.x = rng.uniform(d.min_x, d.max_x);
    f.destination.y = rng.uniform(d.min_y, d.max_y);
    flows.push_back(f);
  }
  return FlowDataset(std::move(flows), {}, domain);
}

double sample_quantile(std::vector<double>& values, double q) {
  if (values.empty()) throw InvalidParameter("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidParameter("quantile must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CsrEnvelope csr_envelope(std::size_t n, const FlowDomain& domain, std::span<const double> r_grid,
                         std::size_t num_sims, double quantile_level, const DistanceSpec& spec,
                         std::uint64_t seed) {
  if (num_sims == 0) throw InvalidParameter("csr_envelope needs at least one simulation");
  if (!(quantile_level > 0.0 && quantile_level < 1.0))
    throw InvalidParameter("quantile level must lie in (0, 1)");
  if (n < 2) throw InvalidParameter("csr_envelope needs n >= 2");
  require_grid(r_grid);

  const std::size_t m = r_grid.size();
  std::vector<std::vector<double>> by_r(m, std::vector<double>(num_sims));
  for (std::size_t k = 0; k < num_sims; ++k) {
    const auto sample = sample_csr(n, domain, seed + k);
    const auto curve = compute_l_curve(sample, r_grid, spec);
    for (std::size_t i = 0; i < m; ++i) by_r[i][k] = curve.l_values[i];
  }

  CsrEnvelope env;
  env.r_grid.assign(r_grid.begin(), r_grid.end());
  env.num_simulations = num_sims;
  env.quantile_level = quantile_level;
  const double tail = (1.0 - quantile_level) / 2.0;
  for (auto& values : by_r) {
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(num_sims);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    env.mean.push_back(mean);
    env.std_dev.push_back(num_sims > 1 ? std::sqrt(ss / static_cast<double>(num_sims - 1)) : 0.0);
    env.lower.push_back(sample_quantile(values, tail));
    env.upper.push_back(sample_quantile(values, 1.0 - tail));
  }
  return env;
}

}  // namespace odflow
