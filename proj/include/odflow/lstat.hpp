#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "odflow/flow.hpp"

namespace odflow {

/// lambda_hat = n / (4 * sum_i d_{i,1}^4) from first-order nearest-neighbour
/// distances d_{i,1}.
struct IntensityEstimate {
  double lambda_hat = 0.0;
  std::vector<double> nn_distances;
};

IntensityEstimate estimate_intensity(const FlowDataset& dataset, const DistanceSpec& spec);
IntensityEstimate estimate_intensity(const DistanceMatrix& distances);

/// K(r) = (ordered pairs within r) / (lambda * n). No edge correction.
double k_function(const FlowDataset& dataset, double r, double lambda, const DistanceSpec& spec);
/// L(r) = (K(r) / 4)^(1/4) - r.
double l_function(const FlowDataset& dataset, double r, double lambda, const DistanceSpec& spec);
/// L_i(r) = (count_i(r) / (4 lambda n))^(1/4) - r with the global lambda.
double local_l_function(const FlowDataset& dataset, std::size_t i, double r, double lambda,
                        const DistanceSpec& spec);

/// Closed forms shared by the functions above and by callers that already
/// hold pair counts.
double l_from_k(double k, double r);
double k_from_pairs(std::size_t ordered_pairs, std::size_t n, double lambda);
double local_l_from_count(std::size_t count, std::size_t n, double r, double lambda);

/// Local L values of every flow at radius r.
std::vector<double> local_l_values(const DistanceMatrix& distances, double r, double lambda);

struct LCurve {
  std::vector<double> r_grid;
  std::vector<double> k_values;
  std::vector<double> l_values;
  std::vector<double> l_prime_values;
  DistanceSpec spec;
  double lambda_used = 0.0;
  std::size_t smoothing_window = 3;
};

/// `steps` evenly spaced radii from diameter/200 to diameter/4, where diameter
/// is the domain's L1 extent. The grid is the same for every metric.
std::vector<double> default_r_grid(const FlowDomain& domain, std::size_t steps = 100);

/// Boxcar average with the window truncated at the ends. Window must be odd.
std::vector<double> boxcar_smooth(std::span<const double> values, std::size_t window);
/// Central differences inside, one-sided at the two ends.
std::vector<double> finite_difference(std::span<const double> x, std::span<const double> y);

/// K and L on r_grid; L' from the boxcar-smoothed L. lambda defaults to the
/// nearest-neighbour estimate.
LCurve compute_l_curve(const FlowDataset& dataset, std::span<const double> r_grid,
                       const DistanceSpec& spec, std::optional<double> lambda = std::nullopt,
                       std::size_t smoothing_window = 3);
LCurve compute_l_curve(const DistanceMatrix& distances, std::span<const double> r_grid,
                       std::optional<double> lambda = std::nullopt,
                       std::size_t smoothing_window = 3);

struct LPrimeMinimum {
  double r = 0.0;
  double l_prime = 0.0;
  double prominence = 0.0;
  std::size_t index = 0;
};

struct DetectedScales {
  bool found = false;
  /// Aggregation radius R-hat; a grid point.
  double maximal_scale = 0.0;
  /// Radii of the later aggregations, increasing, each a grid point.
  std::vector<double> secondary_scales;
  double argmax_l = 0.0;
  /// r at the first prominent L' minimum after the L peak. Pairs inside the
  /// dominant aggregation stop accumulating there, so it measures the
  /// aggregation's diameter.
  double saturation_r = 0.0;
  /// Prominent L' minima at or after the L peak.
  std::vector<LPrimeMinimum> l_prime_minima;
  /// Set when the L peak falls outside [maximal_scale, saturation_r].
  bool ambiguous = false;
};

struct ScaleDetectionOptions {
  std::size_t smoothing_window = 3;
  /// Minimum prominence of an L' minimum, as a fraction of the range of L'.
  double prominence = 0.05;
};

DetectedScales detect_scales(const LCurve& curve, const ScaleDetectionOptions& options = {});

/// n flows, O uniform on domain.origin and D uniform on domain.destination.
FlowDataset sample_csr(std::size_t n, const FlowDomain& domain, std::uint64_t seed);

struct CsrEnvelope {
  std::vector<double> r_grid;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::size_t num_simulations = 0;
  double quantile_level = 0.95;
};

/// Pointwise quantile band of L(r) over CSR draws of size n. Draw k uses seed + k.
CsrEnvelope csr_envelope(std::size_t n, const FlowDomain& domain, std::span<const double> r_grid,
                         std::size_t num_sims, double quantile_level, const DistanceSpec& spec,
                         std::uint64_t seed);

/// Linear-interpolation sample quantile (Hyndman-Fan type 7). Sorts in place.
double sample_quantile(std::vector<double>& values, double q);

}  // namespace odflow
