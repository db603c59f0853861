#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "odflow/error.hpp"
#include "odflow/lstat.hpp"
#include "odflow/simgen.hpp"
#include "oracle.hpp"

using namespace odflow;

TEST_SUITE("lstat") {

TEST_CASE("intensity of equal nearest neighbours") {
  const FlowDataset two({{{0, 0}, {0, 0}}, {{1, 0}, {0, 0}}});
  const auto est = estimate_intensity(two, {});
  CHECK(est.nn_distances == std::vector<double>{1.0, 1.0});
  CHECK(est.lambda_hat == 0.25);

  // Four flows on a square of side d in the O plane, D fixed: every NN at d.
  const double d = 0.2;
  const FlowDataset square({{{0, 0}, {0, 0}}, {{d, 0}, {0, 0}}, {{0, d}, {0, 0}}, {{d, d}, {0, 0}}});
  CHECK(estimate_intensity(square, {}).lambda_hat == doctest::Approx(1.0 / (4 * std::pow(d, 4))));
}

TEST_CASE("intensity matches the independent estimator") {
  const auto rows = fixtures::random_rows(100, 5);
  const auto data = fixtures::to_dataset(rows);
  CHECK(fixtures::rel_err(estimate_intensity(data, {}).lambda_hat,
                          oracle::lambda_hat(rows, oracle::manhattan_max)) < 1e-12);
  CHECK(fixtures::rel_err(estimate_intensity(data, DistanceSpec::maximum_euclidean()).lambda_hat,
                          oracle::lambda_hat(rows, oracle::euclid_max)) < 1e-12);
  CHECK(estimate_intensity(DistanceMatrix(data, {})).lambda_hat ==
        estimate_intensity(data, {}).lambda_hat);
}

TEST_CASE("intensity errors") {
  CHECK_THROWS_AS(estimate_intensity(FlowDataset(std::vector<Flow>{{{0, 0}, {1, 1}}}), {}), InsufficientData);
  CHECK_THROWS_AS(estimate_intensity(FlowDataset({{{0, 0}, {1, 1}}, {{0, 0}, {1, 1}}}), {}),
                  DegenerateIntensity);
}

TEST_CASE("K and L closed forms") {
  const FlowDataset tight({{{0, 0}, {0, 0}}, {{0.01, 0}, {0, 0}}, {{0, 0.01}, {0, 0}}});
  CHECK(k_function(tight, 0.1, 1.0, {}) == 2.0);
  CHECK(k_function(tight, 0.001, 1.0, {}) == 0.0);
  CHECK(l_from_k(4 * std::pow(0.3, 4), 0.3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(l_from_k(0.0, 0.25) == -0.25);
  CHECK(l_from_k(64.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(k_function(tight, 0.1, 0.0, {}), InvalidParameter);
  CHECK_THROWS_AS(k_function(tight, -0.1, 1.0, {}), InvalidParameter);
}

TEST_CASE("local L closed forms") {
  const FlowDataset data({{{0, 0}, {0, 0}}, {{0.5, 0}, {0, 0}}, {{0.51, 0}, {0, 0}}});
  CHECK(local_l_function(data, 0, 0.1, 1.0, {}) == -0.1);
  // count 1 = 4 lambda n with lambda = 1/12.
  CHECK(local_l_function(data, 1, 0.1, 1.0 / 12.0, {}) == doctest::Approx(0.9).epsilon(1e-14));
}

TEST_CASE("K, L and L_i match the double loop") {
  const auto rows = fixtures::random_rows(200, 9);
  const auto data = fixtures::to_dataset(rows);
  const double lam = oracle::lambda_hat(rows, oracle::manhattan_max);
  const double r = 0.15;
  const double k = oracle::k_value(rows, r, lam, oracle::manhattan_max);
  CHECK(fixtures::rel_err(k_function(data, r, lam, {}), k) < 1e-12);
  CHECK(fixtures::rel_err(l_function(data, r, lam, {}), oracle::l_value(k, r)) < 1e-12);
  const auto li = local_l_values(DistanceMatrix(data, {}), r, lam);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(fixtures::rel_err(li[i], oracle::local_l(rows, i, r, lam, oracle::manhattan_max)) < 1e-12);
}

TEST_CASE("global and local L agree") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto data = fixtures::to_dataset(fixtures::random_rows(150, seed));
    const DistanceMatrix dm(data, {});
    const double lam = estimate_intensity(dm).lambda_hat;
    for (double r : {0.05, 0.1, 0.2, 0.4}) {
      const double lhs = std::pow(l_function(data, r, lam, {}) + r, 4);
      double rhs = 0.0;
      for (double v : local_l_values(dm, r, lam)) rhs += std::pow(v + r, 4);
      CHECK(fixtures::rel_err(lhs, rhs) < 1e-9);
    }
  }
}

TEST_CASE("curve K is monotone and L + r is non-decreasing") {
  const auto data = sample_csr(300, FlowDomain::unit(), 4);
  const auto curve = compute_l_curve(data, default_r_grid(data.domain()), {});
  for (std::size_t i = 1; i < curve.r_grid.size(); ++i) {
    CHECK(curve.k_values[i] >= curve.k_values[i - 1]);
    CHECK(curve.l_values[i] + curve.r_grid[i] >= curve.l_values[i - 1] + curve.r_grid[i - 1] - 1e-15);
  }
}

TEST_CASE("curve agrees with pointwise functions") {
  const auto data = fixtures::to_dataset(fixtures::random_rows(120, 8));
  const std::vector<double> grid{0.05, 0.1, 0.2, 0.3};
  for (auto spec : {DistanceSpec::maximum_manhattan(), DistanceSpec::maximum_euclidean()}) {
    const auto curve = compute_l_curve(data, grid, spec);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(curve.k_values[i] == doctest::Approx(k_function(data, grid[i], curve.lambda_used, spec)).epsilon(1e-13));
      CHECK(curve.l_values[i] == doctest::Approx(l_function(data, grid[i], curve.lambda_used, spec)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(compute_l_curve(data, std::vector<double>{}, {}), InvalidParameter);
  CHECK_THROWS_AS(compute_l_curve(data, std::vector<double>{0.2, 0.1}, {}), InvalidParameter);
  CHECK_THROWS_AS(compute_l_curve(data, std::vector<double>{0.0, 0.1}, {}), InvalidParameter);
}

TEST_CASE("scale equivariance") {
  const auto data = fixtures::to_dataset(fixtures::random_rows(150, 12));
  const auto grid = default_r_grid(data.domain(), 40);
  const auto base = compute_l_curve(data, grid, {});
  for (double s : {0.5, 3.0, 100.0}) {
    std::vector<double> sgrid;
    for (double r : grid) sgrid.push_back(s * r);
    const auto scaled = compute_l_curve(data.scaled(s), sgrid, {});
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(fixtures::rel_err(scaled.l_values[i], s * base.l_values[i]) < 1e-9);
  }
}

TEST_CASE("independent O and D translations") {
  std::vector<Flow> flows;
  for (int k = 0; k < 60; ++k)
    flows.push_back({{(k * 37 % 128) / 128.0, (k * 11 % 128) / 128.0},
                     {(k * 5 % 128) / 128.0, (k * 23 % 128) / 128.0}});
  const FlowDataset data(flows);
  const auto moved = data.translated({4.0, -1.0}, {0.25, 8.0});
  const std::vector<double> grid{0.1, 0.2, 0.3};
  const auto a = compute_l_curve(data, grid, {});
  const auto b = compute_l_curve(moved, grid, {});
  CHECK(a.l_values == b.l_values);
  CHECK(local_l_values(DistanceMatrix(data, {}), 0.2, a.lambda_used) ==
        local_l_values(DistanceMatrix(moved, {}), 0.2, b.lambda_used));
}

TEST_CASE("default grid") {
  const auto g = default_r_grid(FlowDomain::unit());
  REQUIRE(g.size() == 100);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(0.5));
  CHECK_THROWS_AS(default_r_grid(FlowDomain::unit(), 1), InvalidParameter);
}

TEST_CASE("smoothing and differences") {
  const std::vector<double> v{1, 2, 6, 2, 1};
  const auto s = boxcar_smooth(v, 3);
  CHECK(s[0] == 1.5);
  CHECK(s[1] == 3.0);
  CHECK(s[4] == 1.5);
  CHECK(boxcar_smooth(v, 1) == v);
  CHECK_THROWS_AS(boxcar_smooth(v, 2), InvalidParameter);
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> sq{0, 1, 4, 9, 16};
  const auto d = finite_difference(x, sq);
  CHECK(d[0] == 1.0);
  CHECK(d[2] == 4.0);
  CHECK(d[4] == 7.0);
}

TEST_CASE("planted type-4 scales") {
  SimConfig cfg;
  cfg.pattern = 4;
  cfg.seed = 7;
  const auto sim = generate_dataset(cfg);
  const auto grid = default_r_grid(sim.dataset.domain());
  const auto mlf = detect_scales(compute_l_curve(sim.dataset, grid, DistanceSpec::maximum_manhattan()));
  REQUIRE(mlf.found);
  CHECK(mlf.maximal_scale == doctest::Approx(0.12).epsilon(0.15));
  const auto elf = detect_scales(compute_l_curve(sim.dataset, grid, DistanceSpec::maximum_euclidean()));
  REQUIRE(elf.found);
  CHECK(elf.maximal_scale == doctest::Approx(0.10).epsilon(0.15));
  CHECK(elf.maximal_scale < mlf.maximal_scale);
}

TEST_CASE("planted cluster gives a pronounced L maximum") {
  SimConfig cfg;
  cfg.n_noise = 0;
  cfg.n_background = 0;
  cfg.seed = 3;
  const auto sim = generate_dataset(cfg);
  auto mixed = sim.dataset.flows();
  std::vector<Flow> flows(mixed.begin(), mixed.end());
  const auto bg = sample_csr(400, FlowDomain::unit(), 99);
  flows.insert(flows.end(), bg.flows().begin(), bg.flows().end());
  const FlowDataset data(flows, {}, FlowDomain::unit());
  const auto curve = compute_l_curve(data, default_r_grid(data.domain()), {});
  const auto peak = std::max_element(curve.l_values.begin(), curve.l_values.end()) - curve.l_values.begin();
  CHECK(curve.r_grid[peak] > 0.08);
  CHECK(curve.r_grid[peak] < 0.25);
  CHECK(curve.l_values[peak] > 0.05);
}

TEST_CASE("CSR L stays flat next to a planted cluster") {
  // Border effects can still leave an L' dip on CSR, so compare peak heights.
  double csr_peak = -1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = sample_csr(700, FlowDomain::unit(), seed);
    const auto curve = compute_l_curve(data, default_r_grid(data.domain()), {});
    csr_peak = std::max(csr_peak, *std::max_element(curve.l_values.begin(), curve.l_values.end()));
  }
  SimConfig cfg;
  cfg.pattern = 1;
  cfg.seed = 3;
  const auto sim = generate_dataset(cfg);
  const auto planted = compute_l_curve(sim.dataset, default_r_grid(sim.dataset.domain()), {});
  const double planted_peak = *std::max_element(planted.l_values.begin(), planted.l_values.end());
  CHECK(csr_peak < 0.02);
  CHECK(planted_peak > 5.0 * csr_peak);
}

TEST_CASE("scale detection is stable under lambda perturbation") {
  for (int pattern : {1, 4, 6}) {
    SimConfig cfg;
    cfg.pattern = pattern;
    cfg.seed = 100 + static_cast<std::uint64_t>(pattern);
    const auto sim = generate_dataset(cfg);
    const DistanceMatrix dm(sim.dataset, {});
    const auto grid = default_r_grid(sim.dataset.domain());
    const double step = grid[1] - grid[0];
    const auto base_curve = compute_l_curve(dm, grid);
    const auto base = detect_scales(base_curve);
    REQUIRE(base.found);
    for (double f : {0.9, 1.1}) {
      const auto s = detect_scales(compute_l_curve(dm, grid, base_curve.lambda_used * f));
      REQUIRE(s.found);
      CHECK(std::abs(s.maximal_scale - base.maximal_scale) <= step * 1.000001);
      CHECK(std::abs(s.argmax_l - base.argmax_l) <= step * 1.000001);
    }
  }
}

TEST_CASE("detect_scales on a constructed curve") {
  // L rises, then L' drops to a sharp dip at r = 0.3 before recovering.
  LCurve c;
  for (int i = 1; i <= 50; ++i) c.r_grid.push_back(0.01 * i);
  double l = 0.0;
  for (double r : c.r_grid) {
    const double slope = r < 0.2 ? 1.0 : (r < 0.3 ? 1.0 - 20 * (r - 0.2) : -1.0 + 10 * (r - 0.3));
    l += 0.01 * std::min(slope, 0.0);
    c.l_values.push_back(r < 0.2 ? r : l + 0.2);
  }
  const auto s = detect_scales(c);
  REQUIRE(s.found);
  CHECK(s.saturation_r == doctest::Approx(0.3).epsilon(0.05));
  CHECK(s.maximal_scale == doctest::Approx(0.15).epsilon(0.05));
  CHECK_THROWS_AS(detect_scales(c, {2, 0.05}), InvalidParameter);
}

TEST_CASE("sample_csr") {
  const auto a = sample_csr(1000, FlowDomain::unit(), 17);
  const auto b = sample_csr(1000, FlowDomain::unit(), 17);
  CHECK(std::equal(a.flows().begin(), a.flows().end(), b.flows().begin()));
  double mean = 0.0;
  for (const auto& f : a.flows()) mean += f.origin.x;
  mean /= 1000.0;
  // sd of a uniform mean over 1000 draws is sqrt(1/12/1000).
  CHECK(std::abs(mean - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / 1000.0));
  CHECK_THROWS_AS(sample_csr(0, FlowDomain::unit(), 1), InvalidParameter);
  const FlowDomain shifted{{10, 10, 12, 11}, {0, 0, 1, 1}};
  const auto moved = sample_csr(200, shifted, 3);
  for (const auto& f : moved.flows()) CHECK(shifted.origin.contains(f.origin));
}

TEST_CASE("CSR pair counts away from the border follow 4 r^4") {
  // Only flows whose r-ball lies inside both unit squares contribute, so the
  // expected neighbour share is exactly the ball volume 4 r^4.
  const double r = 0.1;
  const std::size_t n = 400, sims = 200;
  std::vector<double> shares;
  for (std::size_t k = 0; k < sims; ++k) {
    const auto data = sample_csr(n, FlowDomain::unit(), 5000 + k);
    const DistanceMatrix dm(data, {});
    double total = 0.0;
    std::size_t centres = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Flow& f = data[i];
      auto inner = [&](const PlanePoint& p) {
        return p.x - r >= 0 && p.x + r <= 1 && p.y - r >= 0 && p.y + r <= 1;
      };
      if (!inner(f.origin) || !inner(f.destination)) continue;
      total += static_cast<double>(dm.count_within(i, r)) / static_cast<double>(n - 1);
      ++centres;
    }
    shares.push_back(total / static_cast<double>(centres));
  }
  const double mean = std::accumulate(shares.begin(), shares.end(), 0.0) / sims;
  double ss = 0.0;
  for (double v : shares) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (sims - 1) / sims);
  CHECK(std::abs(mean - sphere_volume(r)) < 3.0 * se);
}

TEST_CASE("envelope") {
  const std::vector<double> grid{0.05, 0.1, 0.2};
  const auto one = csr_envelope(100, FlowDomain::unit(), grid, 1, 0.95, {}, 4);
  const auto single = compute_l_curve(sample_csr(100, FlowDomain::unit(), 4), grid, {});
  CHECK(one.lower == single.l_values);
  CHECK(one.upper == single.l_values);
  const auto env = csr_envelope(200, FlowDomain::unit(), grid, 60, 0.95, {}, 8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.lower[i] <= env.mean[i]);
    CHECK(env.mean[i] <= env.upper[i]);
  }
  CHECK_THROWS_AS(csr_envelope(100, FlowDomain::unit(), grid, 0, 0.95, {}, 1), InvalidParameter);
  CHECK_THROWS_AS(csr_envelope(100, FlowDomain::unit(), grid, 5, 1.0, {}, 1), InvalidParameter);
}

TEST_CASE("envelope hugs zero at mid and large r") {
  std::vector<double> grid;
  for (double r = 0.05; r <= 0.25 + 1e-12; r += 0.025) grid.push_back(r);
  const auto env = csr_envelope(400, FlowDomain::unit(), grid, 99, 0.95, {}, 0);
  // Without edge correction the band drifts slightly above zero at mid r.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(env.lower[i] <= 0.005);
    CHECK(env.upper[i] >= 0.0);
    CHECK(std::abs(env.mean[i]) < 0.015);
  }
  // The band narrows at first (discrete counts) and widens again past its
  // narrowest point.
  const auto width = [&](std::size_t i) { return env.upper[i] - env.lower[i]; };
  std::size_t narrowest = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (width(i) < width(narrowest)) narrowest = i;
  for (std::size_t i = narrowest + 1; i < grid.size(); ++i) CHECK(width(i) >= width(i - 1) * 0.9);
}

TEST_CASE("sample quantile") {
  std::vector<double> v{4, 1, 3, 2};
  CHECK(sample_quantile(v, 0.0) == 1.0);
  CHECK(sample_quantile(v, 1.0) == 4.0);
  CHECK(sample_quantile(v, 0.5) == 2.5);
}

}  // TEST_SUITE
