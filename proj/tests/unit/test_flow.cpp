#include <cmath>
#include <limits>

#include "doctest.h"
#include "fixtures.hpp"
#include "odflow/error.hpp"
#include "odflow/flow.hpp"
#include "oracle.hpp"

using namespace odflow;

TEST_SUITE("flow") {

TEST_CASE("point distances") {
  CHECK(point_distance({0, 0}, {1, 2}, PointMetric::manhattan) == 3.0);
  CHECK(point_distance({5, 5}, {5, 5}, PointMetric::manhattan) == 0.0);
  CHECK(point_distance({0, 0}, {3, 4}, PointMetric::euclidean) == 5.0);
  CHECK_THROWS_AS(point_distance({0, std::nan("")}, {0, 0}, PointMetric::manhattan), InvalidInput);
}

TEST_CASE("flow distances") {
  const Flow f1{{0, 0}, {10, 10}};
  const Flow f2{{1, 2}, {10, 10}};
  CHECK(flow_distance(f1, f2, DistanceSpec::maximum_manhattan()) == 3.0);
  CHECK(flow_distance(f1, f2, DistanceSpec::additive(PointMetric::manhattan, 0.5, 0.5)) == 1.5);
  CHECK(flow_distance(f1, f1, DistanceSpec::maximum_manhattan()) == 0.0);
  CHECK_THROWS_AS(DistanceSpec::additive(PointMetric::manhattan, 0.7, 0.7), InvalidParameter);
  CHECK_THROWS_AS(DistanceSpec::additive(PointMetric::manhattan, -0.5, 1.5), InvalidParameter);
}

TEST_CASE("sphere volume") {
  CHECK(sphere_volume(1.0) == 4.0);
  CHECK(sphere_volume(0.0) == 0.0);
  CHECK(sphere_volume(0.1) == doctest::Approx(4e-4).epsilon(1e-14));
  CHECK_THROWS_AS(sphere_volume(1.0, DistanceSpec::maximum_euclidean()), UnsupportedMetric);
}

TEST_CASE("count_within edge cases") {
  const auto rows = fixtures::random_rows(50, 11);
  const auto data = fixtures::to_dataset(rows);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(count_within(data, i, 0.0, {}) == 0);
    CHECK(count_within(data, i, 2.0, {}) == data.size() - 1);
  }
  CHECK_THROWS_AS(count_within(data, 0, -1.0, {}), InvalidParameter);
  CHECK_THROWS_AS(count_within(data, 50, 0.1, {}), InvalidInput);
}

TEST_CASE("count_within matches the double loop") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rows = fixtures::random_rows(50, seed);
    const auto data = fixtures::to_dataset(rows);
    const DistanceMatrix dm(data, {});
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto expect = oracle::count(rows, i, 0.1, oracle::manhattan_max);
      CHECK(count_within(data, i, 0.1, {}) == expect);
      CHECK(dm.count_within(i, 0.1) == expect);
    }
  }
}

TEST_CASE("count_within is monotone in r") {
  const auto data = fixtures::to_dataset(fixtures::random_rows(80, 3));
  for (std::size_t i = 0; i < data.size(); i += 7) {
    std::size_t prev = 0;
    for (double r = 0.0; r <= 1.5; r += 0.05) {
      const auto c = count_within(data, i, r, {});
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("duplicates count at distance zero") {
  const FlowDataset data({{{0.1, 0.1}, {0.2, 0.2}}, {{0.1, 0.1}, {0.2, 0.2}}, {{0.9, 0.9}, {0.9, 0.9}}});
  CHECK(count_within(data, 0, 0.0, {}) == 1);
  CHECK(count_within(data, 2, 0.0, {}) == 0);
}

TEST_CASE("metric axioms on random triples") {
  const auto rows = fixtures::random_rows(60, 21);
  const auto data = fixtures::to_dataset(rows);
  for (auto spec : {DistanceSpec::maximum_manhattan(), DistanceSpec::maximum_euclidean(),
                    DistanceSpec::additive(PointMetric::manhattan, 0.3, 0.7)}) {
    for (std::size_t i = 0; i + 2 < data.size(); ++i) {
      const Flow &a = data[i], &b = data[i + 1], &c = data[i + 2];
      CHECK(flow_distance(a, b, spec) == flow_distance(b, a, spec));
      CHECK(flow_distance(a, a, spec) == 0.0);
      CHECK(flow_distance(a, b, spec) > 0.0);
      CHECK(flow_distance(a, c, spec) <= flow_distance(a, b, spec) + flow_distance(b, c, spec) + 1e-15);
    }
  }
}

TEST_CASE("translation leaves distances unchanged") {
  // Dyadic offsets and coordinates keep the arithmetic exact.
  std::vector<Flow> flows;
  for (int k = 0; k < 40; ++k)
    flows.push_back({{(k * 37 % 64) / 64.0, (k * 11 % 64) / 64.0},
                     {(k * 5 % 64) / 64.0, (k * 23 % 64) / 64.0}});
  const FlowDataset data(flows);
  const auto moved = data.translated({0.5, -0.25}, {-2.0, 3.0});
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < data.size(); ++j)
      CHECK(flow_distance(data[i], data[j], {}) == flow_distance(moved[i], moved[j], {}));
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(FlowDataset(std::vector<Flow>{{{0, 0}, {1, 1}}}, {Label::noise, Label::noise}), InvalidInput);
  CHECK_THROWS_AS(FlowDataset(std::vector<Flow>{{{0, std::numeric_limits<double>::infinity()}, {1, 1}}}), InvalidInput);
  CHECK_THROWS_AS(FlowDataset(std::vector<Flow>{{{2, 2}, {0.5, 0.5}}}, {}, FlowDomain::unit()), InvalidInput);
  const FlowDataset ok({{{0.2, 0.3}, {0.9, 0.1}}, {{0.4, 0.5}, {0.6, 0.7}}});
  CHECK(ok.domain().origin == Bounds{0.2, 0.3, 0.4, 0.5});
  CHECK(ok.domain().l1_diameter() == doctest::Approx(0.3 + 0.6));
  CHECK_FALSE(ok.has_labels());
  const auto big = ok.scaled(3.0);
  CHECK(big[1].destination.y == doctest::Approx(2.1));
  CHECK_THROWS_AS(ok.scaled(0.0), InvalidParameter);
}

TEST_CASE("labels round-trip") {
  for (auto l : {Label::aggregated, Label::noise, Label::background, Label::unlabeled})
    CHECK(parse_label(to_string(l)) == l);
  CHECK_FALSE(parse_label("cluster").has_value());
}

}  // TEST_SUITE
