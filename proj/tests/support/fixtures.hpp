#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "odflow/flow.hpp"
#include "oracle.hpp"

namespace fixtures {

// Uniform flows on [lo, hi]^4 from std::mt19937_64, independent of odflow::Rng.
inline std::vector<oracle::Row> random_rows(std::size_t n, std::uint64_t seed, double lo = 0.0,
                                            double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<oracle::Row> rows(n);
  for (auto& r : rows)
    for (auto& v : r) v = u(gen);
  return rows;
}

inline odflow::FlowDataset to_dataset(const std::vector<oracle::Row>& rows) {
  std::vector<odflow::Flow> flows;
  for (const auto& r : rows) flows.push_back({{r[0], r[1]}, {r[2], r[3]}});
  return odflow::FlowDataset(std::move(flows));
}

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fixtures
