#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "georank/core.hpp"

namespace georank::test {

/// Catalog with names s0..s{k-1}.
inline SiteCatalog make_catalog(std::size_t k) {
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k; ++i) names.push_back("s" + std::to_string(i));
  return SiteCatalog(std::move(names));
}

/// All off-diagonal RTTs equal to d.
inline RttMatrix uniform_matrix(std::size_t k, double d) {
  std::vector<double> values(k * k, d);
  for (std::size_t i = 0; i < k; ++i) values[i * k + i] = 0.0;
  return RttMatrix::from_values(k, std::move(values));
}

/// Symmetric matrix with off-diagonal entries uniform in [lo, hi].
inline RttMatrix random_matrix(std::size_t k, std::mt19937& rng, double lo = 1.0,
                               double hi = 300.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> values(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double v = dist(rng);
      values[a * k + b] = v;
      values[b * k + a] = v;
    }
  }
  return RttMatrix::from_values(k, std::move(values));
}

/// Distance matrix of random points in the plane; satisfies the triangle
/// inequality, unlike random_matrix.
inline RttMatrix random_metric_matrix(std::size_t k, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(0.0, 300.0);
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = dist(rng);
    ys[i] = dist(rng);
  }
  std::vector<double> values(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const double dx = xs[a] - xs[b];
      const double dy = ys[a] - ys[b];
      double v = std::sqrt(dx * dx + dy * dy);
      if (v <= 0.0) v = 0.5;  // coincident points
      values[a * k + b] = v;
      values[b * k + a] = v;
    }
  }
  return RttMatrix::from_values(k, std::move(values));
}

inline bool close_rel(double a, double b, double rel) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-12});
  return std::abs(a - b) <= rel * scale;
}

}  // namespace georank::test
