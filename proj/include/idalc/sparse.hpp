#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace idalc {

// Sparse vector of (index, weight) pairs with strictly increasing indices.
struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  // Sorts by index and sums duplicate entries.
  static FeatureVector from_pairs(std::vector<std::pair<std::uint32_t, double>> pairs);
  // Dense coordinates to sparse, dropping exact zeros.
  static FeatureVector from_dense(std::span<const double> dense);

  // Value at `index`, 0 when absent.
  double at(std::uint32_t index) const;

  // Checks the strictly-increasing / finite invariant.
  bool well_formed() const;
};

double dot(const FeatureVector& a, const FeatureVector& b);
double dot(const FeatureVector& a, std::span<const double> dense);
double squared_norm(const FeatureVector& a);
double norm(const FeatureVector& a);

// One past the largest index used by any vector.
std::size_t feature_dimension(std::span<const FeatureVector> vectors);

}  // namespace idalc
