#include "idalc/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace idalc {

FeatureVector FeatureVector::from_pairs(
    std::vector<std::pair<std::uint32_t, double>> pairs) {
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  FeatureVector out;
  out.indices.reserve(pairs.size());
  out.values.reserve(pairs.size());
  for (const auto& [index, value] : pairs) {
    if (!out.indices.empty() && out.indices.back() == index) {
      out.values.back() += value;
    } else {
      out.indices.push_back(index);
      out.values.push_back(value);
    }
  }
  return out;
}

FeatureVector FeatureVector::from_dense(std::span<const double> dense) {
  FeatureVector out;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      out.indices.push_back(static_cast<std::uint32_t>(i));
      out.values.push_back(dense[i]);
    }
  }
  return out;
}

double FeatureVector::at(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

bool FeatureVector::well_formed() const {
  if (indices.size() != values.size()) return false;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (!std::isfinite(values[i])) return false;
    if (i > 0 && indices[i] <= indices[i - 1]) return false;
  }
  return true;
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] == b.indices[j]) {
      sum += a.values[i++] * b.values[j++];
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double dot(const FeatureVector& a, std::span<const double> dense) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.indices.size(); ++i) {
    if (a.indices[i] < dense.size()) sum += a.values[i] * dense[a.indices[i]];
  }
  return sum;
}

double squared_norm(const FeatureVector& a) {
  double sum = 0.0;
  for (double v : a.values) sum += v * v;
  return sum;
}

double norm(const FeatureVector& a) { return std::sqrt(squared_norm(a)); }

std::size_t feature_dimension(std::span<const FeatureVector> vectors) {
  std::size_t dim = 0;
  for (const auto& v : vectors) {
    if (!v.indices.empty()) {
      dim = std::max<std::size_t>(dim, std::size_t{v.indices.back()} + 1);
    }
  }
  return dim;
}

}  // namespace idalc
