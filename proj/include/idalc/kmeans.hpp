#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idalc/sparse.hpp"

namespace idalc {

struct KMeansOptions {
  std::size_t restarts = 5;
  std::size_t max_iter = 300;
  double tolerance = 1e-6;  // relative inertia change
};

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::vector<double>> centroids;  // dense, length = point dimension
  std::vector<std::size_t> assignment;         // per point
  // Filled by the labeling strategies; nullopt marks an unresolved cluster.
  std::vector<std::optional<std::string>> cluster_labels;
  double inertia = 0.0;
  // Inertia after each assignment step of the kept restart.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;
};

// Lloyd iterations from k-means++ seeding, best of `restarts`. Empty
// clusters keep their previous centroid. Throws when k > |points| or k == 0.
ClusterAssignment kmeans(std::span<const FeatureVector> points, std::size_t k,
                         std::uint64_t seed, const KMeansOptions& options = {});

double squared_distance(const FeatureVector& x, std::span<const double> centroid,
                        double centroid_sq_norm);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace idalc
