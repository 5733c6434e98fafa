#include "idalc/kmeans.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "idalc/error.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

struct Run {
  std::vector<std::vector<double>> centroids;
  std::vector<std::size_t> assignment;
  std::vector<double> history;
  double inertia = 0.0;
};

std::vector<std::vector<double>> seed_plus_plus(std::span<const FeatureVector> points,
                                                std::size_t k, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> centroids;
  auto densify = [&](std::size_t i) {
    std::vector<double> c(dim, 0.0);
    for (std::size_t j = 0; j < points[i].size(); ++j) c[points[i].indices[j]] = points[i].values[j];
    return c;
  };
  centroids.push_back(densify(uniform_index(rng, points.size())));
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    const auto& last = centroids.back();
    const double last_sq = sq_norm(last);
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], last, last_sq));
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(rng, points.size());
    } else {
      double target = uniform_unit(rng) * total;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      while (d2[pick] <= 0.0 && pick > 0) --pick;
    }
    centroids.push_back(densify(pick));
  }
  return centroids;
}

Run lloyd(std::span<const FeatureVector> points, std::size_t k, std::size_t dim, Rng& rng,
          const KMeansOptions& options) {
  Run run;
  run.centroids = seed_plus_plus(points, k, dim, rng);
  run.assignment.assign(points.size(), 0);
  std::vector<double> norms(k);
  for (std::size_t iter = 0;; ++iter) {
    for (std::size_t c = 0; c < k; ++c) norms[c] = sq_norm(run.centroids[c]);
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points[i], run.centroids[c], norms[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      run.assignment[i] = best_c;
      inertia += best;
    }
    run.history.push_back(inertia);
    run.inertia = inertia;
    const auto n = run.history.size();
    if (n >= 2) {
      const double prev = run.history[n - 2];
      if (prev - inertia <= options.tolerance * prev) break;
    }
    if (inertia <= 0.0 || iter + 1 >= options.max_iter) break;

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& s = sums[run.assignment[i]];
      for (std::size_t j = 0; j < points[i].size(); ++j) s[points[i].indices[j]] += points[i].values[j];
      ++counts[run.assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
      run.centroids[c] = std::move(sums[c]);
    }
  }
  return run;
}

}  // namespace

double squared_distance(const FeatureVector& x, std::span<const double> centroid,
                        double centroid_sq_norm) {
  double d = centroid_sq_norm;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double c = x.indices[j] < centroid.size() ? centroid[x.indices[j]] : 0.0;
    d += x.values[j] * x.values[j] - 2.0 * x.values[j] * c;
  }
  return std::max(d, 0.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

ClusterAssignment kmeans(std::span<const FeatureVector> points, std::size_t k,
                         std::uint64_t seed, const KMeansOptions& options) {
  if (k == 0) throw Error("kmeans: k must be positive");
  if (k > points.size()) {
    throw Error(fmt::format("kmeans: k = {} exceeds {} points", k, points.size()));
  }
  const std::size_t dim = std::max<std::size_t>(feature_dimension(points), 1);
  Run best;
  bool have = false;
  for (std::size_t r = 0; r < std::max<std::size_t>(options.restarts, 1); ++r) {
    Rng rng(mix_seed(seed, r));
    Run run = lloyd(points, k, dim, rng, options);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      have = true;
    }
  }
  ClusterAssignment out;
  out.k = k;
  out.centroids = std::move(best.centroids);
  out.assignment = std::move(best.assignment);
  out.cluster_labels.assign(k, std::nullopt);
  out.inertia = best.inertia;
  out.iterations = best.history.size();
  out.inertia_history = std::move(best.history);
  return out;
}

}  // namespace idalc
