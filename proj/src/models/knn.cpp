#include "idalc/models/knn.hpp"

#include <algorithm>
#include <cmath>

namespace idalc {

CosineNeighborIndex::CosineNeighborIndex(std::span<const FeatureVector> rows)
    : rows_(rows.begin(), rows.end()) {
  postings_.resize(feature_dimension(rows));
  norms_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    norms_.push_back(norm(rows[r]));
    for (std::size_t k = 0; k < rows[r].size(); ++k) {
      postings_[rows[r].indices[k]].push_back(
          {static_cast<std::uint32_t>(r), rows[r].values[k]});
    }
  }
}

double CosineNeighborIndex::distance(const FeatureVector& query, std::size_t row) const {
  const double qn = norm(query);
  if (qn == 0.0 || norms_[row] == 0.0) return 1.0;
  return 1.0 - dot(query, rows_[row]) / (qn * norms_[row]);
}

std::vector<Neighbor> CosineNeighborIndex::nearest(const FeatureVector& query,
                                                   std::size_t k,
                                                   std::size_t exclude) const {
  const std::size_t n = norms_.size();
  std::vector<double> sims(n, 0.0);
  const double qn = norm(query);
  if (qn > 0.0) {
    for (std::size_t j = 0; j < query.size(); ++j) {
      if (query.indices[j] >= postings_.size()) continue;
      for (const auto& p : postings_[query.indices[j]]) {
        sims[p.row] += p.value * query.values[j];
      }
    }
  }
  std::vector<Neighbor> all;
  all.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r == exclude) continue;
    const double d =
        (qn == 0.0 || norms_[r] == 0.0) ? 1.0 : 1.0 - sims[r] / (qn * norms_[r]);
    all.push_back({r, d});
  }
  k = std::min(k, all.size());
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    closer);
  all.resize(k);
  return all;
}

std::unique_ptr<KNearestNeighbors> KNearestNeighbors::fit(
    std::span<const FeatureVector> features, std::span<const std::string> labels,
    std::size_t k) {
  if (features.empty()) throw UnfittableError("knn: no training rows");
  auto enc = encode_labels(labels);
  std::unique_ptr<KNearestNeighbors> model(new KNearestNeighbors(features, k));
  model->labels_ = std::move(enc.labels);
  model->codes_ = std::move(enc.codes);
  return model;
}

std::vector<double> KNearestNeighbors::predict_proba(const FeatureVector& x) const {
  std::vector<double> out(labels_.size(), 0.0);
  const auto neighbors = index_.nearest(x, k_);
  for (const auto& nb : neighbors) out[codes_[nb.index]] += 1.0;
  for (auto& v : out) v /= static_cast<double>(neighbors.size());
  return out;
}

std::size_t KNearestNeighbors::predict_index(const FeatureVector& x) const {
  const auto neighbors = index_.nearest(x, k_);
  std::vector<std::size_t> votes(labels_.size(), 0);
  for (const auto& nb : neighbors) ++votes[codes_[nb.index]];
  const auto top = *std::max_element(votes.begin(), votes.end());
  for (const auto& nb : neighbors) {
    if (votes[codes_[nb.index]] == top) return codes_[nb.index];
  }
  return 0;
}

}  // namespace idalc
