#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"

namespace idalc {

struct Neighbor {
  std::size_t index;
  double distance;
};

// Brute-force cosine k-nearest neighbours over sparse rows, scored through
// an inverted index. Ties in distance go to the lower training index.
class CosineNeighborIndex {
 public:
  explicit CosineNeighborIndex(std::span<const FeatureVector> rows);

  std::size_t size() const { return norms_.size(); }
  // Cosine distance 1 - cos; rows or queries with zero norm are at distance 1.
  double distance(const FeatureVector& query, std::size_t row) const;
  // `exclude` skips one training row (used for leave-self-out queries).
  std::vector<Neighbor> nearest(const FeatureVector& query, std::size_t k,
                                std::size_t exclude = static_cast<std::size_t>(-1)) const;

 private:
  struct Posting {
    std::uint32_t row;
    double value;
  };
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> norms_;
  std::vector<FeatureVector> rows_;
};

class KNearestNeighbors final : public Classifier {
 public:
  static std::unique_ptr<KNearestNeighbors> fit(std::span<const FeatureVector> features,
                                                std::span<const std::string> labels,
                                                std::size_t k);

  const std::vector<std::string>& labels() const override { return labels_; }
  // Vote fractions among the k nearest rows.
  std::vector<double> predict_proba(const FeatureVector& x) const override;
  // Plurality; ties go to the label of the nearest tied neighbour.
  std::size_t predict_index(const FeatureVector& x) const override;

 private:
  KNearestNeighbors(std::span<const FeatureVector> features, std::size_t k)
      : index_(features), k_(k) {}

  CosineNeighborIndex index_;
  std::size_t k_;
  std::vector<std::string> labels_;
  std::vector<std::size_t> codes_;
};

}  // namespace idalc
