#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"
#include "idalc/random.hpp"

namespace idalc {

struct TreeParams {
  std::size_t max_depth = 32;
  // Candidate features per split, drawn from the features present at the
  // node; 0 means every present feature.
  std::size_t features_per_split = 0;
  std::size_t min_samples_split = 2;
};

// CART classification tree with Gini impurity over sparse rows. Absent
// coordinates are treated as 0.
class DecisionTree {
 public:
  // sample_weight holds bootstrap multiplicities; zero-weight rows are unused.
  void fit(std::span<const FeatureVector> rows, std::span<const std::size_t> codes,
           std::span<const double> sample_weight, std::size_t classes,
           const TreeParams& params, Rng& rng);

  // Class distribution of the leaf reached by x.
  std::span<const double> distribution(const FeatureVector& x) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t depth() const { return depth_; }

 private:
  struct Node {
    std::int64_t feature = -1;  // -1 for leaves
    double threshold = 0.0;     // value > threshold goes right
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t leaf = 0;  // offset into leaf_dists_
  };

  std::vector<Node> nodes_;
  std::vector<double> leaf_dists_;
  std::size_t classes_ = 0;
  std::size_t depth_ = 0;
};

struct ForestParams {
  std::size_t trees = 100;
  bool bootstrap = true;
  TreeParams tree;
};

// Averaged bootstrap trees: a random forest when features_per_split is set,
// plain bagging when it is 0.
class TreeEnsembleClassifier final : public Classifier {
 public:
  static std::unique_ptr<TreeEnsembleClassifier> fit(
      std::span<const FeatureVector> features, std::span<const std::string> labels,
      const ForestParams& params, std::uint64_t seed);

  const std::vector<std::string>& labels() const override { return labels_; }
  std::vector<double> predict_proba(const FeatureVector& x) const override;
  std::size_t tree_count() const { return trees_.size(); }

 private:
  std::vector<std::string> labels_;
  std::vector<DecisionTree> trees_;
};

}  // namespace idalc
