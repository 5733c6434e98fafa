#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"

namespace idalc {

// Shared by the base model, the LR ensemble member and the DOC scorers,
// plus the ensemble hyperparameters that travel with it in the run config.
struct TrainingConfig {
  double learning_rate = 0.1;
  int epochs = 300;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::size_t knn_k = 5;
  std::size_t rf_trees = 100;
  std::size_t projection_dim = 256;

  void validate() const;
};

struct TrainingMeta {
  int epochs = 0;
  double learning_rate = 0.0;
  double final_loss = 0.0;
  // Objective of the kept iterate before each epoch; size == epochs.
  std::vector<double> loss_history;
};

// Multinomial logistic regression, the probabilistic intent model.
class ModelHandle final : public Classifier {
 public:
  ModelHandle() = default;
  // weights: row-major |labels| x dim.
  ModelHandle(std::vector<std::string> labels, std::size_t dim,
              std::vector<double> weights, std::vector<double> bias,
              TrainingMeta meta = {});

  const std::vector<std::string>& labels() const override { return labels_; }
  std::vector<double> predict_proba(const FeatureVector& x) const override;
  std::vector<double> logits(const FeatureVector& x) const;

  std::size_t dim() const { return dim_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  const TrainingMeta& training_meta() const { return meta_; }

 private:
  std::vector<std::string> labels_;
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  TrainingMeta meta_;
};

// Full-batch, fixed-step monotone accelerated gradient from zero weights.
ModelHandle train_base(std::span<const FeatureVector> features,
                       std::span<const std::string> labels,
                       const TrainingConfig& config);

// Mean cross-entropy + (l2 / 2) * ||W||^2 over parameters laid out as
// [W row-major (classes x dim), bias (classes)]. The bias is not penalized.
class SoftmaxObjective {
 public:
  SoftmaxObjective(std::span<const FeatureVector> features,
                   std::span<const std::size_t> codes, std::size_t classes,
                   std::size_t dim, double l2);

  std::size_t parameter_count() const { return classes_ * (dim_ + 1); }
  double loss(std::span<const double> params) const;
  // Returns the loss; also writes the gradient when `grad` is non-empty.
  double loss_and_gradient(std::span<const double> params, std::span<double> grad) const;

 private:
  std::span<const FeatureVector> features_;
  std::span<const std::size_t> codes_;
  std::size_t classes_;
  std::size_t dim_;
  double l2_;
};

// One-vs-rest sigmoid scorer.
struct BinaryLogistic {
  std::vector<double> weights;
  double bias = 0.0;

  double score(const FeatureVector& x) const;
};

// Same solver as train_base, with a sigmoid head; targets are 0/1.
BinaryLogistic train_binary_logistic(std::span<const FeatureVector> features,
                                     std::span<const std::uint8_t> targets,
                                     const TrainingConfig& config,
                                     TrainingMeta* meta = nullptr);

}  // namespace idalc
