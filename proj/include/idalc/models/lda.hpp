#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"

namespace idalc {

// Sparse random projection with entries +-sqrt(3 / dim) at density ~1/3.
// Column entries are derived from (seed, feature index), so no matrix is
// stored and unseen features project consistently.
class RandomProjection {
 public:
  RandomProjection(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

  std::size_t dim() const { return dim_; }
  std::vector<double> apply(const FeatureVector& x) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Gaussian linear discriminant with a pooled, shrunk covariance:
// S' = (1 - shrinkage) S + shrinkage * (tr S / p) I.
class LinearDiscriminant {
 public:
  // rows: n dense points of dimension p. Throws UnfittableError when a class
  // has fewer than 2 samples or the covariance cannot be factored.
  static LinearDiscriminant fit(std::span<const std::vector<double>> rows,
                                std::span<const std::string> labels, double shrinkage);

  const std::vector<std::string>& labels() const { return labels_; }
  // Per-class linear scores w_c . x + b_c.
  std::vector<double> decision_function(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;

  // Row-major |labels| x p.
  const std::vector<double>& coefficients() const { return coef_; }
  const std::vector<double>& intercepts() const { return intercept_; }

 private:
  std::vector<std::string> labels_;
  std::size_t dim_ = 0;
  std::vector<double> coef_;
  std::vector<double> intercept_;
};

// Projection followed by LDA, as an ensemble member over sparse features.
class ProjectedLda final : public Classifier {
 public:
  static std::unique_ptr<ProjectedLda> fit(std::span<const FeatureVector> features,
                                           std::span<const std::string> labels,
                                           std::size_t projection_dim, double shrinkage,
                                           std::uint64_t seed);

  const std::vector<std::string>& labels() const override { return lda_.labels(); }
  std::vector<double> predict_proba(const FeatureVector& x) const override;

 private:
  ProjectedLda(RandomProjection projection, LinearDiscriminant lda)
      : projection_(projection), lda_(std::move(lda)) {}

  RandomProjection projection_;
  LinearDiscriminant lda_;
};

}  // namespace idalc
