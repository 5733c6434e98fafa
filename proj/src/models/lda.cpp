#include "idalc/models/lda.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "idalc/random.hpp"

namespace idalc {

std::vector<double> RandomProjection::apply(const FeatureVector& x) const {
  std::vector<double> out(dim_, 0.0);
  const double scale = std::sqrt(3.0 / static_cast<double>(dim_));
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = x.values[k] * scale;
    std::uint64_t bits = 0;
    for (std::size_t d = 0; d < dim_; ++d) {
      if (d % 8 == 0) bits = mix_seed(seed_, (std::uint64_t{x.indices[k]} << 24) | (d / 8));
      const auto byte = static_cast<unsigned>(bits & 0xFF);
      bits >>= 8;
      if (byte < 43) {
        out[d] += v;
      } else if (byte < 86) {
        out[d] -= v;
      }
    }
  }
  return out;
}

LinearDiscriminant LinearDiscriminant::fit(std::span<const std::vector<double>> rows,
                                           std::span<const std::string> labels,
                                           double shrinkage) {
  if (rows.empty()) throw UnfittableError("lda: no training rows");
  auto enc = encode_labels(labels);
  const std::size_t classes = enc.labels.size();
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  if (classes < 2) throw UnfittableError("lda: need at least 2 classes");

  std::vector<std::size_t> counts(classes, 0);
  for (auto c : enc.codes) ++counts[c];
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] < 2) {
      throw UnfittableError(fmt::format("lda: class '{}' has {} sample(s)",
                                        enc.labels[c], counts[c]));
    }
  }

  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes),
                                                static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    means.row(static_cast<Eigen::Index>(enc.codes[i])) +=
        Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), static_cast<Eigen::Index>(p));
  }
  for (std::size_t c = 0; c < classes; ++c) {
    means.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
  }
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    centered.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), static_cast<Eigen::Index>(p)) -
        means.row(static_cast<Eigen::Index>(enc.codes[i]));
  }
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - classes);
  const double mu = cov.trace() / static_cast<double>(p);
  if (!(mu > 0.0)) throw UnfittableError("lda: within-class covariance is zero");
  cov = (1.0 - shrinkage) * cov;
  cov.diagonal().array() += shrinkage * mu;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw UnfittableError("lda: covariance not positive definite");
  const Eigen::MatrixXd coef = llt.solve(means.transpose()).transpose();  // classes x p

  LinearDiscriminant lda;
  lda.labels_ = std::move(enc.labels);
  lda.dim_ = p;
  lda.coef_.resize(classes * p);
  lda.intercept_.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    for (std::size_t j = 0; j < p; ++j) lda.coef_[c * p + j] = coef(ci, static_cast<Eigen::Index>(j));
    lda.intercept_[c] = -0.5 * coef.row(ci).dot(means.row(ci)) +
                        std::log(static_cast<double>(counts[c]) / static_cast<double>(n));
  }
  return lda;
}

std::vector<double> LinearDiscriminant::decision_function(std::span<const double> x) const {
  std::vector<double> out(intercept_);
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t j = 0; j < dim_; ++j) out[c] += coef_[c * dim_ + j] * x[j];
  }
  return out;
}

std::vector<double> LinearDiscriminant::predict_proba(std::span<const double> x) const {
  auto z = decision_function(x);
  softmax_in_place(z);
  return z;
}

std::unique_ptr<ProjectedLda> ProjectedLda::fit(std::span<const FeatureVector> features,
                                                std::span<const std::string> labels,
                                                std::size_t projection_dim,
                                                double shrinkage, std::uint64_t seed) {
  RandomProjection projection(projection_dim, seed);
  std::vector<std::vector<double>> rows;
  rows.reserve(features.size());
  for (const auto& f : features) rows.push_back(projection.apply(f));
  auto lda = LinearDiscriminant::fit(rows, labels, shrinkage);
  return std::unique_ptr<ProjectedLda>(new ProjectedLda(projection, std::move(lda)));
}

std::vector<double> ProjectedLda::predict_proba(const FeatureVector& x) const {
  const auto projected = projection_.apply(x);
  return lda_.predict_proba(projected);
}

}  // namespace idalc
