#include "idalc/models/softmax.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

namespace idalc {
namespace {

// Returns the objective; writes the gradient unless `grad` is empty.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

// Monotone accelerated gradient with a fixed step: a Nesterov extrapolation
// whose iterate is only accepted when it does not raise the objective.
// Returns the objective of the kept iterate before each epoch and writes the
// final objective to *final_loss.
std::vector<double> descend(std::vector<double>& params, const Objective& objective,
                            double learning_rate, int epochs, double* final_loss) {
  const std::size_t n = params.size();
  std::vector<double> grad(n), y(params), z(n), previous(params);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(epochs));
  double f_x = objective(params, {});
  double t = 1.0;
  for (int e = 0; e < epochs; ++e) {
    history.push_back(f_x);
    objective(y, grad);
    for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - learning_rate * grad[i];
    const double f_z = objective(z, {});
    previous = params;
    const bool accept = f_z <= f_x;
    if (accept) {
      params = z;
      f_x = f_z;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double a = t / t_next;
    const double b = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = params[i] + a * (z[i] - params[i]) + b * (params[i] - previous[i]);
    }
    t = t_next;
  }
  *final_loss = f_x;
  return history;
}

double log_sigmoid(double z) {
  return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void TrainingConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("training.lr must be positive");
  if (epochs < 1) throw ConfigError("training.epochs must be at least 1");
  if (l2 < 0.0) throw ConfigError("training.l2 must be non-negative");
  if (knn_k < 1) throw ConfigError("training.knn_k must be at least 1");
  if (rf_trees < 1) throw ConfigError("training.rf_trees must be at least 1");
  if (projection_dim < 1) throw ConfigError("training.projection_dim must be at least 1");
}

ModelHandle::ModelHandle(std::vector<std::string> labels, std::size_t dim,
                         std::vector<double> weights, std::vector<double> bias,
                         TrainingMeta meta)
    : labels_(std::move(labels)),
      dim_(dim),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      meta_(std::move(meta)) {
  if (weights_.size() != labels_.size() * dim_ || bias_.size() != labels_.size()) {
    throw Error("ModelHandle: parameter shapes do not match the label list");
  }
}

std::vector<double> ModelHandle::logits(const FeatureVector& x) const {
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < labels_.size(); ++c) {
    z[c] += dot(x, std::span<const double>(weights_).subspan(c * dim_, dim_));
  }
  return z;
}

std::vector<double> ModelHandle::predict_proba(const FeatureVector& x) const {
  auto z = logits(x);
  softmax_in_place(z);
  return z;
}

SoftmaxObjective::SoftmaxObjective(std::span<const FeatureVector> features,
                                   std::span<const std::size_t> codes,
                                   std::size_t classes, std::size_t dim, double l2)
    : features_(features), codes_(codes), classes_(classes), dim_(dim), l2_(l2) {}

double SoftmaxObjective::loss(std::span<const double> params) const {
  return loss_and_gradient(params, {});
}

double SoftmaxObjective::loss_and_gradient(std::span<const double> params,
                                           std::span<double> grad) const {
  const auto weights = params.subspan(0, classes_ * dim_);
  const auto bias = params.subspan(classes_ * dim_, classes_);
  const bool want_grad = !grad.empty();
  std::fill(grad.begin(), grad.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(features_.size());
  std::vector<double> z(classes_);
  double loss = 0.0;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    const auto& x = features_[i];
    for (std::size_t c = 0; c < classes_; ++c) {
      z[c] = bias[c] + dot(x, weights.subspan(c * dim_, dim_));
    }
    const double max = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto v : z) sum += std::exp(v - max);
    const double log_norm = max + std::log(sum);
    loss -= (z[codes_[i]] - log_norm) * inv_n;
    if (!want_grad) continue;
    for (std::size_t c = 0; c < classes_; ++c) {
      const double residual =
          (std::exp(z[c] - log_norm) - (c == codes_[i] ? 1.0 : 0.0)) * inv_n;
      if (residual == 0.0) continue;
      double* row = grad.data() + c * dim_;
      for (std::size_t k = 0; k < x.size(); ++k) {
        row[x.indices[k]] += residual * x.values[k];
      }
      grad[classes_ * dim_ + c] += residual;
    }
  }
  if (l2_ > 0.0) {
    double sq = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      sq += weights[j] * weights[j];
      if (want_grad) grad[j] += l2_ * weights[j];
    }
    loss += 0.5 * l2_ * sq;
  }
  return loss;
}

ModelHandle train_base(std::span<const FeatureVector> features,
                       std::span<const std::string> labels,
                       const TrainingConfig& config) {
  if (features.size() != labels.size()) {
    throw Error("train_base: features and labels differ in length");
  }
  auto enc = encode_labels(labels);
  if (enc.labels.size() < 2) {
    throw Error(fmt::format(
        "train_base: need at least 2 distinct labels, got {}", enc.labels.size()));
  }
  const std::size_t classes = enc.labels.size();
  const std::size_t dim = feature_dimension(features);
  SoftmaxObjective objective(features, enc.codes, classes, dim, config.l2);
  std::vector<double> params(objective.parameter_count(), 0.0);

  TrainingMeta meta;
  meta.epochs = config.epochs;
  meta.learning_rate = config.learning_rate;
  meta.loss_history = descend(
      params,
      [&](std::span<const double> p, std::span<double> g) {
        return objective.loss_and_gradient(p, g);
      },
      config.learning_rate, config.epochs, &meta.final_loss);

  std::vector<double> weights(params.begin(),
                              params.begin() + static_cast<std::ptrdiff_t>(classes * dim));
  std::vector<double> bias(params.begin() + static_cast<std::ptrdiff_t>(classes * dim),
                           params.end());
  return ModelHandle(std::move(enc.labels), dim, std::move(weights), std::move(bias),
                     std::move(meta));
}

double BinaryLogistic::score(const FeatureVector& x) const {
  return sigmoid(bias + dot(x, weights));
}

BinaryLogistic train_binary_logistic(std::span<const FeatureVector> features,
                                     std::span<const std::uint8_t> targets,
                                     const TrainingConfig& config, TrainingMeta* meta) {
  if (features.size() != targets.size() || features.empty()) {
    throw Error("train_binary_logistic: need matching, non-empty inputs");
  }
  const std::size_t dim = feature_dimension(features);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  const double l2 = config.l2;
  auto objective = [&](std::span<const double> p, std::span<double> g) {
    const bool want_grad = !g.empty();
    std::fill(g.begin(), g.end(), 0.0);
    const auto w = p.subspan(0, dim);
    const double b = p[dim];
    double loss = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const double z = b + dot(features[i], w);
      const double y = targets[i] ? 1.0 : 0.0;
      loss -= (y * log_sigmoid(z) + (1.0 - y) * log_sigmoid(-z)) * inv_n;
      if (!want_grad) continue;
      const double residual = (sigmoid(z) - y) * inv_n;
      const auto& x = features[i];
      for (std::size_t k = 0; k < x.size(); ++k) g[x.indices[k]] += residual * x.values[k];
      g[dim] += residual;
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      sq += p[j] * p[j];
      if (want_grad) g[j] += l2 * p[j];
    }
    return loss + 0.5 * l2 * sq;
  };

  std::vector<double> params(dim + 1, 0.0);
  TrainingMeta local;
  local.epochs = config.epochs;
  local.learning_rate = config.learning_rate;
  local.loss_history =
      descend(params, objective, config.learning_rate, config.epochs, &local.final_loss);
  if (meta) *meta = std::move(local);

  BinaryLogistic out;
  out.bias = params[dim];
  params.resize(dim);
  out.weights = std::move(params);
  return out;
}

}  // namespace idalc
