#include "idalc/models/ensemble.hpp"

#include <cmath>

#include <fmt/format.h>

#include "idalc/models/knn.hpp"
#include "idalc/models/lda.hpp"
#include "idalc/models/tree.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

class LogisticMember final : public Classifier {
 public:
  explicit LogisticMember(ModelHandle model) : model_(std::move(model)) {}
  const std::vector<std::string>& labels() const override { return model_.labels(); }
  std::vector<double> predict_proba(const FeatureVector& x) const override {
    return model_.predict_proba(x);
  }

 private:
  ModelHandle model_;
};

}  // namespace

std::string member_kind_name(MemberKind kind) {
  switch (kind) {
    case MemberKind::kRandomForest: return "RF";
    case MemberKind::kBagging: return "Bg";
    case MemberKind::kKNearestNeighbor: return "KNN";
    case MemberKind::kLinearDiscriminant: return "LDA";
    case MemberKind::kLogisticRegression: return "LR";
  }
  return "?";
}

MemberKind parse_member_kind(const std::string& name) {
  for (auto kind : kDefaultEnsemble) {
    if (member_kind_name(kind) == name) return kind;
  }
  throw ConfigError(fmt::format("unknown ensemble member '{}'", name));
}

std::optional<std::string> EnsembleMember::vote(const FeatureVector& x) const {
  if (!model) return std::nullopt;
  return model->predict(x);
}

std::unique_ptr<Classifier> fit_member(MemberKind kind, std::span<const FeatureVector> features,
                                       std::span<const std::string> labels,
                                       const TrainingConfig& config, std::uint64_t seed) {
  if (encode_labels(labels).labels.size() < 2) {
    throw UnfittableError("fewer than 2 distinct labels");
  }
  switch (kind) {
    case MemberKind::kRandomForest: {
      ForestParams params;
      params.trees = config.rf_trees;
      params.tree.max_depth = kRandomForestDepth;
      const auto dim = std::max<std::size_t>(feature_dimension(features), 1);
      params.tree.features_per_split =
          std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(dim))));
      return TreeEnsembleClassifier::fit(features, labels, params, seed);
    }
    case MemberKind::kBagging: {
      ForestParams params;
      params.trees = kBaggingTrees;
      params.tree.max_depth = kBaggingDepth;
      params.tree.features_per_split = 0;
      return TreeEnsembleClassifier::fit(features, labels, params, seed);
    }
    case MemberKind::kKNearestNeighbor:
      return KNearestNeighbors::fit(features, labels, config.knn_k);
    case MemberKind::kLinearDiscriminant:
      return ProjectedLda::fit(features, labels, config.projection_dim, kLdaShrinkage, seed);
    case MemberKind::kLogisticRegression:
      return std::make_unique<LogisticMember>(train_base(features, labels, config));
  }
  throw UnfittableError("unknown member kind");
}

std::vector<EnsembleMember> train_ensemble(std::span<const FeatureVector> features,
                                           std::span<const std::string> labels,
                                           std::span<const MemberKind> kinds,
                                           const TrainingConfig& config, std::uint64_t seed) {
  std::vector<EnsembleMember> members;
  members.reserve(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    EnsembleMember m;
    m.kind = kinds[i];
    m.seed = mix_seed(seed, static_cast<std::uint64_t>(kinds[i]));
    try {
      m.model = fit_member(kinds[i], features, labels, config, m.seed);
    } catch (const UnfittableError& e) {
      m.unusable_reason = e.what();
    }
    members.push_back(std::move(m));
  }
  return members;
}

}  // namespace idalc
