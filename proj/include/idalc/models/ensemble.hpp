#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"
#include "idalc/models/softmax.hpp"

namespace idalc {

enum class MemberKind {
  kRandomForest,
  kBagging,
  kKNearestNeighbor,
  kLinearDiscriminant,
  kLogisticRegression,
};

// RF, LR, Bg, KNN, LDA.
inline constexpr std::array<MemberKind, 5> kDefaultEnsemble = {
    MemberKind::kRandomForest, MemberKind::kLogisticRegression, MemberKind::kBagging,
    MemberKind::kKNearestNeighbor, MemberKind::kLinearDiscriminant};

std::string member_kind_name(MemberKind kind);
MemberKind parse_member_kind(const std::string& name);

// Fixed hyperparameters of the members not exposed in TrainingConfig.
inline constexpr std::size_t kRandomForestDepth = 32;
inline constexpr std::size_t kBaggingTrees = 25;
inline constexpr std::size_t kBaggingDepth = 16;
inline constexpr double kLdaShrinkage = 1e-3;

struct EnsembleMember {
  MemberKind kind = MemberKind::kRandomForest;
  std::uint64_t seed = 0;
  std::shared_ptr<const Classifier> model;  // null when unusable
  std::string unusable_reason;

  bool usable() const { return model != nullptr; }
  // Predicted label, or nullopt when the member abstains.
  std::optional<std::string> vote(const FeatureVector& x) const;
};

// Fits one member; throws UnfittableError when the kind cannot fit.
std::unique_ptr<Classifier> fit_member(MemberKind kind, std::span<const FeatureVector> features,
                                       std::span<const std::string> labels,
                                       const TrainingConfig& config, std::uint64_t seed);

// Members that cannot fit are returned flagged unusable and abstain.
std::vector<EnsembleMember> train_ensemble(std::span<const FeatureVector> features,
                                           std::span<const std::string> labels,
                                           std::span<const MemberKind> kinds,
                                           const TrainingConfig& config, std::uint64_t seed);

}  // namespace idalc
