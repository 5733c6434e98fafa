#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"
#include "idalc/models/ensemble.hpp"

namespace idalc {

// Builds a fitted classifier from a training fold; may throw UnfittableError.
using ClassifierFactory = std::function<std::unique_ptr<Classifier>(
    std::span<const FeatureVector>, std::span<const std::string>, std::uint64_t seed)>;

struct NamedFactory {
  std::string name;
  ClassifierFactory factory;
};

struct CvReport {
  std::vector<std::string> names;
  std::vector<double> mean_accuracy;
  std::vector<std::vector<double>> fold_accuracy;  // [classifier][fold]
  std::vector<std::size_t> fold_of;                // per sample
  std::size_t folds = 0;
};

// Shuffled fold assignment; fold sizes differ by at most one.
std::vector<std::size_t> assign_folds(std::size_t samples, std::size_t folds,
                                      std::uint64_t seed);

// A classifier that cannot fit on a fold scores 0 on it.
CvReport cross_validate(std::span<const FeatureVector> features,
                        std::span<const std::string> labels,
                        std::span<const NamedFactory> classifiers, std::size_t folds,
                        std::uint64_t seed);

CvReport cross_validate(std::span<const FeatureVector> features,
                        std::span<const std::string> labels,
                        std::span<const MemberKind> kinds, const TrainingConfig& config,
                        std::size_t folds, std::uint64_t seed);

}  // namespace idalc
