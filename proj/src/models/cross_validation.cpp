#include "idalc/models/cross_validation.hpp"

#include <fmt/format.h>

#include "idalc/random.hpp"

namespace idalc {

std::vector<std::size_t> assign_folds(std::size_t samples, std::size_t folds,
                                      std::uint64_t seed) {
  std::vector<std::size_t> order(samples);
  for (std::size_t i = 0; i < samples; ++i) order[i] = i;
  Rng rng(seed);
  shuffle_in_place(order, rng);
  std::vector<std::size_t> fold_of(samples);
  for (std::size_t pos = 0; pos < samples; ++pos) fold_of[order[pos]] = pos % folds;
  return fold_of;
}

CvReport cross_validate(std::span<const FeatureVector> features,
                        std::span<const std::string> labels,
                        std::span<const NamedFactory> classifiers, std::size_t folds,
                        std::uint64_t seed) {
  if (folds < 2) throw Error("cross_validate: need at least 2 folds");
  if (folds > features.size()) {
    throw Error(fmt::format("cross_validate: {} folds exceed {} samples", folds,
                            features.size()));
  }
  CvReport report;
  report.folds = folds;
  report.fold_of = assign_folds(features.size(), folds, seed);
  for (const auto& c : classifiers) {
    report.names.push_back(c.name);
    std::vector<double> accuracy;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<FeatureVector> train_x;
      std::vector<std::string> train_y;
      std::vector<std::size_t> held_out;
      for (std::size_t i = 0; i < features.size(); ++i) {
        if (report.fold_of[i] == f) {
          held_out.push_back(i);
        } else {
          train_x.push_back(features[i]);
          train_y.push_back(labels[i]);
        }
      }
      double correct = 0.0;
      try {
        const auto model = c.factory(train_x, train_y, mix_seed(seed, f));
        for (auto i : held_out) {
          if (model->predict(features[i]) == labels[i]) correct += 1.0;
        }
      } catch (const UnfittableError&) {
        correct = 0.0;
      }
      accuracy.push_back(correct / static_cast<double>(held_out.size()));
    }
    double mean = 0.0;
    for (double a : accuracy) mean += a;
    report.mean_accuracy.push_back(mean / static_cast<double>(folds));
    report.fold_accuracy.push_back(std::move(accuracy));
  }
  return report;
}

CvReport cross_validate(std::span<const FeatureVector> features,
                        std::span<const std::string> labels,
                        std::span<const MemberKind> kinds, const TrainingConfig& config,
                        std::size_t folds, std::uint64_t seed) {
  std::vector<NamedFactory> factories;
  for (auto kind : kinds) {
    factories.push_back({member_kind_name(kind),
                         [kind, &config](std::span<const FeatureVector> x,
                                         std::span<const std::string> y, std::uint64_t s) {
                           return fit_member(kind, x, y, config, s);
                         }});
  }
  return cross_validate(features, labels, factories, folds, seed);
}

}  // namespace idalc
