#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "idalc/corpus.hpp"
#include "idalc/feature_store.hpp"
#include "idalc/models/classifier.hpp"
#include "idalc/models/softmax.hpp"

namespace idalc {

enum class DetectorKind { kMsp, kDoc, kLof };

std::string detector_name(DetectorKind kind);
DetectorKind parse_detector(const std::string& name);

// Partition of the unlabeled ids into flagged OOD and in-domain remainder.
// Both lists keep the input order.
struct OodPartition {
  std::vector<UtteranceId> flagged;
  std::vector<UtteranceId> remainder;
};

// Flags a sample iff its maximum class probability is below `threshold`.
OodPartition msp_detect(const Classifier& model, std::span<const UtteranceId> ids,
                        const FeatureStore& store, double threshold);

inline constexpr double kDocThresholdFloor = 0.5;
inline constexpr double kDocThresholdCeiling = 0.999;

// One-vs-rest sigmoid scorers with per-class rejection thresholds.
struct DocModel {
  std::vector<std::string> classes;
  std::vector<BinaryLogistic> scorers;
  std::vector<double> thresholds;

  std::vector<double> scores(const FeatureVector& x) const;
  // True when every class score falls below its threshold.
  bool rejects(const FeatureVector& x) const;
};

// max(0.5, 1 - alpha * sigma), sigma the population std of the scores
// mirrored around 1, clamped to at most 0.999; 0.5 with fewer than 2 scores.
double doc_threshold(std::span<const double> positive_scores, double alpha);

DocModel doc_fit(std::span<const FeatureVector> features, std::span<const std::string> labels,
                 const TrainingConfig& config, double alpha = 3.0);

OodPartition doc_detect(const DocModel& doc, std::span<const UtteranceId> ids,
                        const FeatureStore& store);

// Local outlier factor of each query against the reference points, with
// cosine distance and exactly k neighbours (ties by index). Local
// reachability densities use 1 / (mean reach-distance + 1e-10).
std::vector<double> lof_scores(std::span<const FeatureVector> reference,
                               std::span<const FeatureVector> queries, std::size_t k);

// Flags the floor(contamination * n) highest-scoring samples.
OodPartition lof_detect(std::span<const FeatureVector> reference,
                        std::span<const UtteranceId> ids, const FeatureStore& store,
                        std::size_t k, double contamination);

struct OodEvaluation {
  double accuracy = 0.0;
  double macro_f1 = 0.0;  // mean of in-domain F1 and OOD F1, 0/0 -> 0
  std::size_t true_ood = 0;
  std::size_t false_ood = 0;
  std::size_t true_in_domain = 0;
  std::size_t missed_ood = 0;

  double novel_recall() const;
  double false_flag_rate() const;
};

OodEvaluation evaluate_ood(const OodPartition& partition,
                           const std::function<bool(UtteranceId)>& is_novel);

}  // namespace idalc
