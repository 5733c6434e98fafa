#include "idalc/ood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "idalc/models/knn.hpp"

namespace idalc {

std::string detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kMsp: return "msp";
    case DetectorKind::kDoc: return "doc";
    case DetectorKind::kLof: return "lof";
  }
  return "?";
}

DetectorKind parse_detector(const std::string& name) {
  if (name == "msp") return DetectorKind::kMsp;
  if (name == "doc") return DetectorKind::kDoc;
  if (name == "lof") return DetectorKind::kLof;
  throw ConfigError(fmt::format("unknown detector '{}'", name));
}

OodPartition msp_detect(const Classifier& model, std::span<const UtteranceId> ids,
                        const FeatureStore& store, double threshold) {
  OodPartition out;
  for (auto id : ids) {
    const auto probs = model.predict_proba(store.at(id));
    const double confidence = *std::max_element(probs.begin(), probs.end());
    (confidence < threshold ? out.flagged : out.remainder).push_back(id);
  }
  return out;
}

std::vector<double> DocModel::scores(const FeatureVector& x) const {
  std::vector<double> out;
  out.reserve(scorers.size());
  for (const auto& s : scorers) out.push_back(s.score(x));
  return out;
}

bool DocModel::rejects(const FeatureVector& x) const {
  for (std::size_t i = 0; i < scorers.size(); ++i) {
    if (scorers[i].score(x) >= thresholds[i]) return false;
  }
  return true;
}

double doc_threshold(std::span<const double> positive_scores, double alpha) {
  if (positive_scores.size() < 2) return kDocThresholdFloor;
  // Mirrored set {s, 2 - s} has mean 1, so sigma^2 = mean((s - 1)^2).
  double sq = 0.0;
  for (double s : positive_scores) sq += (s - 1.0) * (s - 1.0);
  const double sigma = std::sqrt(sq / static_cast<double>(positive_scores.size()));
  return std::clamp(1.0 - alpha * sigma, kDocThresholdFloor, kDocThresholdCeiling);
}

DocModel doc_fit(std::span<const FeatureVector> features, std::span<const std::string> labels,
                 const TrainingConfig& config, double alpha) {
  const auto enc = encode_labels(labels);
  if (enc.labels.size() < 2) throw Error("doc_fit: need at least 2 known classes");
  DocModel doc;
  doc.classes = enc.labels;
  std::vector<std::uint8_t> targets(features.size());
  for (std::size_t c = 0; c < enc.labels.size(); ++c) {
    for (std::size_t i = 0; i < features.size(); ++i) targets[i] = enc.codes[i] == c;
    auto scorer = train_binary_logistic(features, targets, config);
    std::vector<double> positives;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (targets[i]) positives.push_back(scorer.score(features[i]));
    }
    doc.thresholds.push_back(doc_threshold(positives, alpha));
    doc.scorers.push_back(std::move(scorer));
  }
  return doc;
}

OodPartition doc_detect(const DocModel& doc, std::span<const UtteranceId> ids,
                        const FeatureStore& store) {
  OodPartition out;
  for (auto id : ids) (doc.rejects(store.at(id)) ? out.flagged : out.remainder).push_back(id);
  return out;
}

std::vector<double> lof_scores(std::span<const FeatureVector> reference,
                               std::span<const FeatureVector> queries, std::size_t k) {
  if (k == 0 || k >= reference.size()) {
    throw Error(fmt::format("lof: k = {} must be in [1, {})", k, reference.size()));
  }
  constexpr double kEps = 1e-10;
  const CosineNeighborIndex index(reference);

  std::vector<std::vector<Neighbor>> ref_neighbors(reference.size());
  std::vector<double> k_distance(reference.size());
  for (std::size_t r = 0; r < reference.size(); ++r) {
    ref_neighbors[r] = index.nearest(reference[r], k, r);
    k_distance[r] = ref_neighbors[r].back().distance;
  }
  auto lrd = [&](const std::vector<Neighbor>& neighbors) {
    double reach = 0.0;
    for (const auto& nb : neighbors) reach += std::max(k_distance[nb.index], nb.distance);
    return 1.0 / (reach / static_cast<double>(neighbors.size()) + kEps);
  };
  std::vector<double> ref_lrd(reference.size());
  for (std::size_t r = 0; r < reference.size(); ++r) ref_lrd[r] = lrd(ref_neighbors[r]);

  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const auto neighbors = index.nearest(q, k);
    double mean_lrd = 0.0;
    for (const auto& nb : neighbors) mean_lrd += ref_lrd[nb.index];
    mean_lrd /= static_cast<double>(neighbors.size());
    out.push_back(mean_lrd / lrd(neighbors));
  }
  return out;
}

OodPartition lof_detect(std::span<const FeatureVector> reference,
                        std::span<const UtteranceId> ids, const FeatureStore& store,
                        std::size_t k, double contamination) {
  if (contamination < 0.0 || contamination > 1.0) {
    throw Error("lof: contamination must be in [0, 1]");
  }
  const auto queries = store.gather(ids);
  const auto scores = lof_scores(reference, queries, k);
  const auto count = static_cast<std::size_t>(
      std::floor(contamination * static_cast<double>(ids.size()) + 1e-9));
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<bool> flagged(ids.size(), false);
  for (std::size_t i = 0; i < count; ++i) flagged[order[i]] = true;
  OodPartition out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    (flagged[i] ? out.flagged : out.remainder).push_back(ids[i]);
  }
  return out;
}

double OodEvaluation::novel_recall() const {
  const auto positives = true_ood + missed_ood;
  return positives == 0 ? 0.0
                        : static_cast<double>(true_ood) / static_cast<double>(positives);
}

double OodEvaluation::false_flag_rate() const {
  const auto negatives = false_ood + true_in_domain;
  return negatives == 0 ? 0.0
                        : static_cast<double>(false_ood) / static_cast<double>(negatives);
}

OodEvaluation evaluate_ood(const OodPartition& partition,
                           const std::function<bool(UtteranceId)>& is_novel) {
  OodEvaluation e;
  for (auto id : partition.flagged) ++(is_novel(id) ? e.true_ood : e.false_ood);
  for (auto id : partition.remainder) ++(is_novel(id) ? e.missed_ood : e.true_in_domain);
  const auto total = partition.flagged.size() + partition.remainder.size();
  if (total > 0) {
    e.accuracy = static_cast<double>(e.true_ood + e.true_in_domain) / static_cast<double>(total);
  }
  auto f1 = [](std::size_t tp, std::size_t fp, std::size_t fn) {
    const auto denom = 2 * tp + fp + fn;
    return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
  };
  e.macro_f1 = 0.5 * (f1(e.true_ood, e.false_ood, e.missed_ood) +
                      f1(e.true_in_domain, e.missed_ood, e.false_ood));
  return e;
}

}  // namespace idalc
