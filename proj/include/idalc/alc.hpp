#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idalc/corpus.hpp"
#include "idalc/feature_store.hpp"
#include "idalc/metrics.hpp"
#include "idalc/models/ensemble.hpp"
#include "idalc/models/softmax.hpp"

namespace idalc {

struct AlcConfig {
  double threshold_factor = 0.75;
  // Votes needed to auto-correct; nullopt disables voting so every
  // below-threshold sample goes to the oracle.
  std::optional<std::size_t> quorum = 3;
  std::size_t cycles = 2;

  void validate() const;
};

struct VoteRecord {
  UtteranceId id = 0;
  std::vector<std::optional<std::string>> votes;  // nullopt = abstain
  std::optional<std::string> winner;              // set iff winner_votes >= quorum
  std::size_t winner_votes = 0;
};

// Counts non-abstaining votes; the top label (lexicographically smaller on
// ties) wins iff its count reaches the quorum.
VoteRecord tally_votes(UtteranceId id, std::vector<std::optional<std::string>> votes,
                       std::optional<std::size_t> quorum);

struct CorrectionOutcome {
  std::vector<std::pair<UtteranceId, std::string>> auto_corrected;
  std::vector<UtteranceId> rejected;
  // Oracle labels of the rejected samples, same order.
  std::vector<std::pair<UtteranceId, std::string>> annotated;
  double threshold_used = 0.0;
  std::vector<VoteRecord> votes;  // below-threshold samples, remainder order

  std::size_t below_threshold() const { return auto_corrected.size() + rejected.size(); }
};

double max_confidence(const Classifier& model, const FeatureVector& x);

// threshold_factor * max over the remainder of the top-class probability.
double compute_threshold(const Classifier& model, std::span<const UtteranceId> remainder,
                         const FeatureStore& store, double threshold_factor);

// Votes every remainder sample whose confidence falls below the threshold;
// quorum winners are auto-corrected, the rest annotated by the oracle.
CorrectionOutcome correct_cycle(const Classifier& model, std::span<const UtteranceId> remainder,
                                const FeatureStore& store,
                                std::span<const EnsembleMember> ensemble,
                                const AlcConfig& config, const DataPool& pool,
                                AnnotationLedger& ledger);

// The growing labeled set and the shrinking unlabeled remainder.
struct WorkingSet {
  std::vector<UtteranceId> labeled_ids;
  std::vector<std::string> labeled_labels;
  std::vector<UtteranceId> remainder;

  void add_labeled(UtteranceId id, std::string label) {
    labeled_ids.push_back(id);
    labeled_labels.push_back(std::move(label));
  }
};

struct AlcCycle {
  std::size_t cycle = 0;
  CorrectionOutcome outcome;
  std::size_t labeled_before = 0;
  std::size_t labeled_after = 0;
  std::size_t remainder_before = 0;
  std::size_t remainder_after = 0;
  bool early_stop = false;
  Metrics metrics;
};

struct AlcResult {
  ModelHandle model;
  std::vector<AlcCycle> cycles;
};

using CycleEvaluator = std::function<Metrics(const ModelHandle&, std::size_t cycle)>;

// Runs up to config.cycles correction cycles, retraining the ensemble and
// the base model on the updated labeled set each time. Stops early when no
// remainder sample falls below the threshold.
AlcResult run_alc(const DataPool& pool, const FeatureStore& store, WorkingSet& working,
                  ModelHandle model, const AlcConfig& config,
                  const TrainingConfig& training, std::span<const MemberKind> kinds,
                  std::uint64_t seed, AnnotationLedger& ledger,
                  const CycleEvaluator& evaluate_cycle);

}  // namespace idalc
