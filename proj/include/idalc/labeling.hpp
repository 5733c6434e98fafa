#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "idalc/corpus.hpp"
#include "idalc/feature_store.hpp"
#include "idalc/kmeans.hpp"
#include "idalc/models/ensemble.hpp"

namespace idalc {

enum class LabelingStrategy { kKMeans, kMajorityVote, kClusterThenLabel };

std::string strategy_name(LabelingStrategy s);
LabelingStrategy parse_strategy(const std::string& name);

// Oracle-annotated subset of the flagged samples.
struct AnnotatedSeed {
  std::vector<std::pair<UtteranceId, std::string>> pairs;

  std::map<std::string, std::size_t> label_frequencies() const;
  std::vector<std::string> discovered_labels() const;
  // |pairs| / |discovered labels|.
  double majority_threshold() const;
  // Labels whose frequency is strictly above the threshold. When no label
  // clears it (a perfectly uniform seed, including a single label), every
  // discovered label counts.
  std::vector<std::string> majority_labels() const;
};

// ceil(m * |flagged|) ids drawn uniformly without replacement.
std::vector<UtteranceId> sample_seed(std::span<const UtteranceId> flagged, double m,
                                     std::uint64_t seed);

struct Labeling {
  // One entry per flagged id, in input order.
  std::vector<std::pair<UtteranceId, std::string>> labels;
  std::optional<ClusterAssignment> clusters;
  std::vector<std::string> warnings;
};

// KM: k = number of majority labels; clusters take the most frequent
// majority label among their seed members.
Labeling km_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::uint64_t rng_seed,
                  const KMeansOptions& options = {});

// MV: ensemble trained on the seed votes the remaining samples.
Labeling mv_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::span<const MemberKind> kinds,
                  const TrainingConfig& config, std::uint64_t rng_seed);

// CL: k = 2 * known_count (at most |flagged|); clusters take the majority
// label of their seed members, same-label clusters merge.
Labeling cl_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::size_t known_count, std::uint64_t rng_seed,
                  const KMeansOptions& options = {});

// Resolves cluster labels: clusters without a label take the label of the
// nearest labeled centroid (squared Euclidean, ties to the lower index).
void inherit_nearest_labels(ClusterAssignment& clusters);

// Plurality over non-abstaining votes. Ties go to the larger mean predicted
// probability, then to the lexicographically smaller label. nullopt when
// every vote abstains.
std::optional<std::string> resolve_plurality(
    std::span<const std::optional<std::string>> votes,
    const std::map<std::string, double>& mean_probability);

}  // namespace idalc
