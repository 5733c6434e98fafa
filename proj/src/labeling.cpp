#include "idalc/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "idalc/error.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

std::unordered_map<UtteranceId, std::string> seed_lookup(const AnnotatedSeed& seed) {
  std::unordered_map<UtteranceId, std::string> out;
  for (const auto& [id, label] : seed.pairs) out.emplace(id, label);
  return out;
}

// Most frequent allowed label among the seed members of each cluster.
void label_clusters(ClusterAssignment& clusters, std::span<const UtteranceId> flagged,
                    const std::unordered_map<UtteranceId, std::string>& seeds,
                    const std::vector<std::string>* allowed) {
  std::vector<std::map<std::string, std::size_t>> votes(clusters.k);
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    auto it = seeds.find(flagged[i]);
    if (it == seeds.end()) continue;
    if (allowed && !std::binary_search(allowed->begin(), allowed->end(), it->second)) continue;
    ++votes[clusters.assignment[i]][it->second];
  }
  for (std::size_t c = 0; c < clusters.k; ++c) {
    std::size_t best = 0;
    for (const auto& [label, count] : votes[c]) {
      if (count > best) {  // map order keeps the smaller label on ties
        best = count;
        clusters.cluster_labels[c] = label;
      }
    }
  }
}

Labeling emit(std::span<const UtteranceId> flagged, ClusterAssignment clusters,
              const std::unordered_map<UtteranceId, std::string>& seeds) {
  Labeling out;
  out.labels.reserve(flagged.size());
  for (std::size_t i = 0; i < flagged.size(); ++i) {
    auto it = seeds.find(flagged[i]);
    out.labels.emplace_back(flagged[i], it != seeds.end()
                                            ? it->second
                                            : *clusters.cluster_labels[clusters.assignment[i]]);
  }
  out.clusters = std::move(clusters);
  return out;
}

}  // namespace

std::string strategy_name(LabelingStrategy s) {
  switch (s) {
    case LabelingStrategy::kKMeans: return "km";
    case LabelingStrategy::kMajorityVote: return "mv";
    case LabelingStrategy::kClusterThenLabel: return "cl";
  }
  return "?";
}

LabelingStrategy parse_strategy(const std::string& name) {
  if (name == "km") return LabelingStrategy::kKMeans;
  if (name == "mv") return LabelingStrategy::kMajorityVote;
  if (name == "cl") return LabelingStrategy::kClusterThenLabel;
  throw ConfigError(fmt::format("unknown labeling strategy '{}'", name));
}

std::map<std::string, std::size_t> AnnotatedSeed::label_frequencies() const {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, label] : pairs) ++out[label];
  return out;
}

std::vector<std::string> AnnotatedSeed::discovered_labels() const {
  std::vector<std::string> out;
  for (const auto& [label, count] : label_frequencies()) out.push_back(label);
  return out;
}

double AnnotatedSeed::majority_threshold() const {
  const auto discovered = label_frequencies().size();
  if (discovered == 0) return 0.0;
  return static_cast<double>(pairs.size()) / static_cast<double>(discovered);
}

std::vector<std::string> AnnotatedSeed::majority_labels() const {
  const double t = majority_threshold();
  std::vector<std::string> out;
  const auto freq = label_frequencies();
  for (const auto& [label, count] : freq) {
    if (static_cast<double>(count) > t) out.push_back(label);
  }
  if (out.empty()) {
    for (const auto& [label, count] : freq) out.push_back(label);
  }
  return out;
}

std::vector<UtteranceId> sample_seed(std::span<const UtteranceId> flagged, double m,
                                     std::uint64_t seed) {
  if (!(m > 0.0 && m <= 1.0)) throw ConfigError("labeling.m must be in (0, 1]");
  if (flagged.empty()) return {};
  // Guard against 0.2 * 2945 = 589.0000000000001.
  const auto count = static_cast<std::size_t>(
      std::ceil(m * static_cast<double>(flagged.size()) - 1e-9));
  Rng rng(seed);
  const auto picks = sample_without_replacement(flagged.size(), count, rng);
  std::vector<UtteranceId> out;
  out.reserve(picks.size());
  for (auto p : picks) out.push_back(flagged[p]);
  return out;
}

void inherit_nearest_labels(ClusterAssignment& clusters) {
  std::vector<std::size_t> labeled;
  for (std::size_t c = 0; c < clusters.k; ++c) {
    if (clusters.cluster_labels[c]) labeled.push_back(c);
  }
  if (labeled.empty()) throw Error("no cluster received a seed label");
  for (std::size_t c = 0; c < clusters.k; ++c) {
    if (clusters.cluster_labels[c]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = labeled.front();
    for (auto l : labeled) {
      const double d = squared_distance(clusters.centroids[c], clusters.centroids[l]);
      if (d < best) {
        best = d;
        best_c = l;
      }
    }
    clusters.cluster_labels[c] = clusters.cluster_labels[best_c];
  }
}

Labeling km_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::uint64_t rng_seed,
                  const KMeansOptions& options) {
  if (seed.pairs.empty()) throw Error("km_label: no seed annotations");
  const auto majority = seed.majority_labels();
  if (majority.empty()) {
    throw Error("km_label: no majority labels in the seed; increase labeling.m");
  }
  const auto points = store.gather(flagged);
  const std::size_t k = std::min(majority.size(), points.size());
  auto clusters = kmeans(points, k, rng_seed, options);
  const auto seeds = seed_lookup(seed);
  label_clusters(clusters, flagged, seeds, &majority);
  inherit_nearest_labels(clusters);
  return emit(flagged, std::move(clusters), seeds);
}

Labeling cl_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::size_t known_count, std::uint64_t rng_seed,
                  const KMeansOptions& options) {
  if (known_count == 0) throw Error("cl_label: known_count must be positive");
  if (seed.pairs.empty()) throw Error("cl_label: no seed annotations");
  const auto points = store.gather(flagged);
  const std::size_t k = std::min(2 * known_count, points.size());
  auto clusters = kmeans(points, k, rng_seed, options);
  const auto seeds = seed_lookup(seed);
  label_clusters(clusters, flagged, seeds, nullptr);
  inherit_nearest_labels(clusters);
  return emit(flagged, std::move(clusters), seeds);
}

std::optional<std::string> resolve_plurality(
    std::span<const std::optional<std::string>> votes,
    const std::map<std::string, double>& mean_probability) {
  std::map<std::string, std::size_t> counts;
  for (const auto& v : votes) {
    if (v) ++counts[*v];
  }
  if (counts.empty()) return std::nullopt;
  std::optional<std::string> best;
  std::size_t best_count = 0;
  double best_prob = -1.0;
  for (const auto& [label, count] : counts) {
    auto it = mean_probability.find(label);
    const double prob = it == mean_probability.end() ? 0.0 : it->second;
    if (count > best_count || (count == best_count && prob > best_prob)) {
      best = label;
      best_count = count;
      best_prob = prob;
    }
  }
  return best;
}

Labeling mv_label(std::span<const UtteranceId> flagged, const FeatureStore& store,
                  const AnnotatedSeed& seed, std::span<const MemberKind> kinds,
                  const TrainingConfig& config, std::uint64_t rng_seed) {
  if (seed.pairs.empty()) throw Error("mv_label: no seed annotations");
  const auto seeds = seed_lookup(seed);
  Labeling out;
  const auto discovered = seed.discovered_labels();
  if (discovered.size() < 2) {
    const std::string message = fmt::format(
        "mv_label: seed covers a single label '{}'; labeling every flagged sample with it",
        discovered.front());
    spdlog::warn(message);
    out.warnings.push_back(message);
    for (auto id : flagged) out.labels.emplace_back(id, discovered.front());
    return out;
  }

  std::vector<FeatureVector> x;
  std::vector<std::string> y;
  for (const auto& [id, label] : seed.pairs) {
    x.push_back(store.at(id));
    y.push_back(label);
  }
  const auto members = train_ensemble(x, y, kinds, config, rng_seed);
  if (std::none_of(members.begin(), members.end(),
                   [](const EnsembleMember& m) { return m.usable(); })) {
    throw Error("mv_label: no ensemble member could be fitted on the seed");
  }
  for (const auto& m : members) {
    if (!m.usable()) {
      out.warnings.push_back(fmt::format("mv_label: {} abstains ({})",
                                         member_kind_name(m.kind), m.unusable_reason));
    }
  }

  std::vector<std::optional<std::string>> votes;
  for (auto id : flagged) {
    if (auto it = seeds.find(id); it != seeds.end()) {
      out.labels.emplace_back(id, it->second);
      continue;
    }
    const auto& features = store.at(id);
    votes.clear();
    std::map<std::string, double> prob_sum;
    std::size_t usable = 0;
    for (const auto& m : members) {
      if (!m.usable()) {
        votes.emplace_back(std::nullopt);
        continue;
      }
      const auto probs = m.model->predict_proba(features);
      const auto& labels = m.model->labels();
      for (std::size_t c = 0; c < labels.size(); ++c) prob_sum[labels[c]] += probs[c];
      votes.emplace_back(labels[m.model->predict_index(features)]);
      ++usable;
    }
    for (auto& [label, sum] : prob_sum) sum /= static_cast<double>(usable);
    out.labels.emplace_back(id, *resolve_plurality(votes, prob_sum));
  }
  return out;
}

}  // namespace idalc
