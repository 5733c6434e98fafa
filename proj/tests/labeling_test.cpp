#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "idalc/error.hpp"
#include "idalc/labeling.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

std::vector<UtteranceId> iota_ids(std::size_t n) {
  std::vector<UtteranceId> ids(n);
  std::iota(ids.begin(), ids.end(), UtteranceId{100});
  return ids;
}

TEST(SampleSeed, CeilingOfFraction) {
  EXPECT_EQ(sample_seed(iota_ids(2945), 0.2, 1).size(), 589u);
  EXPECT_EQ(sample_seed(iota_ids(1), 0.2, 1).size(), 1u);
  EXPECT_EQ(sample_seed(iota_ids(11), 0.2, 1).size(), 3u);
  EXPECT_TRUE(sample_seed({}, 0.2, 1).empty());
  EXPECT_THROW(sample_seed(iota_ids(3), 0.0, 1), ConfigError);
  EXPECT_THROW(sample_seed(iota_ids(3), 1.5, 1), ConfigError);
}

TEST(SampleSeed, WholeSetAtFullFraction) {
  const auto ids = iota_ids(40);
  auto picked = sample_seed(ids, 1.0, 3);
  std::sort(picked.begin(), picked.end());
  EXPECT_EQ(picked, ids);
}

TEST(SampleSeed, DistinctSubsetAndDeterministic) {
  const auto ids = iota_ids(500);
  const auto a = sample_seed(ids, 0.3, 4);
  EXPECT_EQ(a, sample_seed(ids, 0.3, 4));
  EXPECT_NE(a, sample_seed(ids, 0.3, 5));
  const std::set<UtteranceId> unique(a.begin(), a.end());
  EXPECT_EQ(unique.size(), a.size());
  for (auto id : a) EXPECT_TRUE(std::binary_search(ids.begin(), ids.end(), id));
}

AnnotatedSeed seed_with(const std::map<std::string, std::size_t>& counts) {
  AnnotatedSeed seed;
  UtteranceId id = 0;
  for (const auto& [label, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) seed.pairs.emplace_back(id++, label);
  }
  return seed;
}

TEST(AnnotatedSeed, MajorityThreshold) {
  const auto seed = seed_with({{"A", 40}, {"B", 30}, {"C", 20}, {"D", 6}, {"E", 4}});
  EXPECT_EQ(seed.pairs.size(), 100u);
  EXPECT_EQ(seed.majority_threshold(), 20.0);
  // Strictly above 20: C sits exactly on the threshold.
  EXPECT_EQ(seed.majority_labels(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(seed.discovered_labels().size(), 5u);
}

TEST(AnnotatedSeed, UniformSeedKeepsEveryLabel) {
  EXPECT_EQ(seed_with({{"A", 3}, {"B", 3}}).majority_labels(),
            (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(seed_with({{"A", 4}}).majority_labels(), (std::vector<std::string>{"A"}));
}

// Two blobs: ids 0..5 around (0, 0), ids 6..11 around (10, 10).
struct Blobs {
  FeatureStore store;
  std::vector<UtteranceId> flagged;
  std::vector<std::vector<double>> dense;
  std::string gold(UtteranceId id) const { return id < 6 ? "A" : "B"; }
};

Blobs two_blobs() {
  Blobs b;
  Rng rng(7);
  for (UtteranceId id = 0; id < 12; ++id) {
    const double c = id < 6 ? 0.0 : 10.0;
    b.dense.push_back({c + uniform_unit(rng), c + uniform_unit(rng)});
    b.store.insert(id, FeatureVector::from_dense(b.dense.back()));
    b.flagged.push_back(id);
  }
  return b;
}

std::map<UtteranceId, std::string> as_map(const Labeling& l) {
  return {l.labels.begin(), l.labels.end()};
}

TEST(KmLabel, BlobsFollowExhaustivePartition) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  // t = 7 / 3, so A and B are the majority labels; C is a stray annotation.
  seed.pairs = {{1, "A"}, {2, "A"}, {3, "A"}, {7, "B"}, {9, "B"}, {10, "B"}, {11, "C"}};
  const auto out = km_label(b.flagged, b.store, seed, 3);
  ASSERT_TRUE(out.clusters);
  EXPECT_EQ(out.clusters->k, 2u);

  // Oracle: the inertia-minimising split over all 2^12 assignments.
  std::vector<std::size_t> best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << 12); ++mask) {
    double sum[2][2] = {}, n[2] = {};
    for (int i = 0; i < 12; ++i) {
      const int g = (mask >> i) & 1;
      n[g] += 1;
      sum[g][0] += b.dense[i][0];
      sum[g][1] += b.dense[i][1];
    }
    double inertia = 0.0;
    for (int i = 0; i < 12; ++i) {
      const int g = (mask >> i) & 1;
      for (int d = 0; d < 2; ++d) inertia += std::pow(b.dense[i][d] - sum[g][d] / n[g], 2);
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best.assign(12, 0);
      for (int i = 0; i < 12; ++i) best[i] = (mask >> i) & 1;
    }
  }
  const auto labels = as_map(out);
  ASSERT_EQ(labels.size(), 12u);
  EXPECT_EQ(labels.at(11), "C");
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      EXPECT_EQ(best[i] == best[j], labels.at(i) == labels.at(j));
    }
    EXPECT_EQ(labels.at(i), b.gold(i));
  }
}

TEST(KmLabel, SingleSeedLabelCoversEverything) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  seed.pairs = {{3, "A"}, {8, "A"}};
  const auto out = km_label(b.flagged, b.store, seed, 1);
  EXPECT_EQ(out.clusters->k, 1u);
  for (const auto& [id, label] : out.labels) EXPECT_EQ(label, "A");
}

TEST(KmLabel, EmptySeedFails) {
  const auto b = two_blobs();
  EXPECT_THROW(km_label(b.flagged, b.store, AnnotatedSeed{}, 1), Error);
}

TEST(ResolvePlurality, CountsThenProbabilityThenName) {
  using V = std::vector<std::optional<std::string>>;
  const V clear = {"A", "A", "A", "B", "C"};
  EXPECT_EQ(resolve_plurality(clear, {}), "A");
  const V tied = {"A", "A", "B", "B", "C"};
  EXPECT_EQ(resolve_plurality(tied, {{"A", 0.6}, {"B", 0.5}}), "A");
  EXPECT_EQ(resolve_plurality(tied, {{"A", 0.4}, {"B", 0.5}}), "B");
  EXPECT_EQ(resolve_plurality(tied, {{"A", 0.5}, {"B", 0.5}}), "A");
  const V abstain = {std::nullopt, std::nullopt};
  EXPECT_EQ(resolve_plurality(abstain, {}), std::nullopt);
  const V partial = {std::nullopt, "B", std::nullopt, "C", "B"};
  EXPECT_EQ(resolve_plurality(partial, {}), "B");
}

TEST(ResolvePlurality, MatchesRuleOverEnumeratedTuples) {
  const std::vector<std::optional<std::string>> choices = {"A", "B", "C", std::nullopt};
  const std::map<std::string, double> prob = {{"A", 0.2}, {"B", 0.5}, {"C", 0.3}};
  std::vector<std::size_t> idx(5, 0);
  while (true) {
    std::vector<std::optional<std::string>> votes;
    std::map<std::string, std::size_t> count;
    for (auto i : idx) {
      votes.push_back(choices[i]);
      if (choices[i]) ++count[*choices[i]];
    }
    std::optional<std::string> expected;
    std::size_t top = 0;
    for (const auto& [l, c] : count) top = std::max(top, c);
    for (const auto& [l, c] : count) {
      if (c == top && (!expected || prob.at(l) > prob.at(*expected))) expected = l;
    }
    EXPECT_EQ(resolve_plurality(votes, prob), expected);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == choices.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
}

TEST(MvLabel, LabelsBlobsAndKeepsSeed) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  seed.pairs = {{0, "A"}, {1, "A"}, {2, "A"}, {6, "B"}, {7, "B"}, {8, "B"}};
  const auto out = mv_label(b.flagged, b.store, seed, kDefaultEnsemble, TrainingConfig{}, 4);
  const auto labels = as_map(out);
  ASSERT_EQ(labels.size(), 12u);
  for (UtteranceId id = 0; id < 12; ++id) EXPECT_EQ(labels.at(id), b.gold(id)) << id;
  EXPECT_EQ(out.labels,
            mv_label(b.flagged, b.store, seed, kDefaultEnsemble, TrainingConfig{}, 4).labels);
}

TEST(MvLabel, SingleLabelSeedFallsBackWithWarning) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  seed.pairs = {{0, "A"}, {1, "A"}, {6, "A"}, {7, "A"}};
  const auto out = mv_label(b.flagged, b.store, seed, kDefaultEnsemble, TrainingConfig{}, 4);
  ASSERT_EQ(out.labels.size(), 12u);
  for (const auto& [id, label] : out.labels) EXPECT_EQ(label, "A");
  ASSERT_EQ(out.warnings.size(), 1u);
}

TEST(ClLabel, TwiceTheKnownIntents) {
  Rng rng(9);
  FeatureStore store;
  std::vector<UtteranceId> flagged;
  for (UtteranceId id = 0; id < 60; ++id) {
    const double c = 10.0 * static_cast<double>(id % 3);
    store.insert(id, FeatureVector::from_dense(
                         std::vector<double>{c + uniform_unit(rng), uniform_unit(rng)}));
    flagged.push_back(id);
  }
  AnnotatedSeed seed;
  for (UtteranceId id = 0; id < 12; ++id) {
    seed.pairs.emplace_back(id, id % 3 == 2 ? "Y" : "X");
  }
  const auto out = cl_label(flagged, store, seed, 5, 2);
  ASSERT_TRUE(out.clusters);
  EXPECT_EQ(out.clusters->k, 10u);
  const auto labels = as_map(out);
  ASSERT_EQ(labels.size(), 60u);
  for (UtteranceId id = 0; id < 60; ++id) {
    EXPECT_EQ(labels.at(id), id % 3 == 2 ? "Y" : "X") << id;
  }
  // Every cluster resolves to a seed label; clusters sharing one form a group.
  std::set<std::string> groups;
  for (const auto& l : out.clusters->cluster_labels) {
    ASSERT_TRUE(l);
    groups.insert(*l);
  }
  EXPECT_EQ(groups, (std::set<std::string>{"X", "Y"}));
  EXPECT_EQ(out.labels, cl_label(flagged, store, seed, 5, 2).labels);
}

TEST(ClLabel, KCappedByFlaggedCount) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  seed.pairs = {{0, "A"}, {6, "B"}};
  const auto out = cl_label(b.flagged, b.store, seed, 10, 1);
  EXPECT_EQ(out.clusters->k, 12u);
  EXPECT_EQ(out.labels.size(), 12u);
  EXPECT_THROW(cl_label(b.flagged, b.store, seed, 0, 1), Error);
}

TEST(InheritNearestLabels, MatchesBruteForceNearestCentroid) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    ClusterAssignment c;
    c.k = 5;
    for (std::size_t i = 0; i < 5; ++i) {
      c.centroids.push_back({uniform_unit(rng), uniform_unit(rng), uniform_unit(rng)});
      c.cluster_labels.push_back(uniform_unit(rng) < 0.5
                                     ? std::optional<std::string>(std::string(1, 'A' + i))
                                     : std::nullopt);
    }
    if (std::none_of(c.cluster_labels.begin(), c.cluster_labels.end(),
                     [](const auto& l) { return l.has_value(); })) {
      c.cluster_labels[0] = "A";
    }
    const auto before = c.cluster_labels;
    inherit_nearest_labels(c);
    for (std::size_t i = 0; i < 5; ++i) {
      if (before[i]) {
        EXPECT_EQ(c.cluster_labels[i], before[i]);
        continue;
      }
      double best = 1e300;
      std::optional<std::string> expected;
      for (std::size_t j = 0; j < 5; ++j) {
        if (!before[j]) continue;
        double d = 0.0;
        for (int k = 0; k < 3; ++k) d += std::pow(c.centroids[i][k] - c.centroids[j][k], 2);
        if (d < best) {
          best = d;
          expected = before[j];
        }
      }
      EXPECT_EQ(c.cluster_labels[i], expected);
    }
  }
}

TEST(Labeling, SeedLabelsSurviveEveryStrategy) {
  const auto b = two_blobs();
  AnnotatedSeed seed;
  // Deliberately off-blob seed labels: they must be echoed verbatim.
  seed.pairs = {{0, "A"}, {1, "A"}, {2, "B"}, {6, "B"}, {7, "B"}, {8, "A"}};
  const std::vector<Labeling> outs = {
      km_label(b.flagged, b.store, seed, 1),
      mv_label(b.flagged, b.store, seed, kDefaultEnsemble, TrainingConfig{}, 1),
      cl_label(b.flagged, b.store, seed, 2, 1)};
  for (const auto& out : outs) {
    const auto labels = as_map(out);
    EXPECT_EQ(labels.size(), b.flagged.size());
    for (const auto& [id, label] : seed.pairs) EXPECT_EQ(labels.at(id), label);
    // Output order follows the flagged order.
    for (std::size_t i = 0; i < b.flagged.size(); ++i) {
      EXPECT_EQ(out.labels[i].first, b.flagged[i]);
    }
  }
}

TEST(Labeling, StrategyNamesRoundTrip) {
  for (auto s : {LabelingStrategy::kKMeans, LabelingStrategy::kMajorityVote,
                 LabelingStrategy::kClusterThenLabel}) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  }
  EXPECT_THROW(parse_strategy("svm"), ConfigError);
}

}  // namespace
}  // namespace idalc
