#include <gtest/gtest.h>

#include <set>

#include "idalc/alc.hpp"
#include "idalc/error.hpp"
#include "idalc/features.hpp"
#include "idalc/synthetic.hpp"
#include "quorum_enumeration.hpp"
#include "test_util.hpp"

namespace idalc {
namespace {

using testing::FunctionClassifier;
using testing::id_of;
using testing::id_vector;
using testing::member_from;
using testing::pool_with_unlabeled;

FunctionClassifier confidence_model(std::map<UtteranceId, double> top) {
  return FunctionClassifier({"A", "B"}, [top](const FeatureVector& x) {
    const double p = top.at(id_of(x));
    return std::vector<double>{p, 1.0 - p};
  });
}

FeatureStore id_store(const std::vector<UtteranceId>& ids) {
  FeatureStore store;
  for (auto id : ids) store.insert(id, id_vector(id));
  return store;
}

TEST(AlcConfig, Validation) {
  AlcConfig c;
  EXPECT_NO_THROW(c.validate());
  c.cycles = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.cycles = 6;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.threshold_factor = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.quorum = 6;
  EXPECT_THROW(c.validate(), ConfigError);
  c.quorum = std::nullopt;
  EXPECT_NO_THROW(c.validate());
}

TEST(ComputeThreshold, FactorTimesMaximumConfidence) {
  const std::vector<UtteranceId> ids = {1, 2, 3};
  const auto model = confidence_model({{1, 0.6}, {2, 0.96}, {3, 0.7}});
  const auto store = id_store(ids);
  EXPECT_NEAR(compute_threshold(model, ids, store, 0.75), 0.72, 1e-12);
  EXPECT_THROW(compute_threshold(model, {}, store, 0.75), Error);
}

TEST(ComputeThreshold, EqualConfidencesLeaveNothingBelow) {
  const std::vector<UtteranceId> ids = {1, 2, 3};
  const auto model = confidence_model({{1, 0.8}, {2, 0.8}, {3, 0.8}});
  const auto store = id_store(ids);
  EXPECT_NEAR(compute_threshold(model, ids, store, 0.75), 0.6, 1e-12);
  const auto pool = pool_with_unlabeled({{1, "A"}, {2, "A"}, {3, "B"}});
  AnnotationLedger ledger(pool.unlabeled().size());
  const auto out = correct_cycle(model, ids, store, {}, AlcConfig{}, pool, ledger);
  EXPECT_EQ(out.below_threshold(), 0u);
  EXPECT_EQ(ledger.total_calls(), 0u);
}

TEST(TallyVotes, QuorumRule) {
  using V = std::vector<std::optional<std::string>>;
  const auto met = tally_votes(1, V{"A", "A", "A", "B", std::nullopt}, 3);
  EXPECT_EQ(met.winner, "A");
  EXPECT_EQ(met.winner_votes, 3u);
  const auto unmet = tally_votes(1, V{"A", "A", "B", "B", std::nullopt}, 3);
  EXPECT_FALSE(unmet.winner);
  EXPECT_EQ(unmet.winner_votes, 2u);
  EXPECT_FALSE(tally_votes(1, V{"A", "A", "A", "A", "A"}, std::nullopt).winner);
  EXPECT_EQ(tally_votes(1, V{"B", "A"}, 1).winner, "A");
}

// Member m votes `votes[m]` for every sample.
std::vector<EnsembleMember> fixed_votes(const std::vector<std::optional<std::string>>& votes) {
  std::vector<EnsembleMember> out;
  for (const auto& v : votes) {
    if (!v) {
      out.push_back(member_from(nullptr));
      continue;
    }
    const std::size_t at = static_cast<std::size_t>((*v)[0] - 'A');
    out.push_back(member_from(std::make_shared<FunctionClassifier>(
        std::vector<std::string>{"A", "B", "C"},
        [at](const FeatureVector&) { return testing::one_hot(3, at); })));
  }
  return out;
}

TEST(CorrectCycle, QuorumMetAutoCorrects) {
  const std::vector<UtteranceId> ids = {1, 2};
  const auto model = confidence_model({{1, 0.95}, {2, 0.5}});
  const auto store = id_store(ids);
  const auto pool = pool_with_unlabeled({{1, "A"}, {2, "B"}});
  AnnotationLedger ledger(pool.unlabeled().size());
  const auto ensemble = fixed_votes({"A", "A", "A", "B", std::nullopt});
  const auto out = correct_cycle(model, ids, store, ensemble, AlcConfig{}, pool, ledger);
  ASSERT_EQ(out.auto_corrected.size(), 1u);
  EXPECT_EQ(out.auto_corrected[0], (std::pair<UtteranceId, std::string>{2, "A"}));
  EXPECT_TRUE(out.rejected.empty());
  EXPECT_EQ(ledger.total_calls(), 0u);
  ASSERT_EQ(out.votes.size(), 1u);
  EXPECT_EQ(out.votes[0].votes.size(), 5u);
}

TEST(CorrectCycle, QuorumUnmetCallsOracleOnce) {
  const std::vector<UtteranceId> ids = {1, 2};
  const auto model = confidence_model({{1, 0.95}, {2, 0.5}});
  const auto store = id_store(ids);
  const auto pool = pool_with_unlabeled({{1, "A"}, {2, "B"}});
  AnnotationLedger ledger(pool.unlabeled().size());
  const auto ensemble = fixed_votes({"A", "A", "B", "B", std::nullopt});
  const auto out = correct_cycle(model, ids, store, ensemble, AlcConfig{}, pool, ledger);
  EXPECT_TRUE(out.auto_corrected.empty());
  EXPECT_EQ(out.rejected, (std::vector<UtteranceId>{2}));
  EXPECT_EQ(out.annotated, (std::vector<std::pair<UtteranceId, std::string>>{{2, "B"}}));
  EXPECT_EQ(ledger.alc_phase_calls(), 1u);
  EXPECT_EQ(ledger.id_phase_calls(), 0u);
}

TEST(CorrectCycle, QuorumDecisionsMatchEnumeration) {
  for (std::size_t q : {3u, 4u, 5u}) {
    const auto check = testing::enumerate_quorum(q);
    EXPECT_EQ(check.cases, 3125u);
    EXPECT_EQ(check.mismatches, 0u) << "quorum " << q;
    EXPECT_EQ(check.auto_corrected + check.rejected, 3125u);
    EXPECT_EQ(check.ledger_calls, check.rejected);
  }
  const auto none = testing::enumerate_quorum(std::nullopt);
  EXPECT_EQ(none.mismatches, 0u);
  EXPECT_EQ(none.rejected, 3125u);
}

// A small featurized pool: three known intents, everything else unlabeled.
struct SmallPool {
  DataPool pool;
  FeatureStore store;
  std::vector<FeatureVector> test;
  std::vector<std::string> test_gold;
};

SmallPool small_pool(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.intents = 3;
  spec.per_intent = 70;
  spec.confusion_rate = 0.2;
  spec.seed = seed;
  const auto corpus = make_synthetic_corpus(spec);
  SplitSpec split;
  split.known_intents = synthetic_intent_names(3);
  split.labeled_count = 30;
  split.test_count = 30;
  split.seed = seed;
  SmallPool out{make_split(corpus, split), {}, {}, {}};
  std::vector<std::string> texts;
  for (const auto& r : out.pool.labeled()) texts.push_back(r.text);
  for (const auto& u : out.pool.unlabeled()) texts.push_back(u.text);
  const auto vocab = fit_vocabulary(texts, FeaturizerConfig{});
  for (const auto& r : out.pool.labeled()) out.store.insert(r.id, featurize(r.text, vocab));
  for (const auto& u : out.pool.unlabeled()) out.store.insert(u.id, featurize(u.text, vocab));
  for (const auto& u : out.pool.test()) out.test.push_back(featurize(u.text, vocab));
  out.test_gold = EvaluationGold(out.pool).test_labels();
  return out;
}

struct AlcRun {
  WorkingSet working;
  AlcResult result;
  std::size_t alc_calls = 0;
  std::size_t evaluations = 0;
};

AlcRun run_small(const SmallPool& p, const AlcConfig& config) {
  AlcRun run;
  for (const auto& r : p.pool.labeled()) run.working.add_labeled(r.id, r.label);
  for (const auto& u : p.pool.unlabeled()) run.working.remainder.push_back(u.id);
  const auto x = p.store.gather(run.working.labeled_ids);
  auto model = train_base(x, run.working.labeled_labels, TrainingConfig{});
  AnnotationLedger ledger(p.pool.unlabeled().size());
  run.result = run_alc(p.pool, p.store, run.working, std::move(model), config, TrainingConfig{},
                       kDefaultEnsemble, 11, ledger,
                       [&](const ModelHandle& m, std::size_t) {
                         ++run.evaluations;
                         return evaluate(m, p.test, p.test_gold);
                       });
  run.alc_calls = ledger.alc_phase_calls();
  return run;
}

TEST(RunAlc, ConservesSamplesAndChargesEveryRejection) {
  const auto p = small_pool(3);
  AlcConfig config;
  config.cycles = 3;
  const auto run = run_small(p, config);
  ASSERT_FALSE(run.result.cycles.empty());
  EXPECT_EQ(run.evaluations, run.result.cycles.size());

  std::size_t rejected = 0;
  for (const auto& c : run.result.cycles) {
    const auto moved = c.outcome.auto_corrected.size() + c.outcome.rejected.size();
    EXPECT_EQ(c.labeled_after - c.labeled_before, moved);
    EXPECT_EQ(c.remainder_before - c.remainder_after, moved);
    rejected += c.outcome.rejected.size();
  }
  EXPECT_EQ(run.alc_calls, rejected);

  std::multiset<UtteranceId> ids(run.working.labeled_ids.begin(), run.working.labeled_ids.end());
  ids.insert(run.working.remainder.begin(), run.working.remainder.end());
  std::multiset<UtteranceId> expected;
  for (const auto& r : p.pool.labeled()) expected.insert(r.id);
  for (const auto& u : p.pool.unlabeled()) expected.insert(u.id);
  EXPECT_EQ(ids, expected);
}

TEST(RunAlc, NoVotingSendsEverythingToOracle) {
  const auto p = small_pool(4);
  AlcConfig config;
  config.quorum = std::nullopt;
  const auto run = run_small(p, config);
  for (const auto& c : run.result.cycles) {
    EXPECT_TRUE(c.outcome.auto_corrected.empty());
    EXPECT_EQ(c.outcome.rejected.size(), c.outcome.below_threshold());
  }
}

TEST(RunAlc, StopsWhenNothingFallsBelowThreshold) {
  const auto p = small_pool(5);
  AlcRun run;
  for (const auto& r : p.pool.labeled()) run.working.add_labeled(r.id, r.label);
  // A single remainder sample is its own maximum, so it is never below.
  run.working.remainder = {p.pool.unlabeled().front().id};
  const auto x = p.store.gather(run.working.labeled_ids);
  auto model = train_base(x, run.working.labeled_labels, TrainingConfig{});
  AnnotationLedger ledger(p.pool.unlabeled().size());
  std::size_t evaluations = 0;
  const auto result = run_alc(p.pool, p.store, run.working, model, AlcConfig{}, TrainingConfig{},
                              kDefaultEnsemble, 1, ledger,
                              [&](const ModelHandle& m, std::size_t) {
                                ++evaluations;
                                return evaluate(m, p.test, p.test_gold);
                              });
  ASSERT_EQ(result.cycles.size(), 1u);
  EXPECT_TRUE(result.cycles[0].early_stop);
  EXPECT_EQ(result.cycles[0].labeled_after, result.cycles[0].labeled_before);
  EXPECT_EQ(evaluations, 1u);
  EXPECT_EQ(ledger.total_calls(), 0u);
  EXPECT_EQ(result.model.weights(), model.weights());
}

TEST(RunAlc, DeterministicUnderSeed) {
  const auto p = small_pool(6);
  const auto a = run_small(p, AlcConfig{});
  const auto b = run_small(p, AlcConfig{});
  EXPECT_EQ(a.working.labeled_ids, b.working.labeled_ids);
  EXPECT_EQ(a.working.labeled_labels, b.working.labeled_labels);
  EXPECT_EQ(a.result.model.weights(), b.result.model.weights());
}

}  // namespace
}  // namespace idalc
