#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "idalc/error.hpp"
#include "idalc/models/cross_validation.hpp"
#include "idalc/models/ensemble.hpp"
#include "idalc/models/knn.hpp"
#include "idalc/models/lda.hpp"
#include "idalc/models/softmax.hpp"
#include "idalc/models/tree.hpp"
#include "idalc/random.hpp"
#include "test_util.hpp"

namespace idalc {
namespace {

struct Dataset {
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
};

// Classes own disjoint blocks of `width` features; rows are unit norm.
Dataset separable(std::size_t classes, std::size_t per_class, std::uint64_t seed,
                  std::size_t width = 5) {
  Rng rng(seed);
  Dataset d;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<std::pair<std::uint32_t, double>> pairs;
      for (std::size_t f = 0; f < width; ++f) {
        if (uniform_unit(rng) < 0.6 || f == i % width) {
          pairs.emplace_back(static_cast<std::uint32_t>(c * width + f), 0.2 + uniform_unit(rng));
        }
      }
      auto v = FeatureVector::from_pairs(std::move(pairs));
      const double n = norm(v);
      for (auto& value : v.values) value /= n;
      d.x.push_back(std::move(v));
      d.y.push_back(std::string(1, static_cast<char>('A' + c)));
    }
  }
  return d;
}

double training_accuracy(const Classifier& model, const Dataset& d) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) hits += model.predict(d.x[i]) == d.y[i];
  return static_cast<double>(hits) / static_cast<double>(d.x.size());
}

void expect_simplex(const std::vector<double>& p) {
  double sum = 0.0;
  for (double v : p) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(SoftmaxObjective, GradientMatchesCentralDifferences) {
  const auto d = separable(3, 4, 5, 3);
  std::vector<FeatureVector> x(d.x.begin(), d.x.begin() + 10);
  std::vector<std::size_t> codes;
  for (std::size_t i = 0; i < 10; ++i) codes.push_back(static_cast<std::size_t>(d.y[i][0] - 'A'));
  const std::size_t classes = 3, dim = feature_dimension(x);
  SoftmaxObjective objective(x, codes, classes, dim, 1e-2);
  Rng rng(1);
  std::vector<double> params(objective.parameter_count());
  for (auto& p : params) p = 2.0 * uniform_unit(rng) - 1.0;
  std::vector<double> analytic(params.size());
  objective.loss_and_gradient(params, analytic);

  const double h = 1e-5;
  double diff_sq = 0.0, scale_sq = 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    auto plus = params, minus = params;
    plus[j] += h;
    minus[j] -= h;
    const double numeric = (objective.loss(plus) - objective.loss(minus)) / (2 * h);
    EXPECT_LE(std::abs(numeric - analytic[j]),
              1e-4 * std::max({std::abs(numeric), std::abs(analytic[j]), 1e-3}))
        << "parameter " << j;
    diff_sq += (numeric - analytic[j]) * (numeric - analytic[j]);
    scale_sq += analytic[j] * analytic[j];
  }
  EXPECT_LE(std::sqrt(diff_sq / scale_sq), 1e-4);
}

TEST(TrainBase, LossNeverIncreases) {
  const auto d = separable(4, 30, 2);
  const auto model = train_base(d.x, d.y, TrainingConfig{});
  const auto& h = model.training_meta().loss_history;
  ASSERT_EQ(h.size(), 300u);
  for (std::size_t e = 1; e < h.size(); ++e) EXPECT_LE(h[e], h[e - 1] + 1e-6) << e;
  EXPECT_LE(model.training_meta().final_loss, h.back() + 1e-6);
  EXPECT_LT(model.training_meta().final_loss, h.front());
}

TEST(TrainBase, SeparableClustersFitPerfectly) {
  const auto d = separable(2, 50, 3);
  const auto model = train_base(d.x, d.y, TrainingConfig{});
  EXPECT_EQ(training_accuracy(model, d), 1.0);
  EXPECT_EQ(model.labels(), (std::vector<std::string>{"A", "B"}));
}

TEST(TrainBase, IdenticalFeaturesGiveEvenOdds) {
  std::vector<FeatureVector> x(100, FeatureVector{{0, 1}, {0.6, 0.8}});
  std::vector<std::string> y;
  for (int i = 0; i < 100; ++i) y.push_back(i % 2 ? "B" : "A");
  const auto model = train_base(x, y, TrainingConfig{});
  const auto p = model.predict_proba(x[0]);
  EXPECT_NEAR(p[0], 0.5, 1e-9);
  EXPECT_NEAR(p[1], 0.5, 1e-9);
}

TEST(TrainBase, SingleLabelFails) {
  std::vector<FeatureVector> x(3, FeatureVector{{0}, {1.0}});
  std::vector<std::string> y(3, "A");
  EXPECT_THROW(train_base(x, y, TrainingConfig{}), Error);
}

TEST(TrainBase, Deterministic) {
  const auto d = separable(3, 20, 4);
  const auto a = train_base(d.x, d.y, TrainingConfig{});
  const auto b = train_base(d.x, d.y, TrainingConfig{});
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
}

TEST(ModelHandle, HandSetWeightsMatchClosedForm) {
  // Two classes over two features: z = W x + b.
  const ModelHandle model({"A", "B"}, 2, {1.0, -2.0, 0.5, 3.0}, {0.1, -0.4});
  const FeatureVector x{{0, 1}, {0.6, 0.8}};
  const double za = 0.1 + 1.0 * 0.6 - 2.0 * 0.8;
  const double zb = -0.4 + 0.5 * 0.6 + 3.0 * 0.8;
  const double pa = 1.0 / (1.0 + std::exp(zb - za));
  const auto p = model.predict_proba(x);
  EXPECT_NEAR(p[0], pa, 1e-12);
  EXPECT_NEAR(p[1], 1.0 - pa, 1e-12);
  EXPECT_EQ(model.predict(x), "B");
}

TEST(ModelHandle, ZeroVectorGivesSoftmaxOfBias) {
  const ModelHandle model({"A", "B", "C"}, 2, std::vector<double>(6, 0.7), {1.0, 2.0, 3.0});
  const auto p = model.predict_proba(FeatureVector{});
  const double s = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  EXPECT_NEAR(p[0], std::exp(1.0) / s, 1e-12);
  EXPECT_NEAR(p[2], std::exp(3.0) / s, 1e-12);
}

TEST(ModelHandle, ExtremeLogitsStaySimplex) {
  const ModelHandle model({"A", "B"}, 1, {1e4, -1e4}, {0.0, 0.0});
  expect_simplex(model.predict_proba(FeatureVector{{0}, {1.0}}));
  expect_simplex(model.predict_proba(FeatureVector{{0}, {-1.0}}));
}

TEST(BinaryLogistic, SeparatesOneVsRest) {
  const auto d = separable(3, 30, 8);
  std::vector<std::uint8_t> t;
  for (const auto& y : d.y) t.push_back(y == "B");
  TrainingMeta meta;
  const auto scorer = train_binary_logistic(d.x, t, TrainingConfig{}, &meta);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    EXPECT_EQ(scorer.score(d.x[i]) > 0.5, t[i] == 1) << i;
  }
  for (std::size_t e = 1; e < meta.loss_history.size(); ++e) {
    EXPECT_LE(meta.loss_history[e], meta.loss_history[e - 1] + 1e-6);
  }
}

TEST(Ensemble, SeparableToyDataFitPerfectly) {
  const auto d = separable(3, 40, 9);
  const auto members = train_ensemble(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 1);
  ASSERT_EQ(members.size(), 5u);
  for (const auto& m : members) {
    ASSERT_TRUE(m.usable()) << member_kind_name(m.kind) << ": " << m.unusable_reason;
    EXPECT_EQ(training_accuracy(*m.model, d), 1.0) << member_kind_name(m.kind);
  }
}

TEST(Ensemble, ProbabilitiesAreSimplex) {
  const auto d = separable(4, 25, 10);
  const auto probe = separable(4, 10, 99);
  const auto members = train_ensemble(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 2);
  for (const auto& m : members) {
    ASSERT_TRUE(m.usable());
    for (const auto& x : probe.x) expect_simplex(m.model->predict_proba(x));
    expect_simplex(m.model->predict_proba(FeatureVector{}));
  }
}

TEST(Ensemble, DeterministicUnderSeed) {
  const auto d = separable(3, 30, 11);
  const auto probe = separable(3, 10, 12);
  const auto a = train_ensemble(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 5);
  const auto b = train_ensemble(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 5);
  for (std::size_t m = 0; m < a.size(); ++m) {
    EXPECT_EQ(a[m].seed, b[m].seed);
    for (const auto& x : probe.x) {
      EXPECT_EQ(a[m].model->predict_proba(x), b[m].model->predict_proba(x))
          << member_kind_name(a[m].kind);
    }
  }
}

TEST(Ensemble, MemberThatCannotFitAbstains) {
  auto d = separable(2, 10, 13);
  d.x.push_back(FeatureVector{{20}, {1.0}});
  d.y.push_back("Z");  // one sample: the discriminant cannot estimate it
  const auto members = train_ensemble(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 3);
  for (const auto& m : members) {
    if (m.kind == MemberKind::kLinearDiscriminant) {
      EXPECT_FALSE(m.usable());
      EXPECT_FALSE(m.vote(d.x[0]).has_value());
      EXPECT_FALSE(m.unusable_reason.empty());
    } else {
      EXPECT_TRUE(m.usable()) << member_kind_name(m.kind);
    }
  }
}

TEST(Ensemble, KindNamesRoundTrip) {
  for (auto kind : kDefaultEnsemble) {
    EXPECT_EQ(parse_member_kind(member_kind_name(kind)), kind);
  }
  EXPECT_THROW(parse_member_kind("SVM"), Error);
}

TEST(KNearestNeighbors, FiveIdenticalNeighbours) {
  std::vector<FeatureVector> x;
  std::vector<std::string> y;
  for (int i = 0; i < 5; ++i) {
    x.push_back(FeatureVector{{0}, {1.0}});
    y.push_back("A");
  }
  for (int i = 0; i < 5; ++i) {
    x.push_back(FeatureVector{{1}, {1.0}});
    y.push_back("B");
  }
  const auto knn = KNearestNeighbors::fit(x, y, 5);
  EXPECT_EQ(knn->predict(x[0]), "A");
  EXPECT_EQ(knn->predict_proba(x[0]), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(knn->predict(x[7]), "B");
}

TEST(CosineNeighborIndex, MatchesBruteForce) {
  const auto d = separable(3, 15, 21);
  const CosineNeighborIndex index(d.x);
  const auto probe = separable(3, 5, 22);
  for (const auto& q : probe.x) {
    std::vector<Neighbor> brute;
    for (std::size_t r = 0; r < d.x.size(); ++r) {
      const double cos = dot(q, d.x[r]) / (norm(q) * norm(d.x[r]));
      brute.push_back({r, 1.0 - cos});
    }
    std::stable_sort(brute.begin(), brute.end(),
                     [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; });
    const auto fast = index.nearest(q, 7);
    ASSERT_EQ(fast.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(fast[i].distance, brute[i].distance, 1e-12);
    }
  }
}

TEST(LinearDiscriminant, SixPointBisector) {
  const double h = std::sqrt(3.0) / 2.0;
  const std::vector<std::vector<double>> dev = {{1.0, 0.0}, {-0.5, h}, {-0.5, -h}};
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (const auto& v : dev) {
    rows.push_back({-2.0 + v[0], v[1]});
    labels.push_back("A");
  }
  for (const auto& v : dev) {
    rows.push_back({2.0 + v[0], v[1]});
    labels.push_back("B");
  }
  const auto lda = LinearDiscriminant::fit(rows, labels, kLdaShrinkage);
  // Pooled covariance 0.75 I (isotropic, so shrinkage leaves it unchanged):
  // score_B - score_A = (mu_B - mu_A)^T S^-1 x = (16/3) x_1.
  for (const auto& x : std::vector<std::vector<double>>{{0.0, 0.0}, {0.3, 5.0}, {-1.5, -2.0}}) {
    const auto s = lda.decision_function(x);
    EXPECT_NEAR(s[1] - s[0], 16.0 / 3.0 * x[0], 1e-9);
  }
  const auto p = lda.predict_proba(std::vector<double>{0.0, 7.0});
  EXPECT_NEAR(p[0], 0.5, 1e-12);
}

TEST(LinearDiscriminant, SingletonClassIsUnfittable) {
  const std::vector<std::vector<double>> rows = {{0, 0}, {1, 0}, {5, 5}};
  const std::vector<std::string> labels = {"A", "A", "B"};
  EXPECT_THROW(LinearDiscriminant::fit(rows, labels, kLdaShrinkage), UnfittableError);
}

TEST(RandomProjection, ConsistentAndLinear) {
  const RandomProjection p(64, 3);
  const FeatureVector a{{1, 900}, {0.5, 2.0}};
  const FeatureVector b{{1}, {0.5}};
  const FeatureVector c{{900}, {2.0}};
  const auto pa = p.apply(a), pb = p.apply(b), pc = p.apply(c);
  ASSERT_EQ(pa.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(pa[i], pb[i] + pc[i], 1e-12);
  EXPECT_EQ(p.apply(a), pa);
}

TEST(DecisionTree, LearnsThresholdOnNegativeAndPositiveValues) {
  std::vector<FeatureVector> x;
  std::vector<std::size_t> codes;
  for (int i = -5; i <= 5; ++i) {
    if (i == 0) continue;
    x.push_back(FeatureVector{{0}, {static_cast<double>(i)}});
    codes.push_back(i > 0 ? 1 : 0);
  }
  std::vector<double> w(x.size(), 1.0);
  DecisionTree tree;
  Rng rng(1);
  tree.fit(x, codes, w, 2, TreeParams{}, rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(tree.distribution(x[i])[codes[i]], 1.0);
  }
  EXPECT_EQ(tree.depth(), 1u);
}

TEST(CrossValidation, FoldsPartitionSamples) {
  for (std::size_t n : {10u, 11u, 37u}) {
    const auto folds = assign_folds(n, 5, 3);
    ASSERT_EQ(folds.size(), n);
    std::vector<std::size_t> sizes(5, 0);
    for (auto f : folds) {
      ASSERT_LT(f, 5u);
      ++sizes[f];
    }
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    EXPECT_LE(*hi - *lo, 1u);
  }
}

TEST(CrossValidation, ConstantClassifierScoresHalf) {
  const auto d = separable(2, 50, 14);
  std::vector<NamedFactory> factories = {
      {"constant", [](std::span<const FeatureVector>, std::span<const std::string>, std::uint64_t) {
         return std::make_unique<testing::FunctionClassifier>(
             std::vector<std::string>{"A", "B"},
             [](const FeatureVector&) { return std::vector<double>{1.0, 0.0}; });
       }}};
  const auto report = cross_validate(d.x, d.y, factories, 5, 1);
  EXPECT_NEAR(report.mean_accuracy[0], 0.5, 0.05);
  EXPECT_EQ(report.fold_of.size(), d.x.size());
}

TEST(CrossValidation, PerfectClassifierOnCopiedData) {
  const auto base = separable(2, 6, 15);
  Dataset d;
  for (int copy = 0; copy < 5; ++copy) {
    d.x.insert(d.x.end(), base.x.begin(), base.x.end());
    d.y.insert(d.y.end(), base.y.begin(), base.y.end());
  }
  std::vector<NamedFactory> factories = {
      {"lookup",
       [](std::span<const FeatureVector> x, std::span<const std::string> y, std::uint64_t) {
         return KNearestNeighbors::fit(x, y, 1);
       }}};
  const auto report = cross_validate(d.x, d.y, factories, 5, 2);
  EXPECT_EQ(report.mean_accuracy[0], 1.0);
}

TEST(CrossValidation, ScoresEnsembleKinds) {
  const auto d = separable(3, 20, 16);
  const auto report = cross_validate(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 5, 4);
  ASSERT_EQ(report.names.size(), 5u);
  for (double acc : report.mean_accuracy) EXPECT_GT(acc, 0.9);
}

TEST(CrossValidation, TooManyFoldsFails) {
  const auto d = separable(2, 2, 17);
  EXPECT_THROW(cross_validate(d.x, d.y, kDefaultEnsemble, TrainingConfig{}, 5, 1), Error);
}

}  // namespace
}  // namespace idalc
