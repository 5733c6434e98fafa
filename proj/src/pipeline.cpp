#include "idalc/pipeline.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "idalc/alc.hpp"
#include "idalc/error.hpp"
#include "idalc/feature_store.hpp"
#include "idalc/features.hpp"
#include "idalc/labeling.hpp"
#include "idalc/random.hpp"
#include "idalc/synthetic.hpp"

namespace idalc {
namespace {

constexpr std::uint64_t kSeedSampleStream = 1;
constexpr std::uint64_t kLabelingStream = 2;
constexpr std::uint64_t kAlcStream = 3;
constexpr std::uint64_t kCarveOutStream = 4;

template <typename Fn>
auto in_phase(const std::string& phase, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PhaseError&) {
    throw;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw PhaseError(phase, e.what());
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

SplitSummary summarize(const DataPool& pool, const EvaluationGold& gold) {
  SplitSummary s;
  s.known = pool.known_intents();
  s.novel = pool.novel_intents();
  s.labeled = pool.labeled().size();
  s.unlabeled = pool.unlabeled().size();
  s.test = pool.test().size();
  for (const auto& u : pool.unlabeled()) s.unlabeled_novel += gold.is_novel(u.id);
  for (const auto& u : pool.test()) s.test_novel += gold.is_novel(u.id);
  return s;
}

// Fits the vocabulary on labeled + unlabeled text and featurizes every split.
void featurize_pool(const DataPool& pool, const FeaturizerConfig& config, FeatureStore& store,
                    std::vector<FeatureVector>& test_features) {
  std::vector<std::string> texts;
  for (const auto& r : pool.labeled()) texts.push_back(r.text);
  for (const auto& u : pool.unlabeled()) texts.push_back(u.text);
  const auto vocab = fit_vocabulary(texts, config);
  for (const auto& r : pool.labeled()) store.insert(r.id, featurize(r.text, vocab));
  for (const auto& u : pool.unlabeled()) store.insert(u.id, featurize(u.text, vocab));
  for (const auto& u : pool.test()) test_features.push_back(featurize(u.text, vocab));
}

}  // namespace

double CorrectionSummary::auto_correct_fraction() const {
  return ratio(auto_corrected, below_threshold);
}

double CorrectionSummary::auto_correct_accuracy() const {
  return ratio(auto_correct_hits, auto_corrected);
}

const Metrics* RunReport::phase(const std::string& tag) const {
  for (const auto& m : phases) {
    if (m.phase == tag) return &m;
  }
  return nullptr;
}

Corpus load_dataset(const DatasetConfig& config) {
  if (config.format == "synthetic") return make_synthetic_corpus(config.synthetic);
  return load_corpus(config.path, parse_dataset_format(config.format));
}

SplitSpec resolve_split(const Corpus& corpus, const SplitSpec& spec) {
  SplitSpec out = spec;
  if (out.novel_intents.empty()) {
    const std::set<std::string> known(spec.known_intents.begin(), spec.known_intents.end());
    for (const auto& intent : corpus.label_inventory()) {
      if (!known.contains(intent)) out.novel_intents.push_back(intent);
    }
  }
  return out;
}

RunReport run_idalc(const RunConfig& config) {
  const auto corpus = in_phase("load", [&] { return load_dataset(config.dataset); });
  return run_idalc(corpus, config);
}

RunReport run_idalc(const Corpus& corpus, const RunConfig& config) {
  config.validate();
  RunReport report;
  report.dataset = config.dataset.name;
  report.config = config_entries(config);
  report.configured_cycles = config.alc.cycles;
  report.quorum = config.alc.quorum;

  const DataPool pool = in_phase("split", [&] {
    return make_split(corpus, resolve_split(corpus, config.split));
  });
  const EvaluationGold gold(pool);
  report.split = summarize(pool, gold);

  FeatureStore store;
  std::vector<FeatureVector> test_features;
  in_phase("features", [&] { featurize_pool(pool, config.features, store, test_features); });
  const auto test_gold = gold.test_labels();
  auto evaluate_phase = [&](const ModelHandle& model, const std::string& tag,
                            std::size_t cycle) {
    auto m = evaluate(model, test_features, test_gold);
    m.phase = tag;
    m.cycle = cycle;
    spdlog::info("{}: accuracy {:.4f}, macro-F1 {:.4f}", tag, m.accuracy, m.macro_f1);
    return m;
  };

  WorkingSet working;
  for (const auto& r : pool.labeled()) working.add_labeled(r.id, r.label);

  // Cycle 0.
  auto model = in_phase("ID(0)", [&] {
    const auto x = store.gather(working.labeled_ids);
    return train_base(x, working.labeled_labels, config.training);
  });
  report.phases.push_back(evaluate_phase(model, "ID(0)", 0));

  std::vector<UtteranceId> unlabeled_ids;
  for (const auto& u : pool.unlabeled()) unlabeled_ids.push_back(u.id);
  const auto partition = in_phase("detect", [&] {
    switch (config.detector.kind) {
      case DetectorKind::kMsp:
        return msp_detect(model, unlabeled_ids, store, config.detector.msp_threshold);
      case DetectorKind::kDoc: {
        const auto x = store.gather(working.labeled_ids);
        const auto doc =
            doc_fit(x, working.labeled_labels, config.training, config.detector.doc_alpha);
        return doc_detect(doc, unlabeled_ids, store);
      }
      case DetectorKind::kLof: {
        const auto x = store.gather(working.labeled_ids);
        return lof_detect(x, unlabeled_ids, store, config.detector.lof_k,
                          config.detector.lof_contamination);
      }
    }
    throw Error("unhandled detector");
  });
  report.ood.detector = detector_name(config.detector.kind);
  report.ood.flagged = partition.flagged.size();
  report.ood.remainder = partition.remainder.size();
  report.ood.evaluation =
      evaluate_ood(partition, [&](UtteranceId id) { return gold.is_novel(id); });
  spdlog::info("detect: {} flagged, {} remainder", partition.flagged.size(),
               partition.remainder.size());

  AnnotationLedger ledger(pool.unlabeled().size());
  auto& lab = report.labeling;
  lab.strategy = strategy_name(config.labeling.strategy);
  lab.flagged = partition.flagged.size();
  if (!partition.flagged.empty()) {
    AnnotatedSeed seed;
    in_phase("annotate", [&] {
      const auto ids = sample_seed(partition.flagged, config.labeling.m,
                                   mix_seed(config.seed, kSeedSampleStream));
      seed.pairs = oracle_annotate(pool, ids, AnnotationPhase::kIntentDetection, ledger);
    });
    lab.seed_size = seed.pairs.size();
    lab.discovered_labels = seed.discovered_labels().size();
    const auto labeling = in_phase("label", [&] {
      const auto rng_seed = mix_seed(config.seed, kLabelingStream);
      switch (config.labeling.strategy) {
        case LabelingStrategy::kKMeans:
          return km_label(partition.flagged, store, seed, rng_seed, config.labeling.kmeans);
        case LabelingStrategy::kMajorityVote:
          return mv_label(partition.flagged, store, seed, kDefaultEnsemble, config.training,
                          rng_seed);
        case LabelingStrategy::kClusterThenLabel:
          return cl_label(partition.flagged, store, seed, pool.known_intents().size(), rng_seed,
                          config.labeling.kmeans);
      }
      throw Error("unhandled labeling strategy");
    });
    std::size_t hits = 0;
    for (const auto& [id, label] : labeling.labels) {
      hits += gold.label_matches(id, label);
      working.add_labeled(id, label);
    }
    lab.accuracy = ratio(hits, labeling.labels.size());
    lab.clusters = labeling.clusters ? labeling.clusters->k : 0;
    lab.warnings = labeling.warnings;
  } else {
    lab.warnings.push_back("detector flagged no samples; nothing to label");
    spdlog::warn("detector flagged no samples");
  }
  working.remainder = partition.remainder;

  // Cycle 1.
  model = in_phase("ID(1)", [&] {
    const auto x = store.gather(working.labeled_ids);
    return train_base(x, working.labeled_labels, config.training);
  });
  report.phases.push_back(evaluate_phase(model, "ID(1)", 1));

  const auto alc = in_phase("ALC", [&] {
    return run_alc(pool, store, working, model, config.alc, config.training, kDefaultEnsemble,
                   mix_seed(config.seed, kAlcStream), ledger,
                   [&](const ModelHandle& m, std::size_t cycle) {
                     return evaluate_phase(m, fmt::format("ALC({})", cycle), cycle + 1);
                   });
  });
  for (const auto& cycle : alc.cycles) {
    report.phases.push_back(cycle.metrics);
    CorrectionSummary c;
    c.cycle = cycle.cycle;
    c.threshold = cycle.outcome.threshold_used;
    c.below_threshold = cycle.outcome.below_threshold();
    c.auto_corrected = cycle.outcome.auto_corrected.size();
    c.rejected = cycle.outcome.rejected.size();
    for (const auto& [id, label] : cycle.outcome.auto_corrected) {
      c.auto_correct_hits += gold.label_matches(id, label);
    }
    c.early_stop = cycle.early_stop;
    report.corrections.push_back(c);
  }

  report.ledger.id_calls = ledger.id_phase_calls();
  report.ledger.alc_calls = ledger.alc_phase_calls();
  report.ledger.unlabeled_size = ledger.unlabeled_size();
  return report;
}

SplitSummary inspect_split(const Corpus& corpus, const RunConfig& config) {
  const DataPool pool = in_phase("split", [&] {
    return make_split(corpus, resolve_split(corpus, config.split));
  });
  return summarize(pool, EvaluationGold(pool));
}

MspSelection select_msp_threshold(const Corpus& corpus, const RunConfig& config) {
  config.validate();
  const DataPool pool = in_phase("split", [&] {
    return make_split(corpus, resolve_split(corpus, config.split));
  });
  const EvaluationGold gold(pool);
  FeatureStore store;
  std::vector<FeatureVector> test_features;
  in_phase("features", [&] { featurize_pool(pool, config.features, store, test_features); });
  const auto model = in_phase("ID(0)", [&] {
    std::vector<std::string> labels;
    std::vector<UtteranceId> ids;
    for (const auto& r : pool.labeled()) {
      ids.push_back(r.id);
      labels.push_back(r.label);
    }
    return train_base(store.gather(ids), labels, config.training);
  });

  Rng rng(mix_seed(config.seed, kCarveOutStream));
  const auto n = pool.unlabeled().size();
  const auto count = std::max<std::size_t>(1, n / 5);
  std::vector<UtteranceId> carve;
  for (auto i : sample_without_replacement(n, std::min(count, n), rng)) {
    carve.push_back(pool.unlabeled()[i].id);
  }
  std::sort(carve.begin(), carve.end());

  MspSelection out;
  out.carve_out = carve.size();
  double best_f1 = -1.0;
  for (int step = 1; step <= 9; ++step) {
    const double t = step / 10.0;
    const auto partition = msp_detect(model, carve, store, t);
    const auto eval = evaluate_ood(partition, [&](UtteranceId id) { return gold.is_novel(id); });
    out.thresholds.push_back(t);
    out.macro_f1.push_back(eval.macro_f1);
    if (eval.macro_f1 > best_f1) {
      best_f1 = eval.macro_f1;
      out.best = t;
    }
  }
  return out;
}

RunConfig synthetic_benchmark_config(std::uint64_t seed) {
  RunConfig c;
  c.dataset.name = "synthetic";
  c.dataset.format = "synthetic";
  c.dataset.synthetic.intents = 7;
  c.dataset.synthetic.per_intent = 1150;
  c.dataset.synthetic.seed = mix_seed(seed, 0x7379);
  const auto names = synthetic_intent_names(7);
  c.split.known_intents.assign(names.begin(), names.begin() + 5);
  c.split.novel_intents.assign(names.begin() + 5, names.end());
  c.split.labeled_count = 1550;
  c.split.test_count = 1500;
  c.split.seed = seed;
  c.training.seed = mix_seed(seed, 0x7472);
  c.seed = seed;
  return c;
}

}  // namespace idalc
