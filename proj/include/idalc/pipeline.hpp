#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idalc/config.hpp"
#include "idalc/corpus.hpp"
#include "idalc/metrics.hpp"
#include "idalc/ood.hpp"

namespace idalc {

inline constexpr int kReportSchemaVersion = 1;

// Split sizes in the layout of a dataset-statistics table.
struct SplitSummary {
  std::vector<std::string> known;
  std::vector<std::string> novel;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::size_t unlabeled_novel = 0;
  std::size_t test = 0;
  std::size_t test_novel = 0;
  std::size_t total() const { return labeled + unlabeled + test; }
};

struct OodSummary {
  std::string detector;
  std::size_t flagged = 0;
  std::size_t remainder = 0;
  OodEvaluation evaluation;
};

struct LabelingSummary {
  std::string strategy;
  std::size_t flagged = 0;
  std::size_t seed_size = 0;
  std::size_t discovered_labels = 0;
  std::size_t clusters = 0;
  // Fraction of flagged samples whose assigned label equals the gold label.
  double accuracy = 0.0;
  std::vector<std::string> warnings;
};

struct CorrectionSummary {
  std::size_t cycle = 0;
  double threshold = 0.0;
  std::size_t below_threshold = 0;
  std::size_t auto_corrected = 0;
  std::size_t rejected = 0;
  // Auto-corrected labels matching gold, for the auto-correct accuracy.
  std::size_t auto_correct_hits = 0;
  bool early_stop = false;
  double auto_correct_fraction() const;
  double auto_correct_accuracy() const;
};

// Raw oracle counts; the percentage is always derived.
struct LedgerSummary {
  std::size_t id_calls = 0;
  std::size_t alc_calls = 0;
  std::size_t unlabeled_size = 0;
  std::size_t total() const { return id_calls + alc_calls; }
  double percentage() const { return annotation_percentage(total(), unlabeled_size); }
};

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string dataset;
  std::map<std::string, std::string> config;
  SplitSummary split;
  // ID(0), ID(1), then one entry per executed ALC cycle.
  std::vector<Metrics> phases;
  OodSummary ood;
  LabelingSummary labeling;
  std::vector<CorrectionSummary> corrections;
  std::size_t configured_cycles = 0;
  std::optional<std::size_t> quorum;
  LedgerSummary ledger;

  const Metrics* phase(const std::string& tag) const;
};

// Loads or generates the corpus named by the dataset config.
Corpus load_dataset(const DatasetConfig& config);

// Fills an empty novel list with every corpus intent that is not known.
SplitSpec resolve_split(const Corpus& corpus, const SplitSpec& spec);

// Split statistics without running anything.
SplitSummary inspect_split(const Corpus& corpus, const RunConfig& config);

struct MspSelection {
  std::vector<double> thresholds;
  // OOD macro-F1 on the validation carve-out, per threshold.
  std::vector<double> macro_f1;
  double best = 0.0;
  std::size_t carve_out = 0;
};

// Scores MSP thresholds 0.1..0.9 against gold on a seeded 20% carve-out of
// the unlabeled pool; the best (lowest on ties) wins. Gold is used for this
// evaluation only.
MspSelection select_msp_threshold(const Corpus& corpus, const RunConfig& config);

// Runs ID then ALC on the configured dataset. Errors carry the phase tag.
RunReport run_idalc(const RunConfig& config);
RunReport run_idalc(const Corpus& corpus, const RunConfig& config);

// The synthetic 5-known + 2-novel benchmark with a 5000-utterance pool.
RunConfig synthetic_benchmark_config(std::uint64_t seed);

}  // namespace idalc
