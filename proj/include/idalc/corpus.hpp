#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace idalc {

using UtteranceId = std::int64_t;

// An utterance whose gold label is hidden.
struct Utterance {
  UtteranceId id = 0;
  std::string text;
};

// An utterance together with a label the caller is allowed to see.
struct LabeledUtterance {
  UtteranceId id = 0;
  std::string text;
  std::string label;
};

enum class DatasetFormat { kTsv, kJsonLines };

DatasetFormat parse_dataset_format(const std::string& tag);

class DataPool;
class AnnotationLedger;
struct SplitSpec;

enum class AnnotationPhase { kIntentDetection, kCorrection };

// A loaded dataset. Per-record gold labels are not readable through the
// public surface; only label frequencies are.
class Corpus {
 public:
  // Validates id uniqueness, non-empty text and non-empty labels.
  static Corpus from_records(std::vector<LabeledUtterance> records);

  std::size_t size() const { return records_.size(); }
  std::vector<Utterance> utterances() const;
  // Intent name -> number of records, ordered by name.
  const std::map<std::string, std::size_t>& label_counts() const {
    return label_counts_;
  }
  std::vector<std::string> label_inventory() const;

 private:
  std::vector<LabeledUtterance> records_;
  std::map<std::string, std::size_t> label_counts_;

  friend DataPool make_split(const Corpus& corpus, const SplitSpec& spec);
};

// Reads `text<TAB>label` (optionally `id<TAB>text<TAB>label`) or JSON lines
// with `text`, `label` and optional `id` fields. Blank lines are skipped.
Corpus load_corpus(const std::filesystem::path& path, DatasetFormat format);
Corpus parse_corpus(std::string_view contents, DatasetFormat format);

struct SplitSpec {
  std::vector<std::string> known_intents;
  std::vector<std::string> novel_intents;
  std::size_t labeled_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

// Labeled / unlabeled / test partition. Read-only after construction.
class DataPool {
 public:
  const std::vector<LabeledUtterance>& labeled() const { return labeled_; }
  const std::vector<Utterance>& unlabeled() const { return unlabeled_; }
  const std::vector<Utterance>& test() const { return test_; }
  const std::vector<std::string>& known_intents() const { return known_; }
  const std::vector<std::string>& novel_intents() const { return novel_; }

  bool in_unlabeled(UtteranceId id) const { return unlabeled_ids_.contains(id); }
  std::size_t total_size() const {
    return labeled_.size() + unlabeled_.size() + test_.size();
  }

 private:
  std::vector<LabeledUtterance> labeled_;
  std::vector<Utterance> unlabeled_;
  std::vector<Utterance> test_;
  std::vector<std::string> known_;
  std::vector<std::string> novel_;
  std::unordered_set<UtteranceId> unlabeled_ids_;
  // Gold labels of unlabeled and test utterances.
  std::unordered_map<UtteranceId, std::string> hidden_gold_;

  friend DataPool make_split(const Corpus& corpus, const SplitSpec& spec);
  friend class EvaluationGold;
  friend std::vector<std::pair<UtteranceId, std::string>> oracle_annotate(
      const DataPool&, std::span<const UtteranceId>, AnnotationPhase,
      AnnotationLedger&);
};

// Stratified, frequency-proportional sampling under spec.seed.
DataPool make_split(const Corpus& corpus, const SplitSpec& spec);

// Counts oracle calls per phase. Each id is paid for at most once.
class AnnotationLedger {
 public:
  explicit AnnotationLedger(std::size_t unlabeled_size)
      : unlabeled_size_(unlabeled_size) {}

  std::size_t id_phase_calls() const { return id_phase_calls_; }
  std::size_t alc_phase_calls() const { return alc_phase_calls_; }
  std::size_t total_calls() const { return id_phase_calls_ + alc_phase_calls_; }
  std::size_t unlabeled_size() const { return unlabeled_size_; }
  bool already_annotated(UtteranceId id) const { return annotated_.contains(id); }

  // total / unlabeled_size, in percent.
  double percentage() const;

 private:
  std::size_t id_phase_calls_ = 0;
  std::size_t alc_phase_calls_ = 0;
  std::size_t unlabeled_size_ = 0;
  std::unordered_set<UtteranceId> annotated_;

  friend std::vector<std::pair<UtteranceId, std::string>> oracle_annotate(
      const DataPool&, std::span<const UtteranceId>, AnnotationPhase,
      AnnotationLedger&);
};

double annotation_percentage(std::size_t total_calls, std::size_t unlabeled_size);

// Replays the hidden gold label of unlabeled utterances, charging the ledger.
std::vector<std::pair<UtteranceId, std::string>> oracle_annotate(
    const DataPool& pool, std::span<const UtteranceId> ids, AnnotationPhase phase,
    AnnotationLedger& ledger);

// Gold access for evaluation and reporting only; never used to drive the loop.
class EvaluationGold {
 public:
  explicit EvaluationGold(const DataPool& pool) : pool_(&pool) {}

  // Gold labels aligned with pool.test().
  std::vector<std::string> test_labels() const;
  // True when the unlabeled (or test) utterance belongs to a novel intent.
  bool is_novel(UtteranceId id) const;
  bool label_matches(UtteranceId id, const std::string& label) const;

 private:
  const std::string& gold(UtteranceId id) const;
  const DataPool* pool_;
};

}  // namespace idalc
