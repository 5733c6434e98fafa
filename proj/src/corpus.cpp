#include "idalc/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "idalc/error.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

LabeledUtterance parse_tsv_record(std::string_view line, std::size_t record) {
  const auto fields = split_tabs(line);
  LabeledUtterance out;
  out.id = static_cast<UtteranceId>(record);
  if (fields.size() == 2) {
    out.text = std::string(trim(fields[0]));
    out.label = std::string(trim(fields[1]));
  } else if (fields.size() == 3) {
    const auto id_field = trim(fields[0]);
    UtteranceId id = 0;
    const auto [ptr, ec] =
        std::from_chars(id_field.data(), id_field.data() + id_field.size(), id);
    if (ec != std::errc() || ptr != id_field.data() + id_field.size()) {
      throw DataError(fmt::format("record {}: id column '{}' is not an integer",
                                  record, id_field));
    }
    out.id = id;
    out.text = std::string(trim(fields[1]));
    out.label = std::string(trim(fields[2]));
  } else if (fields.size() < 2) {
    throw DataError(fmt::format("record {}: missing label column", record));
  } else {
    throw DataError(fmt::format("record {}: expected 2 or 3 tab-separated "
                                "fields, found {}",
                                record, fields.size()));
  }
  if (out.label.empty()) {
    throw DataError(fmt::format("record {}: missing label column", record));
  }
  return out;
}

LabeledUtterance parse_json_record(std::string_view line, std::size_t record) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(fmt::format("record {}: invalid JSON ({})", record, e.what()));
  }
  if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string()) {
    throw DataError(fmt::format("record {}: missing text field", record));
  }
  if (!obj.contains("label") || !obj["label"].is_string()) {
    throw DataError(fmt::format("record {}: missing label column", record));
  }
  LabeledUtterance out;
  out.id = static_cast<UtteranceId>(record);
  if (obj.contains("id")) {
    if (!obj["id"].is_number_integer()) {
      throw DataError(fmt::format("record {}: id is not an integer", record));
    }
    out.id = obj["id"].get<UtteranceId>();
  }
  out.text = std::string(trim(obj["text"].get<std::string>()));
  out.label = std::string(trim(obj["label"].get<std::string>()));
  if (out.label.empty()) {
    throw DataError(fmt::format("record {}: missing label column", record));
  }
  return out;
}

// Largest-remainder apportionment of `total` over `weights`, capped by
// `caps`. Ties in the fractional part go to the earlier entry.
std::vector<std::size_t> apportion(std::size_t total,
                                   const std::vector<std::size_t>& weights,
                                   const std::vector<std::size_t>& caps) {
  std::vector<std::size_t> quota(weights.size(), 0);
  std::size_t weight_sum = 0;
  for (auto w : weights) weight_sum += w;
  if (weight_sum == 0 || total == 0) return quota;

  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (rem, idx)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::size_t scaled = total * weights[i];
    quota[i] = std::min(scaled / weight_sum, caps[i]);
    assigned += quota[i];
    remainders.emplace_back(scaled % weight_sum, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  // Cycle until filled; caps may force several passes.
  while (assigned < total) {
    bool progressed = false;
    for (const auto& [rem, i] : remainders) {
      if (assigned == total) break;
      if (quota[i] < caps[i]) {
        ++quota[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return quota;
}

}  // namespace

DatasetFormat parse_dataset_format(const std::string& tag) {
  if (tag == "tsv") return DatasetFormat::kTsv;
  if (tag == "jsonl" || tag == "json-lines") return DatasetFormat::kJsonLines;
  throw ConfigError(fmt::format("unknown dataset format '{}'", tag));
}

Corpus Corpus::from_records(std::vector<LabeledUtterance> records) {
  std::unordered_map<UtteranceId, std::size_t> seen;
  std::vector<UtteranceId> duplicates;
  Corpus corpus;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    if (trim(r.text).empty()) {
      throw DataError(fmt::format("record {}: empty text", i));
    }
    if (r.label.empty()) {
      throw DataError(fmt::format("record {}: missing label column", i));
    }
    if (!seen.emplace(r.id, i).second) duplicates.push_back(r.id);
    ++corpus.label_counts_[r.label];
  }
  if (!duplicates.empty()) {
    std::sort(duplicates.begin(), duplicates.end());
    duplicates.erase(std::unique(duplicates.begin(), duplicates.end()),
                     duplicates.end());
    throw DataError(fmt::format("duplicate utterance id(s): {}",
                                fmt::join(duplicates, ", ")));
  }
  corpus.records_ = std::move(records);
  return corpus;
}

std::vector<Utterance> Corpus::utterances() const {
  std::vector<Utterance> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back({r.id, r.text});
  return out;
}

std::vector<std::string> Corpus::label_inventory() const {
  std::vector<std::string> out;
  for (const auto& [label, count] : label_counts_) out.push_back(label);
  return out;
}

Corpus parse_corpus(std::string_view contents, DatasetFormat format) {
  std::vector<LabeledUtterance> records;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) {
      const std::size_t record = records.size();
      records.push_back(format == DatasetFormat::kTsv
                            ? parse_tsv_record(line, record)
                            : parse_json_record(line, record));
    }
    if (end == contents.size()) break;
    start = end + 1;
  }
  if (records.empty()) throw DataError("dataset is empty");
  return Corpus::from_records(std::move(records));
}

Corpus load_corpus(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open dataset '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), format);
}

DataPool make_split(const Corpus& corpus, const SplitSpec& spec) {
  std::set<std::string> known(spec.known_intents.begin(), spec.known_intents.end());
  std::set<std::string> novel(spec.novel_intents.begin(), spec.novel_intents.end());
  for (const auto& intent : known) {
    if (novel.contains(intent)) {
      throw DataError(fmt::format("intent '{}' is both known and novel", intent));
    }
  }
  std::set<std::string> all(known);
  all.insert(novel.begin(), novel.end());
  const auto inventory = corpus.label_inventory();
  if (std::vector<std::string>(all.begin(), all.end()) != inventory) {
    throw DataError(fmt::format(
        "known + novel intents must equal the corpus inventory [{}]",
        fmt::join(inventory, ", ")));
  }
  if (spec.labeled_count == 0) throw DataError("labeled_count must be positive");

  // Record indices grouped per intent (intent order = lexicographic).
  std::vector<std::string> intents(inventory);
  std::vector<std::vector<std::size_t>> groups(intents.size());
  std::unordered_map<std::string, std::size_t> intent_index;
  for (std::size_t i = 0; i < intents.size(); ++i) intent_index[intents[i]] = i;
  for (std::size_t r = 0; r < corpus.records_.size(); ++r) {
    groups[intent_index.at(corpus.records_[r].label)].push_back(r);
  }

  Rng rng(spec.seed);
  for (auto& g : groups) shuffle_in_place(g, rng);

  std::vector<std::size_t> known_weights(intents.size(), 0);
  std::size_t known_total = 0;
  for (std::size_t i = 0; i < intents.size(); ++i) {
    if (known.contains(intents[i])) {
      known_weights[i] = groups[i].size();
      known_total += groups[i].size();
    }
  }
  if (spec.labeled_count > known_total) {
    throw DataError(fmt::format(
        "labeled_count {} exceeds the {} available known-intent samples",
        spec.labeled_count, known_total));
  }
  const auto labeled_quota = apportion(spec.labeled_count, known_weights, known_weights);

  std::vector<std::size_t> remaining(intents.size());
  std::size_t remaining_total = 0;
  for (std::size_t i = 0; i < intents.size(); ++i) {
    remaining[i] = groups[i].size() - labeled_quota[i];
    remaining_total += remaining[i];
  }
  if (spec.test_count > remaining_total) {
    throw DataError(fmt::format(
        "test_count {} exceeds the {} samples left after the labeled draw",
        spec.test_count, remaining_total));
  }
  const auto test_quota = apportion(spec.test_count, remaining, remaining);

  DataPool pool;
  pool.known_.assign(known.begin(), known.end());
  pool.novel_.assign(novel.begin(), novel.end());
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const auto& g = groups[i];
    for (std::size_t j = 0; j < g.size(); ++j) {
      const auto& rec = corpus.records_[g[j]];
      if (j < labeled_quota[i]) {
        pool.labeled_.push_back(rec);
      } else if (j < labeled_quota[i] + test_quota[i]) {
        pool.test_.push_back({rec.id, rec.text});
        pool.hidden_gold_.emplace(rec.id, rec.label);
      } else {
        pool.unlabeled_.push_back({rec.id, rec.text});
        pool.unlabeled_ids_.insert(rec.id);
        pool.hidden_gold_.emplace(rec.id, rec.label);
      }
    }
  }
  const auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(pool.labeled_.begin(), pool.labeled_.end(), by_id);
  std::sort(pool.unlabeled_.begin(), pool.unlabeled_.end(), by_id);
  std::sort(pool.test_.begin(), pool.test_.end(), by_id);
  return pool;
}

double annotation_percentage(std::size_t total_calls, std::size_t unlabeled_size) {
  if (unlabeled_size == 0) return 0.0;
  return 100.0 * static_cast<double>(total_calls) / static_cast<double>(unlabeled_size);
}

double AnnotationLedger::percentage() const {
  return annotation_percentage(total_calls(), unlabeled_size_);
}

std::vector<std::pair<UtteranceId, std::string>> oracle_annotate(
    const DataPool& pool, std::span<const UtteranceId> ids, AnnotationPhase phase,
    AnnotationLedger& ledger) {
  for (auto id : ids) {
    if (!pool.in_unlabeled(id)) {
      throw DataError(fmt::format("oracle: id {} is not in the unlabeled pool", id));
    }
  }
  std::vector<std::pair<UtteranceId, std::string>> out;
  out.reserve(ids.size());
  std::size_t charged = 0;
  for (auto id : ids) {
    if (ledger.annotated_.insert(id).second) ++charged;
    out.emplace_back(id, pool.hidden_gold_.at(id));
  }
  if (phase == AnnotationPhase::kIntentDetection) {
    ledger.id_phase_calls_ += charged;
  } else {
    ledger.alc_phase_calls_ += charged;
  }
  return out;
}

const std::string& EvaluationGold::gold(UtteranceId id) const {
  auto it = pool_->hidden_gold_.find(id);
  if (it == pool_->hidden_gold_.end()) {
    throw DataError(fmt::format("no gold label for id {}", id));
  }
  return it->second;
}

std::vector<std::string> EvaluationGold::test_labels() const {
  std::vector<std::string> out;
  out.reserve(pool_->test_.size());
  for (const auto& u : pool_->test_) out.push_back(gold(u.id));
  return out;
}

bool EvaluationGold::is_novel(UtteranceId id) const {
  const auto& label = gold(id);
  return std::binary_search(pool_->novel_.begin(), pool_->novel_.end(), label);
}

bool EvaluationGold::label_matches(UtteranceId id, const std::string& label) const {
  return gold(id) == label;
}

}  // namespace idalc
