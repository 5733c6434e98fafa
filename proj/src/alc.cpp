#include "idalc/alc.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "idalc/random.hpp"

namespace idalc {

void AlcConfig::validate() const {
  if (!(threshold_factor > 0.0 && threshold_factor < 1.0)) {
    throw ConfigError("alc.threshold_factor must be in (0, 1)");
  }
  if (quorum && (*quorum < 1 || *quorum > 5)) {
    throw ConfigError("alc.quorum must be in [1, 5] or 'none'");
  }
  if (cycles < 2 || cycles > 5) throw ConfigError("alc.cycles must be in [2, 5]");
}

VoteRecord tally_votes(UtteranceId id, std::vector<std::optional<std::string>> votes,
                       std::optional<std::size_t> quorum) {
  VoteRecord record;
  record.id = id;
  std::map<std::string, std::size_t> counts;
  for (const auto& v : votes) {
    if (v) ++counts[*v];
  }
  std::string top;
  for (const auto& [label, count] : counts) {
    if (count > record.winner_votes) {
      record.winner_votes = count;
      top = label;
    }
  }
  if (quorum && record.winner_votes >= *quorum) record.winner = top;
  record.votes = std::move(votes);
  return record;
}

double max_confidence(const Classifier& model, const FeatureVector& x) {
  const auto probs = model.predict_proba(x);
  return *std::max_element(probs.begin(), probs.end());
}

double compute_threshold(const Classifier& model, std::span<const UtteranceId> remainder,
                         const FeatureStore& store, double threshold_factor) {
  if (remainder.empty()) throw Error("compute_threshold: empty remainder");
  double top = 0.0;
  for (auto id : remainder) top = std::max(top, max_confidence(model, store.at(id)));
  return threshold_factor * top;
}

CorrectionOutcome correct_cycle(const Classifier& model, std::span<const UtteranceId> remainder,
                                const FeatureStore& store,
                                std::span<const EnsembleMember> ensemble,
                                const AlcConfig& config, const DataPool& pool,
                                AnnotationLedger& ledger) {
  CorrectionOutcome out;
  out.threshold_used = compute_threshold(model, remainder, store, config.threshold_factor);
  for (auto id : remainder) {
    const auto& x = store.at(id);
    if (max_confidence(model, x) >= out.threshold_used) continue;
    std::vector<std::optional<std::string>> votes;
    if (config.quorum) {
      votes.reserve(ensemble.size());
      for (const auto& member : ensemble) votes.push_back(member.vote(x));
    }
    auto record = tally_votes(id, std::move(votes), config.quorum);
    if (record.winner) {
      out.auto_corrected.emplace_back(id, *record.winner);
    } else {
      out.rejected.push_back(id);
    }
    out.votes.push_back(std::move(record));
  }
  out.annotated = oracle_annotate(pool, out.rejected, AnnotationPhase::kCorrection, ledger);
  return out;
}

AlcResult run_alc(const DataPool& pool, const FeatureStore& store, WorkingSet& working,
                  ModelHandle model, const AlcConfig& config,
                  const TrainingConfig& training, std::span<const MemberKind> kinds,
                  std::uint64_t seed, AnnotationLedger& ledger,
                  const CycleEvaluator& evaluate_cycle) {
  config.validate();
  AlcResult result;
  for (std::size_t cycle = 1; cycle <= config.cycles; ++cycle) {
    AlcCycle record;
    record.cycle = cycle;
    record.labeled_before = working.labeled_ids.size();
    record.remainder_before = working.remainder.size();

    bool any_below = false;
    if (!working.remainder.empty()) {
      const double threshold =
          compute_threshold(model, working.remainder, store, config.threshold_factor);
      any_below = std::any_of(working.remainder.begin(), working.remainder.end(),
                              [&](UtteranceId id) {
                                return max_confidence(model, store.at(id)) < threshold;
                              });
      record.outcome.threshold_used = threshold;
    }

    if (any_below) {
      std::vector<EnsembleMember> ensemble;
      if (config.quorum) {
        const auto x = store.gather(working.labeled_ids);
        ensemble = train_ensemble(x, working.labeled_labels, kinds, training,
                                  mix_seed(seed, cycle));
        for (const auto& m : ensemble) {
          if (!m.usable()) {
            spdlog::info("ALC({}): {} abstains: {}", cycle, member_kind_name(m.kind),
                         m.unusable_reason);
          }
        }
      }
      record.outcome = correct_cycle(model, working.remainder, store, ensemble, config, pool,
                                     ledger);

      std::unordered_set<UtteranceId> moved;
      for (auto& [id, label] : record.outcome.auto_corrected) {
        working.add_labeled(id, label);
        moved.insert(id);
      }
      for (auto& [id, label] : record.outcome.annotated) {
        working.add_labeled(id, label);
        moved.insert(id);
      }
      std::erase_if(working.remainder, [&](UtteranceId id) { return moved.contains(id); });

      const auto x = store.gather(working.labeled_ids);
      model = train_base(x, working.labeled_labels, training);
    } else {
      record.early_stop = true;
    }

    record.labeled_after = working.labeled_ids.size();
    record.remainder_after = working.remainder.size();
    record.metrics = evaluate_cycle(model, cycle);
    spdlog::info("ALC({}): {} below threshold {:.4f}, {} auto-corrected, {} annotated",
                 cycle, record.outcome.below_threshold(), record.outcome.threshold_used,
                 record.outcome.auto_corrected.size(), record.outcome.rejected.size());
    const bool stop = record.early_stop;
    result.cycles.push_back(std::move(record));
    if (stop) break;
  }
  result.model = std::move(model);
  return result;
}

}  // namespace idalc
