#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "idalc/alc.hpp"
#include "test_util.hpp"

namespace idalc::testing {

struct QuorumCheck {
  std::size_t cases = 0;
  std::size_t mismatches = 0;
  std::size_t auto_corrected = 0;
  std::size_t rejected = 0;
  std::size_t ledger_calls = 0;
};

// Every 5-member vote tuple over labels {A, B, C, D} plus abstention, grouped
// by which members abstain (an abstaining member is an unusable one). Each
// tuple is one below-threshold sample; correct_cycle's split is compared
// with the rule "auto-correct iff some label has >= quorum votes, taking
// the most voted (then smallest) label".
inline QuorumCheck enumerate_quorum(std::optional<std::size_t> quorum) {
  static const std::vector<std::string> kLabels = {"A", "B", "C", "D"};
  constexpr std::size_t kMembers = 5;
  QuorumCheck check;
  for (unsigned abstain = 0; abstain < (1u << kMembers); ++abstain) {
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < kMembers; ++m) {
      if (!((abstain >> m) & 1u)) active.push_back(m);
    }
    std::size_t tuples = 1;
    for (std::size_t i = 0; i < active.size(); ++i) tuples *= kLabels.size();

    // votes[sample][member]; sample ids start at 1, id 0 anchors the threshold.
    std::map<UtteranceId, std::vector<std::optional<std::string>>> votes;
    for (std::size_t t = 0; t < tuples; ++t) {
      std::vector<std::optional<std::string>> v(kMembers);
      std::size_t code = t;
      for (auto m : active) {
        v[m] = kLabels[code % kLabels.size()];
        code /= kLabels.size();
      }
      votes[static_cast<UtteranceId>(t + 1)] = std::move(v);
    }

    std::vector<EnsembleMember> ensemble;
    for (std::size_t m = 0; m < kMembers; ++m) {
      if ((abstain >> m) & 1u) {
        ensemble.push_back(member_from(nullptr));
        continue;
      }
      ensemble.push_back(member_from(std::make_shared<FunctionClassifier>(
          kLabels, [&votes, m](const FeatureVector& x) {
            const auto& label = *votes.at(id_of(x))[m];
            return one_hot(kLabels.size(), static_cast<std::size_t>(label[0] - 'A'));
          })));
    }

    const FunctionClassifier base({"A", "B"}, [](const FeatureVector& x) {
      return id_of(x) == 0 ? std::vector<double>{0.9, 0.1} : std::vector<double>{0.5, 0.5};
    });
    FeatureStore store;
    std::vector<std::pair<UtteranceId, std::string>> gold = {{0, "A"}};
    std::vector<UtteranceId> remainder = {0};
    store.insert(0, id_vector(0));
    for (const auto& [id, v] : votes) {
      store.insert(id, id_vector(id));
      gold.emplace_back(id, "A");
      remainder.push_back(id);
    }
    const auto pool = pool_with_unlabeled(gold);
    AnnotationLedger ledger(pool.unlabeled().size());
    AlcConfig config;
    config.quorum = quorum;
    const auto out = correct_cycle(base, remainder, store, ensemble, config, pool, ledger);

    std::map<UtteranceId, std::string> corrected(out.auto_corrected.begin(),
                                                 out.auto_corrected.end());
    std::map<UtteranceId, bool> rejected;
    for (auto id : out.rejected) rejected[id] = true;
    if (corrected.contains(0) || rejected.contains(0)) ++check.mismatches;
    for (const auto& [id, v] : votes) {
      ++check.cases;
      std::map<std::string, std::size_t> count;
      for (const auto& vote : v) {
        if (vote) ++count[*vote];
      }
      std::optional<std::string> expected;
      std::size_t top = 0;
      for (const auto& [label, c] : count) {
        if (c > top) {
          top = c;
          expected = label;
        }
      }
      if (!quorum || top < *quorum) expected.reset();
      const auto it = corrected.find(id);
      const bool auto_ok = expected ? it != corrected.end() && it->second == *expected &&
                                          !rejected.contains(id)
                                    : it == corrected.end() && rejected.contains(id);
      if (!auto_ok) ++check.mismatches;
    }
    check.auto_corrected += out.auto_corrected.size();
    check.rejected += out.rejected.size();
    check.ledger_calls += ledger.alc_phase_calls();
  }
  return check;
}

}  // namespace idalc::testing
