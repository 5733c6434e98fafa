#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "idalc/corpus.hpp"
#include "idalc/sparse.hpp"

namespace idalc {

// Featurized utterances keyed by id.
class FeatureStore {
 public:
  void insert(UtteranceId id, FeatureVector features);
  const FeatureVector& at(UtteranceId id) const;
  bool contains(UtteranceId id) const { return vectors_.contains(id); }
  std::size_t size() const { return vectors_.size(); }

  std::vector<FeatureVector> gather(std::span<const UtteranceId> ids) const;

 private:
  std::unordered_map<UtteranceId, FeatureVector> vectors_;
};

}  // namespace idalc
