#include "idalc/feature_store.hpp"

#include <fmt/format.h>

#include "idalc/error.hpp"

namespace idalc {

void FeatureStore::insert(UtteranceId id, FeatureVector features) {
  vectors_.insert_or_assign(id, std::move(features));
}

const FeatureVector& FeatureStore::at(UtteranceId id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) throw Error(fmt::format("no features for utterance {}", id));
  return it->second;
}

std::vector<FeatureVector> FeatureStore::gather(std::span<const UtteranceId> ids) const {
  std::vector<FeatureVector> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(at(id));
  return out;
}

}  // namespace idalc
