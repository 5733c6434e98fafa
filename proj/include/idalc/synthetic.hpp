#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idalc/corpus.hpp"

namespace idalc {

// Generator for a labeled utterance corpus with controllable overlap.
// Each intent owns a pool of pseudo-words; utterances mix intent words,
// shared filler words and occasional words from other intents.
struct SyntheticSpec {
  std::size_t intents = 7;
  std::size_t per_intent = 1150;
  // Overrides per_intent when non-empty (one count per intent).
  std::vector<std::size_t> counts;
  std::size_t keywords_per_intent = 40;
  std::size_t filler_words = 60;
  std::size_t min_length = 5;
  std::size_t max_length = 10;
  double topic_rate = 0.45;
  double confusion_rate = 0.06;
  std::uint64_t seed = 1;
};

// SNIPS-style names for the first seven intents, "Intent<N>" beyond.
std::vector<std::string> synthetic_intent_names(std::size_t count);

std::vector<LabeledUtterance> make_synthetic_records(const SyntheticSpec& spec);
Corpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace idalc
