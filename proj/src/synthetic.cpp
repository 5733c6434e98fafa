#include "idalc/synthetic.hpp"

#include <array>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "idalc/error.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

constexpr std::array<std::string_view, 7> kIntentNames = {
    "AddToPlaylist", "BookRestaurant", "GetWeather",          "PlayMusic",
    "RateBook",      "SearchCreativeWork", "SearchScreeningEvent"};

constexpr std::string_view kOnsets = "bcdfghjklmnprstvwz";
constexpr std::string_view kVowels = "aeiou";

std::string pseudo_word(Rng& rng) {
  const std::size_t syllables = 2 + uniform_index(rng, 2);
  std::string w;
  for (std::size_t s = 0; s < syllables; ++s) {
    w.push_back(kOnsets[uniform_index(rng, kOnsets.size())]);
    w.push_back(kVowels[uniform_index(rng, kVowels.size())]);
  }
  if (uniform_index(rng, 2) == 0) w.push_back(kOnsets[uniform_index(rng, kOnsets.size())]);
  return w;
}

// Index drawn with Zipf-like weights 1 / (rank + 1).
std::size_t zipf_index(const std::vector<double>& cumulative, Rng& rng) {
  const double u = uniform_unit(rng) * cumulative.back();
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cumulative[mid] > u) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace

std::vector<std::string> synthetic_intent_names(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(i < kIntentNames.size() ? std::string(kIntentNames[i])
                                          : fmt::format("Intent{:02}", i));
  }
  return out;
}

std::vector<LabeledUtterance> make_synthetic_records(const SyntheticSpec& spec) {
  if (spec.intents < 1) throw ConfigError("synthetic.intents must be positive");
  if (!spec.counts.empty() && spec.counts.size() != spec.intents) {
    throw ConfigError("synthetic.counts must list one count per intent");
  }
  if (spec.min_length < 1 || spec.max_length < spec.min_length) {
    throw ConfigError("synthetic lengths must satisfy 1 <= min <= max");
  }
  Rng rng(spec.seed);
  std::set<std::string> used;
  auto fresh = [&] {
    std::string w;
    do {
      w = pseudo_word(rng);
    } while (!used.insert(w).second);
    return w;
  };
  std::vector<std::string> filler;
  for (std::size_t i = 0; i < spec.filler_words; ++i) filler.push_back(fresh());
  std::vector<std::vector<std::string>> keywords(spec.intents);
  for (auto& pool : keywords) {
    for (std::size_t i = 0; i < spec.keywords_per_intent; ++i) pool.push_back(fresh());
  }
  auto cumulative = [](std::size_t n) {
    std::vector<double> c(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) c[i] = acc += 1.0 / static_cast<double>(i + 1);
    return c;
  };
  const auto keyword_cdf = cumulative(spec.keywords_per_intent);
  const auto filler_cdf = cumulative(std::max<std::size_t>(spec.filler_words, 1));

  const auto names = synthetic_intent_names(spec.intents);
  std::vector<LabeledUtterance> records;
  UtteranceId next_id = 0;
  for (std::size_t intent = 0; intent < spec.intents; ++intent) {
    const std::size_t count = spec.counts.empty() ? spec.per_intent : spec.counts[intent];
    for (std::size_t r = 0; r < count; ++r) {
      const std::size_t length =
          spec.min_length + uniform_index(rng, spec.max_length - spec.min_length + 1);
      std::string text;
      bool has_topic = false;
      for (std::size_t t = 0; t < length; ++t) {
        const double u = uniform_unit(rng);
        std::string word;
        // The last token is forced topical so every utterance carries signal.
        if (u < spec.topic_rate || (t + 1 == length && !has_topic) || filler.empty()) {
          word = keywords[intent][zipf_index(keyword_cdf, rng)];
          has_topic = true;
        } else if (u < spec.topic_rate + spec.confusion_rate && spec.intents > 1) {
          std::size_t other = uniform_index(rng, spec.intents - 1);
          if (other >= intent) ++other;
          word = keywords[other][zipf_index(keyword_cdf, rng)];
        } else {
          word = filler[zipf_index(filler_cdf, rng)];
        }
        if (!text.empty()) text.push_back(' ');
        text += word;
      }
      records.push_back({next_id++, std::move(text), names[intent]});
    }
  }
  return records;
}

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
  return Corpus::from_records(make_synthetic_records(spec));
}

}  // namespace idalc
