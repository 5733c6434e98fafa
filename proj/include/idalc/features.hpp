#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "idalc/sparse.hpp"

namespace idalc {

struct FeaturizerConfig {
  std::size_t min_df = 1;
  bool char_ngrams = true;
  bool stopwords = false;
};

// Lowercased word tokens, split on non-alphanumeric characters. With
// char_ngrams on, each word also yields its character 3..5-grams, emitted
// with a leading '#' so they never collide with words.
std::vector<std::string> tokenize(std::string_view text, const FeaturizerConfig& config);

bool is_stopword(std::string_view token);

class Vocabulary {
 public:
  std::size_t size() const { return terms_.size(); }
  std::size_t n_docs() const { return n_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const FeaturizerConfig& config() const { return config_; }

  std::optional<std::uint32_t> index_of(std::string_view term) const;
  std::size_t document_frequency(std::string_view term) const;
  // Smoothed idf: ln((1 + n_docs) / (1 + df)) + 1.
  double idf(std::uint32_t index) const { return idf_[index]; }

 private:
  FeaturizerConfig config_;
  std::vector<std::string> terms_;  // lexicographic
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::size_t n_docs_ = 0;

  friend Vocabulary fit_vocabulary(std::span<const std::string> texts,
                                   const FeaturizerConfig& config);
};

Vocabulary fit_vocabulary(std::span<const std::string> texts,
                          const FeaturizerConfig& config);

// L2-normalized tf-idf; out-of-vocabulary tokens are dropped.
FeatureVector featurize(std::string_view text, const Vocabulary& vocab);

}  // namespace idalc
