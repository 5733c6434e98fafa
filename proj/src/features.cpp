#include "idalc/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <locale>
#include <map>
#include <set>

#include "idalc/error.hpp"

namespace idalc {
namespace {

constexpr std::array<std::string_view, 96> kEnglishStopwords = {
    "a",       "about",  "above", "after", "again",   "against", "all",   "am",
    "an",      "and",    "any",   "are",   "as",      "at",      "be",    "because",
    "been",    "before", "being", "below", "between", "both",    "but",   "by",
    "can",     "did",    "do",    "does",  "doing",   "down",    "during", "each",
    "few",     "for",    "from",  "further", "had",   "has",     "have",  "having",
    "he",      "her",    "here",  "hers",  "him",     "his",     "how",   "i",
    "if",      "in",     "into",  "is",    "it",      "its",     "just",  "me",
    "more",    "most",   "my",    "no",    "nor",     "not",     "now",   "of",
    "off",     "on",     "once",  "only",  "or",      "other",   "our",   "out",
    "over",    "own",    "same",  "she",   "should",  "so",      "some",  "such",
    "than",    "that",   "the",   "their", "them",    "then",    "there", "these",
    "they",    "this",   "those", "to",    "too",     "very",    "was",   "we"};

const std::ctype<wchar_t>* unicode_ctype() {
  static const std::locale locale = [] {
    try {
      return std::locale("C.UTF-8");
    } catch (const std::runtime_error&) {
      return std::locale::classic();
    }
  }();
  return &std::use_facet<std::ctype<wchar_t>>(locale);
}

// Decodes UTF-8; malformed bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
      out.push_back(0xFFFD);
      break;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
      if ((cc & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_word_char(char32_t cp, const std::ctype<wchar_t>& ct) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
           (cp >= 'A' && cp <= 'Z');
  }
  if (cp == 0xFFFD) return false;
  // Non-ASCII: everything except whitespace and punctuation, so combining
  // marks of scripts such as Thai stay inside their word.
  const auto wc = static_cast<wchar_t>(cp);
  return !ct.is(std::ctype_base::space | std::ctype_base::punct, wc);
}

char32_t to_lower(char32_t cp, const std::ctype<wchar_t>& ct) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  return static_cast<char32_t>(ct.tolower(static_cast<wchar_t>(cp)));
}

std::string encode(const std::u32string& cps, std::size_t begin, std::size_t len) {
  std::string out;
  for (std::size_t i = begin; i < begin + len; ++i) append_utf8(out, cps[i]);
  return out;
}

}  // namespace

bool is_stopword(std::string_view token) {
  return std::find(kEnglishStopwords.begin(), kEnglishStopwords.end(), token) !=
         kEnglishStopwords.end();
}

std::vector<std::string> tokenize(std::string_view text, const FeaturizerConfig& config) {
  const auto& ct = *unicode_ctype();
  const auto cps = decode_utf8(text);
  std::vector<std::u32string> words;
  std::u32string current;
  for (char32_t cp : cps) {
    if (is_word_char(cp, ct)) {
      current.push_back(to_lower(cp, ct));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  std::vector<std::string> tokens;
  for (const auto& w : words) {
    std::string word = encode(w, 0, w.size());
    if (config.stopwords && is_stopword(word)) continue;
    tokens.push_back(word);
    if (config.char_ngrams) {
      for (std::size_t n = 3; n <= 5; ++n) {
        if (w.size() < n) break;
        for (std::size_t i = 0; i + n <= w.size(); ++i) {
          tokens.push_back("#" + encode(w, i, n));
        }
      }
    }
  }
  return tokens;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::document_frequency(std::string_view term) const {
  const auto idx = index_of(term);
  return idx ? df_[*idx] : 0;
}

Vocabulary fit_vocabulary(std::span<const std::string> texts,
                          const FeaturizerConfig& config) {
  if (texts.empty()) throw DataError("fit_vocabulary: no texts");
  std::map<std::string, std::size_t> df;
  bool any_token = false;
  for (const auto& text : texts) {
    auto tokens = tokenize(text, config);
    any_token = any_token || !tokens.empty();
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[t];
  }
  if (!any_token) throw DataError("fit_vocabulary: every text is empty");

  Vocabulary vocab;
  vocab.config_ = config;
  vocab.n_docs_ = texts.size();
  for (const auto& [term, count] : df) {
    if (count < config.min_df) continue;
    const auto index = static_cast<std::uint32_t>(vocab.terms_.size());
    vocab.terms_.push_back(term);
    vocab.df_.push_back(count);
    vocab.idf_.push_back(std::log((1.0 + static_cast<double>(vocab.n_docs_)) /
                                  (1.0 + static_cast<double>(count))) +
                         1.0);
    vocab.index_.emplace(term, index);
  }
  return vocab;
}

FeatureVector featurize(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::pair<std::uint32_t, double>> counts;
  for (const auto& token : tokenize(text, vocab.config())) {
    if (auto idx = vocab.index_of(token)) counts.emplace_back(*idx, 1.0);
  }
  auto vec = FeatureVector::from_pairs(std::move(counts));
  double sq = 0.0;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    vec.values[i] *= vocab.idf(vec.indices[i]);
    sq += vec.values[i] * vec.values[i];
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& v : vec.values) v *= inv;
  }
  return vec;
}

}  // namespace idalc
