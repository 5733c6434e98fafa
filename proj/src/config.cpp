#include "idalc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "idalc/error.hpp"
#include "idalc/random.hpp"

namespace idalc {
namespace {

constexpr std::uint64_t kTrainingSeedStream = 0x7472;
constexpr std::uint64_t kSyntheticSeedStream = 0x7379;

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (value.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", key, raw));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: expected a boolean, got '{}'", key, raw));
}

std::vector<std::string> parse_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string format_list(const std::vector<std::string>& items) {
  return fmt::format("{}", fmt::join(items, ","));
}

struct Setting {
  std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define IDALC_NUMBER(expr, type)                                                   \
  Setting {                                                                        \
    [](RunConfig& c, const std::string& k, const std::string& v) {                 \
      c.expr = static_cast<decltype(c.expr)>(parse_number<type>(k, v));            \
    },                                                                             \
        [](const RunConfig& c) { return fmt::format("{}", c.expr); }               \
  }

#define IDALC_BOOL(expr)                                                              \
  Setting {                                                                           \
    [](RunConfig& c, const std::string& k, const std::string& v) {                    \
      c.expr = parse_bool(k, v);                                                      \
    },                                                                                \
        [](const RunConfig& c) { return std::string(c.expr ? "true" : "false"); }     \
  }

const std::map<std::string, Setting>& settings() {
  static const std::map<std::string, Setting> table = {
      {"dataset.name",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.dataset.name = trim(v); },
        [](const RunConfig& c) { return c.dataset.name; }}},
      {"dataset.path",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.dataset.path = trim(v); },
        [](const RunConfig& c) { return c.dataset.path.string(); }}},
      {"dataset.format",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          const auto f = trim(v);
          if (f != "tsv" && f != "jsonl" && f != "synthetic") {
            throw ConfigError(fmt::format("{}: expected tsv, jsonl or synthetic, got '{}'", k, v));
          }
          c.dataset.format = f;
        },
        [](const RunConfig& c) { return c.dataset.format; }}},

      {"synthetic.intents", IDALC_NUMBER(dataset.synthetic.intents, std::size_t)},
      {"synthetic.per_intent", IDALC_NUMBER(dataset.synthetic.per_intent, std::size_t)},
      {"synthetic.counts",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.dataset.synthetic.counts.clear();
          for (const auto& item : parse_list(v)) {
            c.dataset.synthetic.counts.push_back(parse_number<std::size_t>(k, item));
          }
        },
        [](const RunConfig& c) { return fmt::format("{}", fmt::join(c.dataset.synthetic.counts, ",")); }}},
      {"synthetic.keywords_per_intent",
       IDALC_NUMBER(dataset.synthetic.keywords_per_intent, std::size_t)},
      {"synthetic.filler_words", IDALC_NUMBER(dataset.synthetic.filler_words, std::size_t)},
      {"synthetic.min_length", IDALC_NUMBER(dataset.synthetic.min_length, std::size_t)},
      {"synthetic.max_length", IDALC_NUMBER(dataset.synthetic.max_length, std::size_t)},
      {"synthetic.topic_rate", IDALC_NUMBER(dataset.synthetic.topic_rate, double)},
      {"synthetic.confusion_rate", IDALC_NUMBER(dataset.synthetic.confusion_rate, double)},
      {"synthetic.seed", IDALC_NUMBER(dataset.synthetic.seed, std::uint64_t)},

      {"split.known",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.split.known_intents = parse_list(v);
        },
        [](const RunConfig& c) { return format_list(c.split.known_intents); }}},
      {"split.novel",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.split.novel_intents = parse_list(v);
        },
        [](const RunConfig& c) { return format_list(c.split.novel_intents); }}},
      {"split.labeled_count", IDALC_NUMBER(split.labeled_count, std::size_t)},
      {"split.test_count", IDALC_NUMBER(split.test_count, std::size_t)},
      {"split.seed", IDALC_NUMBER(split.seed, std::uint64_t)},

      {"features.min_df", IDALC_NUMBER(features.min_df, std::size_t)},
      {"features.char_ngrams", IDALC_BOOL(features.char_ngrams)},
      {"features.stopwords", IDALC_BOOL(features.stopwords)},

      {"training.lr", IDALC_NUMBER(training.learning_rate, double)},
      {"training.epochs", IDALC_NUMBER(training.epochs, int)},
      {"training.l2", IDALC_NUMBER(training.l2, double)},
      {"training.seed", IDALC_NUMBER(training.seed, std::uint64_t)},
      {"training.knn_k", IDALC_NUMBER(training.knn_k, std::size_t)},
      {"training.rf_trees", IDALC_NUMBER(training.rf_trees, std::size_t)},
      {"training.projection_dim", IDALC_NUMBER(training.projection_dim, std::size_t)},

      {"detector.kind",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.detector.kind = parse_detector(trim(v));
        },
        [](const RunConfig& c) { return detector_name(c.detector.kind); }}},
      {"detector.msp_threshold", IDALC_NUMBER(detector.msp_threshold, double)},
      {"detector.doc_alpha", IDALC_NUMBER(detector.doc_alpha, double)},
      {"detector.lof_k", IDALC_NUMBER(detector.lof_k, std::size_t)},
      {"detector.lof_contamination", IDALC_NUMBER(detector.lof_contamination, double)},

      {"labeling.strategy",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.labeling.strategy = parse_strategy(trim(v));
        },
        [](const RunConfig& c) { return strategy_name(c.labeling.strategy); }}},
      {"labeling.m", IDALC_NUMBER(labeling.m, double)},
      {"labeling.kmeans_restarts", IDALC_NUMBER(labeling.kmeans.restarts, std::size_t)},
      {"labeling.kmeans_max_iter", IDALC_NUMBER(labeling.kmeans.max_iter, std::size_t)},

      {"alc.threshold_factor", IDALC_NUMBER(alc.threshold_factor, double)},
      {"alc.quorum",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          const auto t = trim(v);
          if (t == "none") {
            c.alc.quorum.reset();
          } else {
            c.alc.quorum = parse_number<std::size_t>(k, t);
          }
        },
        [](const RunConfig& c) {
          return c.alc.quorum ? fmt::format("{}", *c.alc.quorum) : std::string("none");
        }}},
      {"alc.cycles", IDALC_NUMBER(alc.cycles, std::size_t)},

      {"run.seed", IDALC_NUMBER(seed, std::uint64_t)},
  };
  return table;
}

#undef IDALC_NUMBER
#undef IDALC_BOOL

std::pair<std::string, std::string> split_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(fmt::format("override '{}' is not of the form key=value", text));
  }
  return {trim(std::string_view(text).substr(0, eq)), trim(std::string_view(text).substr(eq + 1))};
}

}  // namespace

void DetectorConfig::validate() const {
  if (!(msp_threshold > 0.0 && msp_threshold < 1.0)) {
    throw ConfigError("detector.msp_threshold must be in (0, 1)");
  }
  if (!(doc_alpha > 0.0)) throw ConfigError("detector.doc_alpha must be positive");
  if (lof_k < 1) throw ConfigError("detector.lof_k must be at least 1");
  if (!(lof_contamination >= 0.0 && lof_contamination <= 1.0)) {
    throw ConfigError("detector.lof_contamination must be in [0, 1]");
  }
}

void LabelingConfig::validate() const {
  if (!(m > 0.0 && m <= 1.0)) throw ConfigError("labeling.m must be in (0, 1]");
  if (kmeans.restarts < 1) throw ConfigError("labeling.kmeans_restarts must be at least 1");
  if (kmeans.max_iter < 1) throw ConfigError("labeling.kmeans_max_iter must be at least 1");
}

void RunConfig::validate() const {
  if (dataset.format != "synthetic" && dataset.path.empty()) {
    throw ConfigError("dataset.path is required unless dataset.format = synthetic");
  }
  if (split.known_intents.empty()) throw ConfigError("split.known must list at least one intent");
  if (split.labeled_count == 0) throw ConfigError("split.labeled_count must be positive");
  if (split.test_count == 0) throw ConfigError("split.test_count must be positive");
  if (features.min_df < 1) throw ConfigError("features.min_df must be at least 1");
  training.validate();
  detector.validate();
  labeling.validate();
  alc.validate();
}

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = settings();
  auto it = table.find(key);
  if (it == table.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  it->second.set(config, key, value);
}

std::map<std::string, std::string> config_entries(const RunConfig& config) {
  std::map<std::string, std::string> out;
  for (const auto& [key, setting] : settings()) out.emplace(key, setting.get(config));
  return out;
}

RunConfig parse_config(std::string_view text, std::span<const std::string> overrides,
                       const std::filesystem::path& base_dir) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(fmt::format("config: line {}: {}", e.line(), e.message()));
  }

  RunConfig config;
  std::set<std::string> seen;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("config: key '{}' must live inside a section", section));
    }
    for (const auto& [name, leaf] : body) {
      const std::string key = section + "." + name;
      apply_setting(config, key, leaf.data());
      seen.insert(key);
    }
  }
  for (const auto& raw : overrides) {
    const auto [key, value] = split_override(raw);
    apply_setting(config, key, value);
    seen.insert(key);
  }

  for (const char* required : {"split.seed", "run.seed"}) {
    if (!seen.contains(required)) {
      throw ConfigError(fmt::format("config: '{}' is mandatory", required));
    }
  }
  if (!seen.contains("training.seed")) {
    config.training.seed = mix_seed(config.seed, kTrainingSeedStream);
  }
  if (!seen.contains("synthetic.seed")) {
    config.dataset.synthetic.seed = mix_seed(config.seed, kSyntheticSeedStream);
  }
  if (!config.dataset.path.empty() && config.dataset.path.is_relative() && !base_dir.empty()) {
    config.dataset.path = base_dir / config.dataset.path;
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path.parent_path());
}

}  // namespace idalc
