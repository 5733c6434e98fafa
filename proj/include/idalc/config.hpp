#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idalc/alc.hpp"
#include "idalc/corpus.hpp"
#include "idalc/features.hpp"
#include "idalc/kmeans.hpp"
#include "idalc/labeling.hpp"
#include "idalc/models/softmax.hpp"
#include "idalc/ood.hpp"
#include "idalc/synthetic.hpp"

namespace idalc {

struct DatasetConfig {
  std::string name;
  std::filesystem::path path;
  // "tsv", "jsonl" or "synthetic".
  std::string format = "tsv";
  SyntheticSpec synthetic;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::kDoc;
  double msp_threshold = 0.7;
  double doc_alpha = 3.0;
  std::size_t lof_k = 20;
  double lof_contamination = 0.3;
  void validate() const;
};

struct LabelingConfig {
  LabelingStrategy strategy = LabelingStrategy::kKMeans;
  double m = 0.2;
  KMeansOptions kmeans;
  void validate() const;
};

struct RunConfig {
  DatasetConfig dataset;
  // An empty novel list means "every corpus intent that is not known".
  SplitSpec split;
  FeaturizerConfig features;
  TrainingConfig training;
  DetectorConfig detector;
  LabelingConfig labeling;
  AlcConfig alc;
  std::uint64_t seed = 0;
  void validate() const;
};

// Parses an INI document with one section per module. `overrides` are
// "section.key=value" strings applied after the file. Unknown sections or
// keys, malformed values and missing seeds (split.seed, run.seed) raise
// ConfigError. Relative dataset paths resolve against `base_dir`.
RunConfig parse_config(std::string_view text, std::span<const std::string> overrides = {},
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path,
                      std::span<const std::string> overrides = {});

// Applies a single dotted-key setting.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// Every setting as "section.key" -> value, in key order.
std::map<std::string, std::string> config_entries(const RunConfig& config);

}  // namespace idalc
