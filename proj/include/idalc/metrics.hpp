#pragma once

#include <span>
#include <string>
#include <vector>

#include "idalc/models/classifier.hpp"

namespace idalc {

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct Metrics {
  std::string phase;  // "ID(0)", "ID(1)", "ALC(k)"
  std::size_t cycle = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  // One entry per distinct gold class, sorted by label.
  std::vector<ClassMetrics> per_class;
};

// Classes are the distinct gold labels; predictions outside that set only
// count against recall. Zero divisions yield 0.
Metrics compute_metrics(std::span<const std::string> gold,
                        std::span<const std::string> predicted);

Metrics evaluate(const Classifier& model, std::span<const FeatureVector> test,
                 std::span<const std::string> gold);

}  // namespace idalc
