#include "idalc/metrics.hpp"

#include <map>

namespace idalc {

Metrics compute_metrics(std::span<const std::string> gold,
                        std::span<const std::string> predicted) {
  if (gold.empty()) throw Error("evaluate: empty test set");
  if (gold.size() != predicted.size()) throw Error("evaluate: length mismatch");
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& g : gold) counts[g];
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == predicted[i]) {
      ++correct;
      ++counts[gold[i]].tp;
    } else {
      ++counts[gold[i]].fn;
      if (auto it = counts.find(predicted[i]); it != counts.end()) ++it->second.fp;
    }
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  Metrics m;
  m.accuracy = ratio(correct, gold.size());
  double f1_sum = 0.0;
  for (const auto& [label, c] : counts) {
    ClassMetrics cm;
    cm.label = label;
    cm.precision = ratio(c.tp, c.tp + c.fp);
    cm.recall = ratio(c.tp, c.tp + c.fn);
    cm.f1 = cm.precision + cm.recall == 0.0
                ? 0.0
                : 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall);
    cm.support = c.tp + c.fn;
    f1_sum += cm.f1;
    m.per_class.push_back(std::move(cm));
  }
  m.macro_f1 = f1_sum / static_cast<double>(counts.size());
  return m;
}

Metrics evaluate(const Classifier& model, std::span<const FeatureVector> test,
                 std::span<const std::string> gold) {
  std::vector<std::string> predicted;
  predicted.reserve(test.size());
  for (const auto& x : test) predicted.push_back(model.predict(x));
  return compute_metrics(gold, predicted);
}

}  // namespace idalc
