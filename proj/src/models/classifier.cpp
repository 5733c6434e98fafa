#include "idalc/models/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace idalc {

std::size_t Classifier::predict_index(const FeatureVector& x) const {
  const auto probs = predict_proba(x);
  return argmax(probs);
}

std::string Classifier::predict(const FeatureVector& x) const {
  return labels()[predict_index(x)];
}

LabelEncoding encode_labels(std::span<const std::string> labels) {
  LabelEncoding enc;
  enc.labels.assign(labels.begin(), labels.end());
  std::sort(enc.labels.begin(), enc.labels.end());
  enc.labels.erase(std::unique(enc.labels.begin(), enc.labels.end()), enc.labels.end());
  enc.codes.reserve(labels.size());
  for (const auto& l : labels) {
    enc.codes.push_back(static_cast<std::size_t>(
        std::lower_bound(enc.labels.begin(), enc.labels.end(), l) - enc.labels.begin()));
  }
  return enc;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

void softmax_in_place(std::span<double> logits) {
  if (logits.empty()) return;
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& v : logits) {
    v = std::exp(v - max);
    sum += v;
  }
  for (auto& v : logits) v /= sum;
}

}  // namespace idalc
