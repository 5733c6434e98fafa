#pragma once

#include <span>
#include <string>
#include <vector>

#include "idalc/error.hpp"
#include "idalc/sparse.hpp"

namespace idalc {

// Probabilistic classifier over an ordered label list.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual const std::vector<std::string>& labels() const = 0;
  // Simplex vector aligned with labels().
  virtual std::vector<double> predict_proba(const FeatureVector& x) const = 0;
  // Argmax of predict_proba, lowest index on ties, unless overridden.
  virtual std::size_t predict_index(const FeatureVector& x) const;

  std::string predict(const FeatureVector& x) const;
};

// Raised when a classifier cannot be fitted on the given data.
class UnfittableError : public Error {
 public:
  using Error::Error;
};

struct LabelEncoding {
  std::vector<std::string> labels;  // sorted, unique
  std::vector<std::size_t> codes;   // one per sample
};

LabelEncoding encode_labels(std::span<const std::string> labels);

std::size_t argmax(std::span<const double> values);

// In-place numerically stable softmax.
void softmax_in_place(std::span<double> logits);

}  // namespace idalc
