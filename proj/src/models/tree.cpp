#include "idalc/models/tree.hpp"

#include <algorithm>
#include <cmath>

namespace idalc {
namespace {

struct Entry {
  std::uint32_t feature;
  double value;
  std::uint32_t code;
  double weight;
};

// A run of equal values in a sorted feature group. An empty range marks the
// implicit zero block.
struct Block {
  double value;
  std::size_t begin, end;
};

struct Split {
  bool found = false;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of S/w; larger is purer
};

double purity(std::span<const double> counts, double weight) {
  if (weight <= 0.0) return 0.0;
  double s = 0.0;
  for (double c : counts) s += c * c;
  return s / weight;
}

// Evaluates every threshold of one feature. `group` is sorted by value,
// descending; the implicit zero block sits between positives and negatives.
void scan_feature(std::span<const Entry> group, std::span<const double> node_counts,
                  double node_weight, std::size_t classes, Split& best,
                  std::vector<double>& right, std::vector<double>& zero,
                  std::vector<double>& left, std::vector<Block>& blocks) {
  std::fill(zero.begin(), zero.end(), 0.0);
  double nonzero_weight = 0.0;
  for (const auto& e : group) {
    zero[e.code] += e.weight;
    nonzero_weight += e.weight;
  }
  for (std::size_t c = 0; c < classes; ++c) zero[c] = node_counts[c] - zero[c];
  const double zero_weight = node_weight - nonzero_weight;
  const bool has_zero = zero_weight > 1e-12;

  // Blocks of equal value, largest first.
  blocks.clear();
  std::size_t i = 0;
  bool zero_placed = !has_zero;
  while (i < group.size()) {
    if (!zero_placed && group[i].value < 0.0) {
      blocks.push_back({0.0, 0, 0});
      zero_placed = true;
    }
    std::size_t j = i;
    while (j < group.size() && group[j].value == group[i].value) ++j;
    blocks.push_back({group[i].value, i, j});
    i = j;
  }
  if (!zero_placed) blocks.push_back({0.0, 0, 0});
  if (blocks.size() < 2) return;

  std::fill(right.begin(), right.end(), 0.0);
  double right_weight = 0.0;
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    const auto& block = blocks[b];
    if (block.begin == block.end) {
      for (std::size_t c = 0; c < classes; ++c) right[c] += zero[c];
      right_weight += zero_weight;
    } else {
      for (std::size_t k = block.begin; k < block.end; ++k) {
        right[group[k].code] += group[k].weight;
        right_weight += group[k].weight;
      }
    }
    const double left_weight = node_weight - right_weight;
    if (left_weight <= 1e-12) continue;
    for (std::size_t c = 0; c < classes; ++c) left[c] = node_counts[c] - right[c];
    const double score = purity(right, right_weight) + purity(left, left_weight);
    if (!best.found || score > best.score + 1e-12) {
      best.found = true;
      best.feature = group.front().feature;
      best.threshold = 0.5 * (block.value + blocks[b + 1].value);
      best.score = score;
    }
  }
}

}  // namespace

void DecisionTree::fit(std::span<const FeatureVector> rows,
                       std::span<const std::size_t> codes,
                       std::span<const double> sample_weight, std::size_t classes,
                       const TreeParams& params, Rng& rng) {
  nodes_.clear();
  leaf_dists_.clear();
  classes_ = classes;
  depth_ = 0;
  const std::size_t dim = feature_dimension(rows);

  std::vector<std::size_t> root;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (sample_weight[i] > 0.0) root.push_back(i);
  }

  struct Pending {
    std::int32_t node;
    std::vector<std::size_t> samples;
    std::size_t depth;
  };
  std::vector<Pending> stack;
  nodes_.push_back({});
  stack.push_back({0, std::move(root), 0});

  std::vector<Entry> entries;
  std::vector<Entry> grouped;
  std::vector<std::uint32_t> feature_count(dim, 0);
  std::vector<std::uint32_t> feature_stamp(dim, 0);
  std::uint32_t stamp = 0;
  std::vector<std::uint32_t> present;
  std::vector<double> counts(classes), right(classes), zero(classes), left(classes);
  std::vector<Block> blocks;

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    depth_ = std::max(depth_, job.depth);

    std::fill(counts.begin(), counts.end(), 0.0);
    double weight = 0.0;
    for (auto s : job.samples) {
      counts[codes[s]] += sample_weight[s];
      weight += sample_weight[s];
    }
    const auto nonzero_classes =
        std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; });

    auto make_leaf = [&] {
      Node& n = nodes_[static_cast<std::size_t>(job.node)];
      n.feature = -1;
      n.leaf = leaf_dists_.size();
      for (std::size_t c = 0; c < classes; ++c) {
        leaf_dists_.push_back(weight > 0.0 ? counts[c] / weight : 1.0 / static_cast<double>(classes));
      }
    };

    if (nonzero_classes <= 1 || job.depth >= params.max_depth ||
        job.samples.size() < params.min_samples_split) {
      make_leaf();
      continue;
    }

    // Features present in the node, optionally subsampled, then the nonzero
    // coordinates of the kept features.
    present.clear();
    ++stamp;
    for (auto s : job.samples) {
      const auto& row = rows[s];
      for (std::size_t k = 0; k < row.size(); ++k) {
        const auto f = row.indices[k];
        if (row.values[k] == 0.0 || feature_stamp[f] == stamp) continue;
        feature_stamp[f] = stamp;
        present.push_back(f);
      }
    }
    std::sort(present.begin(), present.end());
    if (params.features_per_split > 0 && present.size() > params.features_per_split) {
      const auto picks =
          sample_without_replacement(present.size(), params.features_per_split, rng);
      std::vector<std::uint32_t> chosen;
      chosen.reserve(picks.size());
      for (auto p : picks) chosen.push_back(present[p]);
      std::sort(chosen.begin(), chosen.end());
      ++stamp;
      for (auto f : chosen) feature_stamp[f] = stamp;
      present = std::move(chosen);
    }
    for (auto f : present) feature_count[f] = 0;
    entries.clear();
    for (auto s : job.samples) {
      const auto& row = rows[s];
      for (std::size_t k = 0; k < row.size(); ++k) {
        const auto f = row.indices[k];
        if (row.values[k] == 0.0 || feature_stamp[f] != stamp) continue;
        entries.push_back({f, row.values[k], static_cast<std::uint32_t>(codes[s]),
                           sample_weight[s]});
      }
    }

    // Bucket by feature (ascending), then sort each bucket by value.
    for (const auto& e : entries) ++feature_count[e.feature];
    std::vector<std::size_t> offsets(present.size() + 1, 0);
    for (std::size_t p = 0; p < present.size(); ++p) {
      offsets[p + 1] = offsets[p] + feature_count[present[p]];
      feature_count[present[p]] = static_cast<std::uint32_t>(offsets[p]);
    }
    grouped.resize(entries.size());
    for (const auto& e : entries) grouped[feature_count[e.feature]++] = e;

    Split best;
    for (std::size_t p = 0; p < present.size(); ++p) {
      auto begin = grouped.begin() + static_cast<std::ptrdiff_t>(offsets[p]);
      auto end = grouped.begin() + static_cast<std::ptrdiff_t>(offsets[p + 1]);
      std::sort(begin, end, [](const Entry& a, const Entry& b) { return a.value > b.value; });
      scan_feature(std::span<const Entry>(&*begin, static_cast<std::size_t>(end - begin)),
                   counts, weight, classes, best, right, zero, left, blocks);
    }

    if (!best.found || best.score <= purity(counts, weight) + 1e-12) {
      make_leaf();
      continue;
    }

    std::vector<std::size_t> go_left, go_right;
    for (auto s : job.samples) {
      (rows[s].at(best.feature) > best.threshold ? go_right : go_left).push_back(s);
    }
    const auto left_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    const auto right_id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({});
    Node& n = nodes_[static_cast<std::size_t>(job.node)];
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.left = left_id;
    n.right = right_id;
    stack.push_back({right_id, std::move(go_right), job.depth + 1});
    stack.push_back({left_id, std::move(go_left), job.depth + 1});
  }
}

std::span<const double> DecisionTree::distribution(const FeatureVector& x) const {
  std::size_t node = 0;
  while (nodes_[node].feature >= 0) {
    const auto& n = nodes_[node];
    const double v = x.at(static_cast<std::uint32_t>(n.feature));
    node = static_cast<std::size_t>(v > n.threshold ? n.right : n.left);
  }
  return std::span<const double>(leaf_dists_).subspan(nodes_[node].leaf, classes_);
}

std::unique_ptr<TreeEnsembleClassifier> TreeEnsembleClassifier::fit(
    std::span<const FeatureVector> features, std::span<const std::string> labels,
    const ForestParams& params, std::uint64_t seed) {
  auto enc = encode_labels(labels);
  if (enc.labels.size() < 2) throw UnfittableError("tree ensemble needs at least 2 labels");
  auto model = std::make_unique<TreeEnsembleClassifier>();
  model->labels_ = enc.labels;
  const std::size_t n = features.size();
  model->trees_.resize(params.trees);
  for (std::size_t t = 0; t < params.trees; ++t) {
    Rng rng(mix_seed(seed, t));
    std::vector<double> weight(n, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) weight[uniform_index(rng, n)] += 1.0;
    }
    model->trees_[t].fit(features, enc.codes, weight, enc.labels.size(), params.tree, rng);
  }
  return model;
}

std::vector<double> TreeEnsembleClassifier::predict_proba(const FeatureVector& x) const {
  std::vector<double> out(labels_.size(), 0.0);
  for (const auto& tree : trees_) {
    const auto d = tree.distribution(x);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += d[c];
  }
  double sum = 0.0;
  for (double v : out) sum += v;
  for (auto& v : out) v /= sum;
  return out;
}

}  // namespace idalc
