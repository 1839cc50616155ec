#pragma once

#include "taxotag/common.hpp"
#include "taxotag/encoders.hpp"
#include "taxotag/errors.hpp"
#include "taxotag/label_index.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

namespace taxotag {

namespace detail {

// First occurrence of each distinct non-gold label, in input order.
inline std::vector<int> distinct_non_gold(const std::vector<LabelEmbedding>& batch_labels,
                                          const TaxonomyPath& gold) {
  if (batch_labels.empty()) throw EmptyBatchError("negative sampling: batch label pool is empty");
  const std::string gold_seq = gold.sequence();
  std::unordered_set<std::string> seen;
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(batch_labels.size()); ++i) {
    const std::string seq = batch_labels[static_cast<std::size_t>(i)].label.sequence();
    if (seq == gold_seq) continue;
    if (seen.insert(seq).second) keep.push_back(i);
  }
  return keep;
}

}  // namespace detail

// Adaptive in-batch hard negatives: the k distinct non-gold labels with the
// highest cosine to the content representation, descending. Resampled every
// step, so the negatives track the current model parameters. Returns fewer
// than k when the batch has fewer distinct non-gold labels.
inline std::vector<LabelEmbedding> sample_hard_negatives(
    const Vec& content_vec, const std::vector<LabelEmbedding>& batch_labels,
    const TaxonomyPath& gold, int k) {
  if (k < 1) throw ConfigError("sample_hard_negatives: k must be >= 1");
  std::vector<int> candidates = detail::distinct_non_gold(batch_labels, gold);
  std::vector<std::pair<double, int>> scored;
  scored.reserve(candidates.size());
  for (int i : candidates)
    scored.emplace_back(cosine(content_vec, batch_labels[static_cast<std::size_t>(i)].vector), i);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const int take = std::min<int>(k, static_cast<int>(scored.size()));
  std::vector<LabelEmbedding> out;
  out.reserve(static_cast<std::size_t>(take));
  for (int r = 0; r < take; ++r)
    out.push_back(batch_labels[static_cast<std::size_t>(scored[static_cast<std::size_t>(r)].second)]);
  return out;
}

// Ablation sampler: k uniform draws without replacement from the distinct
// non-gold in-batch labels. Also resampled every step ("adaptive random
// negatives"); deterministic under a fixed rng state.
inline std::vector<LabelEmbedding> sample_random_negatives(
    const std::vector<LabelEmbedding>& batch_labels, const TaxonomyPath& gold, int k, Rng& rng) {
  if (k < 1) throw ConfigError("sample_random_negatives: k must be >= 1");
  std::vector<int> candidates = detail::distinct_non_gold(batch_labels, gold);
  rng.shuffle(candidates);
  const int take = std::min<int>(k, static_cast<int>(candidates.size()));
  std::vector<LabelEmbedding> out;
  out.reserve(static_cast<std::size_t>(take));
  for (int r = 0; r < take; ++r)
    out.push_back(batch_labels[static_cast<std::size_t>(candidates[static_cast<std::size_t>(r)])]);
  return out;
}

}  // namespace taxotag
