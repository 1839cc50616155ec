#pragma once

#include "taxotag/errors.hpp"
#include "taxotag/label_index.hpp"

#include <string>
#include <vector>

namespace taxotag {

// d cos(a, b) / d a = (b/||b|| - cos * a/||a||) / ||a||.
inline Vec d_cosine_da(const Vec& a, const Vec& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return Vec::Zero(a.size());
  const double cos = a.dot(b) / (na * nb);
  return (b / nb - cos * (a / na)) / na;
}

// Hinge rank loss: sum_j max(0, margin - cos(content, positive)
//                                     + cos(content, negative_j)) / |negatives|.
inline double hinge_rank_loss(const Vec& content, const Vec& positive,
                              const std::vector<Vec>& negatives, double margin) {
  if (negatives.empty()) throw EmptyNegativesError("hinge_rank_loss: negatives list is empty");
  if (positive.size() != content.size())
    throw DimensionMismatchError("hinge_rank_loss: positive dimension mismatch");
  const double cos_pos = cosine(content, positive);
  double acc = 0.0;
  for (const Vec& neg : negatives) {
    if (neg.size() != content.size())
      throw DimensionMismatchError("hinge_rank_loss: negative dimension mismatch");
    acc += std::max(0.0, margin - cos_pos + cosine(content, neg));
  }
  return acc / static_cast<double>(negatives.size());
}

struct HingeLossResult {
  double loss = 0.0;
  Vec d_content;  // dL/d(content)
  int active = 0; // negatives violating the margin
};

inline HingeLossResult hinge_rank_loss_with_grad(const Vec& content, const Vec& positive,
                                                 const std::vector<Vec>& negatives,
                                                 double margin) {
  if (negatives.empty()) throw EmptyNegativesError("hinge_rank_loss: negatives list is empty");
  if (positive.size() != content.size())
    throw DimensionMismatchError("hinge_rank_loss: positive dimension mismatch");
  const double cos_pos = cosine(content, positive);
  const double m = static_cast<double>(negatives.size());
  HingeLossResult out;
  out.d_content = Vec::Zero(content.size());
  Vec d_cos_pos;  // computed lazily; shared by every active term
  for (const Vec& neg : negatives) {
    if (neg.size() != content.size())
      throw DimensionMismatchError("hinge_rank_loss: negative dimension mismatch");
    const double term = margin - cos_pos + cosine(content, neg);
    if (term <= 0.0) continue;
    out.loss += term;
    ++out.active;
    if (d_cos_pos.size() == 0) d_cos_pos = d_cosine_da(content, positive);
    out.d_content += d_cosine_da(content, neg) - d_cos_pos;
  }
  out.loss /= m;
  out.d_content /= m;
  return out;
}

}  // namespace taxotag
