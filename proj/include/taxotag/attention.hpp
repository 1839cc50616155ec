#pragma once

#include "taxotag/common.hpp"
#include "taxotag/errors.hpp"
#include "taxotag/label_index.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>
#include <utility>

namespace taxotag {

// The three learnable projections of the label-content cross-attention.
// w_q: d_lab x d, w_k/w_v: d_in x d. The attention width d equals d_lab so
// the fused output stays cosine-comparable with label embeddings.
struct FusionWeights {
  Mat w_q;
  Mat w_k;
  Mat w_v;

  static FusionWeights init(int d_lab, int d_in, int d, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xa77e));
    FusionWeights w;
    w.w_q = gaussian_matrix(d_lab, d, 1.0 / std::sqrt(double(d_lab)), rng);
    w.w_k = gaussian_matrix(d_in, d, 1.0 / std::sqrt(double(d_in)), rng);
    w.w_v = gaussian_matrix(d_in, d, 1.0 / std::sqrt(double(d_in)), rng);
    return w;
  }

  int d() const { return static_cast<int>(w_q.cols()); }
};

// Attention output before and after the label-dimension reduction. `alpha`
// is the weight matrix actually applied to V; in the default mode its rows
// sum to 1.
struct FusedRepresentation {
  Mat per_label;  // l x d
  Vec pooled;     // column mean over the l rows
  Mat alpha;      // l x n
};

struct CrossAttendState {
  Mat q, k, v;
  Mat softmax;  // row-softmax before any post-scaling
  bool scale_after_softmax = false;
};

namespace detail {

inline Mat row_softmax(const Mat& scores) {
  Mat out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double mx = scores.row(r).maxCoeff();
    Eigen::RowVectorXd e = (scores.row(r).array() - mx).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

// dL/d(scores) given dL/d(softmax) and the softmax values, row by row:
// ds_i = p_i * (dp_i - <dp_i, p_i>).
inline Mat row_softmax_backward(const Mat& softmax, const Mat& d_softmax) {
  Mat out(softmax.rows(), softmax.cols());
  for (Eigen::Index r = 0; r < softmax.rows(); ++r) {
    const double dot = d_softmax.row(r).dot(softmax.row(r));
    out.row(r) = softmax.row(r).array() * (d_softmax.row(r).array() - dot);
  }
  return out;
}

inline void check_attend_inputs(const Mat& neighborhood, const Mat& tokens,
                                const FusionWeights& w) {
  if (neighborhood.rows() < 1 || tokens.rows() < 1)
    throw DimensionMismatchError("cross_attend: need at least one label row and one token row");
  if (neighborhood.cols() != w.w_q.rows())
    throw DimensionMismatchError("cross_attend: neighborhood width does not match w_q");
  if (tokens.cols() != w.w_k.rows() || tokens.cols() != w.w_v.rows())
    throw DimensionMismatchError("cross_attend: token width does not match w_k/w_v");
  if (w.w_q.cols() != w.w_k.cols() || w.w_q.cols() != w.w_v.cols())
    throw DimensionMismatchError("cross_attend: projection output widths disagree");
  if (!neighborhood.allFinite() || !tokens.allFinite())
    throw NonFiniteInputError("cross_attend: non-finite input");
  if (!w.w_q.allFinite() || !w.w_k.allFinite() || !w.w_v.allFinite())
    throw NonFiniteInputError("cross_attend: non-finite weights");
}

}  // namespace detail

// Q = neighborhood*w_q, K = tokens*w_k, V = tokens*w_v,
// alpha = softmax(Q K^T / sqrt(d_k)) by default, per_label = alpha*V, and
// pooled = mean over the label dimension. `scale_after_softmax` reproduces
// the variant where the 1/sqrt(d_k) division is applied to the softmax
// output instead of its argument; in that mode alpha rows sum to
// 1/sqrt(d_k), not 1.
inline std::pair<FusedRepresentation, CrossAttendState> cross_attend_forward(
    const Mat& neighborhood, const Mat& tokens, const FusionWeights& w,
    bool scale_after_softmax = false) {
  detail::check_attend_inputs(neighborhood, tokens, w);
  CrossAttendState st;
  st.scale_after_softmax = scale_after_softmax;
  st.q = neighborhood * w.w_q;
  st.k = tokens * w.w_k;
  st.v = tokens * w.w_v;
  const double scale = std::sqrt(double(w.d()));

  FusedRepresentation fr;
  if (scale_after_softmax) {
    st.softmax = detail::row_softmax(st.q * st.k.transpose());
    fr.alpha = st.softmax / scale;
  } else {
    st.softmax = detail::row_softmax((st.q * st.k.transpose()) / scale);
    fr.alpha = st.softmax;
  }
  fr.per_label = fr.alpha * st.v;
  fr.pooled = fr.per_label.colwise().mean().transpose();
  return {std::move(fr), std::move(st)};
}

inline FusedRepresentation cross_attend(const Mat& neighborhood, const Mat& tokens,
                                        const FusionWeights& w, bool scale_after_softmax = false) {
  return cross_attend_forward(neighborhood, tokens, w, scale_after_softmax).first;
}

struct CrossAttendGrads {
  Mat d_w_q, d_w_k, d_w_v;
  Mat d_tokens;
};

// Expands dL/d(pooled) into dL/d(per_label): the mean over l rows gives each
// row 1/l of the pooled gradient.
inline Mat lift_pooled_grad(Eigen::Index l, const Vec& d_pooled) {
  Mat d(l, d_pooled.size());
  d.rowwise() = (d_pooled / double(l)).transpose();
  return d;
}

inline CrossAttendGrads cross_attend_backward(const Mat& neighborhood, const Mat& tokens,
                                              const FusionWeights& w, const CrossAttendState& st,
                                              const Mat& d_per_label) {
  const double scale = std::sqrt(double(w.d()));
  const Mat alpha = st.scale_after_softmax ? Mat(st.softmax / scale) : st.softmax;

  const Mat d_alpha = d_per_label * st.v.transpose();
  const Mat d_v = alpha.transpose() * d_per_label;

  Mat d_soft = st.scale_after_softmax ? Mat(d_alpha / scale) : d_alpha;
  Mat d_scores = detail::row_softmax_backward(st.softmax, d_soft);
  if (!st.scale_after_softmax) d_scores /= scale;  // scores were (Q K^T)/scale

  const Mat d_q = d_scores * st.k;
  const Mat d_k = d_scores.transpose() * st.q;

  CrossAttendGrads g;
  g.d_w_q = neighborhood.transpose() * d_q;
  g.d_w_k = tokens.transpose() * d_k;
  g.d_w_v = tokens.transpose() * d_v;
  g.d_tokens = d_k * w.w_k.transpose() + d_v * w.w_v.transpose();
  return g;
}

struct AnchorSelection {
  TaxonomyPath label;
  Vec vector;
  int pos = -1;
  double score = 0.0;
};

// The single label whose embedding maximizes cosine with the content
// representation. Recomputed on every call: the selection depends on the
// current model parameters and must track them during training.
inline AnchorSelection select_anchor_label(const Vec& content_vec, const LabelIndex& index) {
  if (index.size() == 0) throw EmptyIndexError("select_anchor_label: index is empty");
  const auto top = index.top_k_cosine(content_vec, 1);
  AnchorSelection a;
  a.label = top.front().label;
  a.pos = top.front().pos;
  a.score = top.front().score;
  a.vector = index.entry(a.pos).vector;
  return a;
}

// The l labels nearest to the anchor by euclidean distance (the anchor's own
// label included when it is an index entry), rows in ascending distance.
inline Neighborhood gather_neighborhood(const Vec& anchor_vec, const LabelIndex& index, int l) {
  return index.top_k_euclidean(anchor_vec, l);
}

// Largest singular value.
inline double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

struct BoundGap {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Attention-difference bound for two label queries: the distance between
// their softmax attention rows is bounded by the euclidean distance between
// the label embeddings times the spectral norms of w_q and K (softmax is
// 1-Lipschitz). Returns both sides so callers can assert lhs <= rhs.
inline BoundGap attention_bound_gap(const Vec& label_i, const Vec& label_j, const Mat& tokens,
                                    const FusionWeights& w) {
  if (label_i.size() != w.w_q.rows() || label_j.size() != w.w_q.rows())
    throw DimensionMismatchError("attention_bound_gap: label width does not match w_q");
  if (tokens.cols() != w.w_k.rows())
    throw DimensionMismatchError("attention_bound_gap: token width does not match w_k");
  if (!label_i.allFinite() || !label_j.allFinite() || !tokens.allFinite())
    throw NonFiniteInputError("attention_bound_gap: non-finite input");

  const Mat k = tokens * w.w_k;
  const Vec q_i = w.w_q.transpose() * label_i;
  const Vec q_j = w.w_q.transpose() * label_j;
  const Mat p_i = detail::row_softmax((k * q_i).transpose());
  const Mat p_j = detail::row_softmax((k * q_j).transpose());

  BoundGap out;
  out.lhs = (p_i - p_j).norm();
  out.rhs = (label_i - label_j).norm() * spectral_norm(w.w_q) * spectral_norm(k);
  return out;
}

}  // namespace taxotag
