#pragma once

#include "taxotag/attention.hpp"
#include "taxotag/encoders.hpp"
#include "taxotag/label_index.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace taxotag {

// All trainable state: the content encoder, the pooled projection that maps
// pooled content into label space (used for anchor selection and as the
// content representation when attention is off), and the fusion projections.
// The label encoder is frozen and lives outside the model.
struct Model {
  TinyContentEncoder encoder;
  Mat pooled_proj;        // d_in x d_lab
  FusionWeights fusion;   // d = d_lab

  int d_in() const { return encoder.dim(); }
  int d_lab() const { return static_cast<int>(pooled_proj.cols()); }

  static Model init(const TinyEncoderConfig& enc_cfg, int d_lab, std::uint64_t seed) {
    if (d_lab < 1) throw ConfigError("model: d_lab must be >= 1");
    Model m{TinyContentEncoder(enc_cfg), Mat(), FusionWeights{}};
    Rng rng(mix_seed(seed, 0x900d));
    m.pooled_proj = gaussian_matrix(enc_cfg.dim, d_lab, 1.0 / std::sqrt(double(enc_cfg.dim)), rng);
    m.fusion = FusionWeights::init(d_lab, enc_cfg.dim, d_lab, mix_seed(seed, 0xf051));
    return m;
  }
};

struct ReprOptions {
  bool fused = true;
  int neighborhood_l = 5;
  bool scale_after_softmax = false;
};

// One document's forward pass, with everything the backward pass and the
// diagnostics need.
struct ContentForward {
  ContentEncoding enc;
  TokenTrace trace;
  Vec proj;  // pooled content projected to label space
  bool fused = false;
  AnchorSelection anchor;      // valid when fused
  Neighborhood neighborhood;   // valid when fused
  FusedRepresentation fr;      // valid when fused
  CrossAttendState st;         // valid when fused
  Vec content;                 // the representation used for ranking and loss
};

inline ContentForward represent(const Model& model, const std::string& text,
                                const LabelIndex& index, const ReprOptions& opt) {
  if (index.dim() != model.d_lab())
    throw DimensionMismatchError("represent: index dimension does not match model d_lab");
  ContentForward f;
  auto [enc, trace] = model.encoder.encode_traced(text);
  f.enc = std::move(enc);
  f.trace = std::move(trace);
  f.proj = model.pooled_proj.transpose() * f.enc.pooled;
  if (!opt.fused) {
    f.content = f.proj;
    return f;
  }
  f.fused = true;
  f.anchor = select_anchor_label(f.proj, index);
  // The neighborhood width is capped by the label space; tiny indexes are
  // valid at inference time.
  const int l = std::min(opt.neighborhood_l, index.size());
  f.neighborhood = gather_neighborhood(f.anchor.vector, index, l);
  auto [fr, st] = cross_attend_forward(f.neighborhood.vectors, f.enc.tokens, model.fusion,
                                       opt.scale_after_softmax);
  f.fr = std::move(fr);
  f.st = std::move(st);
  f.content = f.fr.pooled;
  return f;
}

struct ModelGrads {
  TinyEncoderGrads enc;
  Mat d_pooled_proj;
  Mat d_w_q, d_w_k, d_w_v;

  static ModelGrads zeros_like(const Model& m) {
    ModelGrads g;
    g.enc = m.encoder.zero_grads();
    g.d_pooled_proj = Mat::Zero(m.pooled_proj.rows(), m.pooled_proj.cols());
    g.d_w_q = Mat::Zero(m.fusion.w_q.rows(), m.fusion.w_q.cols());
    g.d_w_k = Mat::Zero(m.fusion.w_k.rows(), m.fusion.w_k.cols());
    g.d_w_v = Mat::Zero(m.fusion.w_v.rows(), m.fusion.w_v.cols());
    return g;
  }

  void scale(double s) {
    g_scale(enc.d_embed, s);
    g_scale(enc.d_mix, s);
    g_scale(d_pooled_proj, s);
    g_scale(d_w_q, s);
    g_scale(d_w_k, s);
    g_scale(d_w_v, s);
  }

 private:
  static void g_scale(Mat& m, double s) {
    if (m.size()) m *= s;
  }
};

// dL/d(tokens) induced by a gradient on the pooled vector.
inline Mat pooled_grad_to_tokens(const Vec& d_pooled, Eigen::Index n, Pooling rule) {
  Mat d = Mat::Zero(n, d_pooled.size());
  if (rule == Pooling::First) {
    d.row(0) = d_pooled.transpose();
  } else {
    d.rowwise() = (d_pooled / double(n)).transpose();
  }
  return d;
}

// Pushes dL/d(content) back through the forward pass recorded in `f`.
// Fused path: through the attention projections and the token embeddings
// (anchor selection and the neighborhood are discrete and carry no
// gradient). Pooled path: through the pooled projection and the encoder.
inline void backprop_content(const Model& model, const ContentForward& f, const Vec& d_content,
                             ModelGrads& grads) {
  if (f.fused) {
    const Mat d_per_label = lift_pooled_grad(f.fr.per_label.rows(), d_content);
    const CrossAttendGrads g = cross_attend_backward(f.neighborhood.vectors, f.enc.tokens,
                                                     model.fusion, f.st, d_per_label);
    grads.d_w_q += g.d_w_q;
    grads.d_w_k += g.d_w_k;
    grads.d_w_v += g.d_w_v;
    model.encoder.backward(f.trace, g.d_tokens, grads.enc);
  } else {
    grads.d_pooled_proj += f.enc.pooled * d_content.transpose();
    const Vec d_pooled = model.pooled_proj * d_content;
    const Mat d_tokens =
        pooled_grad_to_tokens(d_pooled, f.enc.tokens.rows(), model.encoder.config().pooling);
    model.encoder.backward(f.trace, d_tokens, grads.enc);
  }
}

}  // namespace taxotag
