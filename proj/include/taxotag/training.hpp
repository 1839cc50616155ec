#pragma once

#include "taxotag/corpus.hpp"
#include "taxotag/evaluate.hpp"
#include "taxotag/loss.hpp"
#include "taxotag/model.hpp"
#include "taxotag/negatives.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace taxotag {

enum class NegativeMode { Hard, Random };

inline const char* negative_mode_name(NegativeMode m) {
  return m == NegativeMode::Hard ? "hard" : "random";
}

inline NegativeMode parse_negative_mode(std::string_view s) {
  if (s == "hard") return NegativeMode::Hard;
  if (s == "random") return NegativeMode::Random;
  throw ConfigError("unknown negative mode \"" + std::string(s) + "\" (expected hard|random)");
}

struct TrainConfig {
  double margin = 0.1;
  int hard_neg_k = 5;
  NegativeMode negative_mode = NegativeMode::Hard;
  bool attention_enabled = true;
  int neighborhood_l = 5;
  int batch_size = 16;
  int epochs = 10;
  double learning_rate = 0.02;
  std::uint64_t seed = 1234;
  bool scale_after_softmax = false;
  InferenceMode inference_mode = InferenceMode::Fused;
  std::vector<int> eval_ks = {1, 3, 5};
  bool diagnostics = false;
  std::vector<std::string> track_ids;

  void validate() const {
    if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("margin must be in (0, 1)");
    if (hard_neg_k < 1) throw ConfigError("hard_neg_k must be >= 1");
    if (hard_neg_k >= batch_size)
      throw ConfigError("hard_neg_k must be smaller than batch_size (k < batch_size)");
    if (neighborhood_l < 1) throw ConfigError("neighborhood_l must be >= 1");
    if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (eval_ks.empty()) throw ConfigError("eval_ks must not be empty");
    for (int k : eval_ks)
      if (k < 1) throw ConfigError("eval_ks entries must be >= 1");
    if (!attention_enabled && inference_mode == InferenceMode::Fused)
      throw ConfigError(
          "inference_mode=fused requires attention; use inference_mode=pooled when attention is "
          "disabled");
  }

  InferenceOptions inference_options() const {
    InferenceOptions o;
    o.mode = inference_mode;
    o.neighborhood_l = neighborhood_l;
    o.scale_after_softmax = scale_after_softmax;
    return o;
  }
};

struct EpochMetrics {
  int epoch = 0;
  double mean_loss = 0.0;
  std::map<int, double> recall;  // validation R@k; empty when no val split

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["epoch"] = epoch;
    j["mean_loss"] = mean_loss;
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [k, v] : recall) r[std::to_string(k)] = v;
    j["recall"] = std::move(r);
    return j;
  }
};

// One structured diagnostics record: for a tracked document at a given
// epoch, the top sampled negatives (kind = "negatives") or the attention
// neighborhood (kind = "attention_tags"), each as (label sequence, score).
struct DiagnosticRecord {
  int epoch = 0;
  std::string doc_id;
  std::string kind;
  std::vector<std::pair<std::string, double>> items;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["epoch"] = epoch;
    j["doc_id"] = doc_id;
    j["kind"] = kind;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [label, score] : items) arr.push_back({{"label", label}, {"score", score}});
    j["items"] = std::move(arr);
    return j;
  }
};

// Adam over one parameter matrix.
class AdamState {
 public:
  void init(const Mat& param) {
    m_ = Mat::Zero(param.rows(), param.cols());
    v_ = Mat::Zero(param.rows(), param.cols());
  }

  void step(Mat& param, const Mat& grad, double lr, long t) {
    if (param.size() == 0) return;
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    m_ = beta1 * m_ + (1.0 - beta1) * grad;
    v_ = beta2 * v_ + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1, double(t));
    const double bc2 = 1.0 - std::pow(beta2, double(t));
    param.array() -= lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps);
  }

 private:
  Mat m_, v_;
};

struct TrainResult {
  Model model;  // best checkpoint by validation R@1 (last epoch when no val split)
  LabelIndex index;
  std::vector<EpochMetrics> metrics;
  std::vector<DiagnosticRecord> diagnostics;
  int best_epoch = 0;
};

// Everything a per-step observer can see. Observers are for tests and
// instrumentation (e.g. shadow-checking the negative sampler on every batch);
// they must not mutate training state.
struct StepObservation {
  int epoch;
  const Document& doc;
  const Vec& content;
  const std::vector<LabelEmbedding>& pool;
  const std::vector<LabelEmbedding>& negatives;
  double loss;
};
using StepObserver = std::function<void(const StepObservation&)>;

namespace detail {

inline std::vector<LabelEmbedding> batch_label_pool(const Corpus& corpus,
                                                    const std::vector<int>& batch,
                                                    const LabelIndex& index) {
  std::vector<LabelEmbedding> pool;
  std::unordered_set<std::string> seen;
  for (int i : batch) {
    const TaxonomyPath& gold = corpus.docs()[static_cast<std::size_t>(i)].gold;
    if (seen.insert(gold.sequence()).second)
      pool.push_back(LabelEmbedding{gold, index.vector_of(gold)});
  }
  return pool;
}

inline DiagnosticRecord negatives_record(int epoch, const std::string& doc_id, const Vec& content,
                                         const std::vector<LabelEmbedding>& negatives) {
  DiagnosticRecord rec;
  rec.epoch = epoch;
  rec.doc_id = doc_id;
  rec.kind = "negatives";
  std::vector<std::pair<std::string, double>> scored;
  for (const auto& n : negatives) scored.emplace_back(n.label.sequence(), cosine(content, n.vector));
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  if (scored.size() > 3) scored.resize(3);
  rec.items = std::move(scored);
  return rec;
}

inline DiagnosticRecord tags_record(int epoch, const std::string& doc_id,
                                    const Neighborhood& neigh) {
  DiagnosticRecord rec;
  rec.epoch = epoch;
  rec.doc_id = doc_id;
  rec.kind = "attention_tags";
  const std::size_t upto = std::min<std::size_t>(3, neigh.labels.size());
  for (std::size_t r = 0; r < upto; ++r)
    rec.items.emplace_back(neigh.labels[r].sequence(), neigh.distances[r]);
  return rec;
}

// Attention-approximation audit: the bound gap between the nearest and the
// farthest label sampled into the neighborhood, against this document's
// tokens.
inline DiagnosticRecord bound_record(int epoch, const std::string& doc_id,
                                     const ContentForward& fwd, const FusionWeights& w) {
  DiagnosticRecord rec;
  rec.epoch = epoch;
  rec.doc_id = doc_id;
  rec.kind = "bound_check";
  const Eigen::Index last = fwd.neighborhood.vectors.rows() - 1;
  const BoundGap gap = attention_bound_gap(fwd.neighborhood.vectors.row(0).transpose(),
                                           fwd.neighborhood.vectors.row(last).transpose(),
                                           fwd.enc.tokens, w);
  rec.items.emplace_back("lhs", gap.lhs);
  rec.items.emplace_back("rhs", gap.rhs);
  rec.items.emplace_back("margin", gap.rhs - gap.lhs);
  return rec;
}

}  // namespace detail

// Contrastive training: per step, encode the batch, build the content
// representation (fused cross-attention or pooled projection), sample
// in-batch negatives per the configured mode, take the hinge rank loss
// against the gold label embedding, and update the content-side weights.
// The label encoder (and hence the index) is never touched. Deterministic
// for a fixed config: identical runs produce identical loss traces.
inline TrainResult train(const Corpus& corpus, const TrainConfig& cfg,
                         const TinyEncoderConfig& enc_cfg, const HashEncoderConfig& lab_cfg,
                         const std::vector<TaxonomyPath>& extra_labels = {},
                         const StepObserver& observer = {}) {
  cfg.validate();
  const std::vector<int>& train_idx = corpus.split_indices(Split::Train);
  if (train_idx.empty()) throw ConfigError("train: the train split is empty");

  HashSentenceEncoder label_encoder(lab_cfg);
  std::vector<TaxonomyPath> label_space = corpus.split_labels(Split::Train);
  label_space.insert(label_space.end(), extra_labels.begin(), extra_labels.end());
  TrainResult res{Model::init(enc_cfg, lab_cfg.dim, cfg.seed),
                  LabelIndex::build(std::move(label_space), label_encoder),
                  {},
                  {},
                  0};
  Model& model = res.model;
  const LabelIndex& index = res.index;

  const bool has_val = !corpus.split_indices(Split::Val).empty();
  const std::unordered_set<std::string> tracked(cfg.track_ids.begin(), cfg.track_ids.end());

  ReprOptions ropt;
  ropt.fused = cfg.attention_enabled;
  ropt.neighborhood_l = cfg.neighborhood_l;
  ropt.scale_after_softmax = cfg.scale_after_softmax;

  AdamState opt_embed, opt_mix, opt_proj, opt_q, opt_k, opt_v;
  opt_embed.init(model.encoder.embed());
  opt_mix.init(model.encoder.mix());
  opt_proj.init(model.pooled_proj);
  opt_q.init(model.fusion.w_q);
  opt_k.init(model.fusion.w_k);
  opt_v.init(model.fusion.w_v);

  Rng neg_rng(mix_seed(cfg.seed, 0x4e59));
  Model best = model;
  double best_r1 = -1.0;
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<int> order = train_idx;
    Rng order_rng(mix_seed(cfg.seed, 0x0e0c + static_cast<std::uint64_t>(epoch)));
    order_rng.shuffle(order);

    double loss_sum = 0.0;
    int used = 0;

    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      const std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                   order.begin() + static_cast<std::ptrdiff_t>(end));
      const std::vector<LabelEmbedding> pool = detail::batch_label_pool(corpus, batch, index);

      ModelGrads grads = ModelGrads::zeros_like(model);
      int batch_used = 0;

      for (int i : batch) {
        const Document& doc = corpus.docs()[static_cast<std::size_t>(i)];
        const ContentForward fwd = represent(model, model_input_text(doc), index, ropt);
        std::vector<LabelEmbedding> negatives =
            cfg.negative_mode == NegativeMode::Hard
                ? sample_hard_negatives(fwd.content, pool, doc.gold, cfg.hard_neg_k)
                : sample_random_negatives(pool, doc.gold, cfg.hard_neg_k, neg_rng);
        if (negatives.empty()) continue;  // batch held no distinct non-gold label

        std::vector<Vec> neg_vecs;
        neg_vecs.reserve(negatives.size());
        for (const auto& n : negatives) neg_vecs.push_back(n.vector);
        const HingeLossResult hl =
            hinge_rank_loss_with_grad(fwd.content, index.vector_of(doc.gold), neg_vecs, cfg.margin);
        loss_sum += hl.loss;
        ++used;
        ++batch_used;
        backprop_content(model, fwd, hl.d_content, grads);

        if (observer) observer(StepObservation{epoch, doc, fwd.content, pool, negatives, hl.loss});
        if (cfg.diagnostics && tracked.count(doc.id)) {
          res.diagnostics.push_back(detail::negatives_record(epoch, doc.id, fwd.content, negatives));
          if (fwd.fused) {
            res.diagnostics.push_back(detail::tags_record(epoch, doc.id, fwd.neighborhood));
            res.diagnostics.push_back(detail::bound_record(epoch, doc.id, fwd, model.fusion));
          }
        }
      }

      if (batch_used == 0) continue;
      grads.scale(1.0 / double(batch_used));
      ++step;
      opt_embed.step(model.encoder.embed(), grads.enc.d_embed, cfg.learning_rate, step);
      if (model.encoder.has_mix()) opt_mix.step(model.encoder.mix(), grads.enc.d_mix, cfg.learning_rate, step);
      opt_proj.step(model.pooled_proj, grads.d_pooled_proj, cfg.learning_rate, step);
      opt_q.step(model.fusion.w_q, grads.d_w_q, cfg.learning_rate, step);
      opt_k.step(model.fusion.w_k, grads.d_w_k, cfg.learning_rate, step);
      opt_v.step(model.fusion.w_v, grads.d_w_v, cfg.learning_rate, step);
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.mean_loss = used ? loss_sum / double(used) : 0.0;
    if (has_val) {
      const EvalReport r =
          evaluate(corpus, Split::Val, model, index, cfg.eval_ks, cfg.inference_options());
      em.recall = r.recall;
      const double r1 = em.recall.count(1) ? em.recall.at(1) : em.recall.begin()->second;
      if (r1 > best_r1) {
        best_r1 = r1;
        best = model;
        res.best_epoch = epoch;
      }
    }
    res.metrics.push_back(std::move(em));
  }

  if (has_val && cfg.epochs > 0) {
    res.model = best;
  } else {
    res.best_epoch = cfg.epochs;
  }
  return res;
}

}  // namespace taxotag
