#pragma once

#include "taxotag/corpus.hpp"
#include "taxotag/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace taxotag {

enum class InferenceMode { Fused, Pooled };

inline const char* inference_mode_name(InferenceMode m) {
  return m == InferenceMode::Fused ? "fused" : "pooled";
}

inline InferenceMode parse_inference_mode(std::string_view s) {
  if (s == "fused") return InferenceMode::Fused;
  if (s == "pooled") return InferenceMode::Pooled;
  throw ConfigError("unknown inference mode \"" + std::string(s) + "\" (expected fused|pooled)");
}

struct InferenceOptions {
  InferenceMode mode = InferenceMode::Fused;
  int neighborhood_l = 5;
  bool scale_after_softmax = false;
};

struct RankedPrediction {
  std::string id;
  std::vector<ScoredLabel> ranked;  // scores non-increasing, labels distinct
};

// Ranks index labels against the document representation: fused mode applies
// anchor selection + cross-attention exactly as in training; pooled mode
// ranks by the pooled-projected content directly.
inline RankedPrediction tag_document(const Model& model, const LabelIndex& index,
                                     const std::string& text, int k,
                                     const InferenceOptions& opt = {},
                                     const std::string& id = "") {
  if (k < 1) throw ConfigError("tag_document: k must be >= 1");
  if (index.size() == 0) throw EmptyIndexError("tag_document: empty label index");
  ReprOptions ropt;
  ropt.fused = (opt.mode == InferenceMode::Fused);
  ropt.neighborhood_l = opt.neighborhood_l;
  ropt.scale_after_softmax = opt.scale_after_softmax;
  const ContentForward f = represent(model, text, index, ropt);
  RankedPrediction pred;
  pred.id = id;
  pred.ranked = index.top_k_cosine(f.content, k);
  return pred;
}

// Fraction of documents whose gold path appears among the top-k predictions
// (exact canonical path equality).
inline double recall_at_k(const std::vector<RankedPrediction>& predictions,
                          const std::vector<TaxonomyPath>& golds, int k) {
  if (predictions.size() != golds.size())
    throw LengthMismatchError("recall_at_k: " + std::to_string(predictions.size()) +
                              " predictions vs " + std::to_string(golds.size()) + " golds");
  if (k < 1) throw ConfigError("recall_at_k: k must be >= 1");
  if (predictions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& ranked = predictions[i].ranked;
    const std::size_t upto = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.size());
    for (std::size_t r = 0; r < upto; ++r) {
      if (ranked[r].label == golds[i]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

struct EvalReport {
  std::map<int, double> recall;  // k -> R@k
  int count = 0;
  std::string config_fingerprint;
  std::string checkpoint_id;

  nlohmann::json to_json() const {
    nlohmann::json j;
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [k, v] : recall) r[std::to_string(k)] = v;
    j["recall"] = std::move(r);
    j["count"] = count;
    j["config_fingerprint"] = config_fingerprint;
    j["checkpoint_id"] = checkpoint_id;
    return j;
  }
};

inline std::vector<RankedPrediction> tag_batch(const std::vector<std::string>& texts,
                                               const std::vector<std::string>& ids,
                                               const Model& model, const LabelIndex& index, int k,
                                               const InferenceOptions& opt = {}) {
  if (texts.size() != ids.size()) throw LengthMismatchError("tag_batch: texts/ids length mismatch");
  std::vector<RankedPrediction> preds;
  preds.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    preds.push_back(tag_document(model, index, texts[i], k, opt, ids[i]));
  return preds;
}

inline EvalReport evaluate_texts(const std::vector<std::string>& texts,
                                 const std::vector<TaxonomyPath>& golds, const Model& model,
                                 const LabelIndex& index, const std::vector<int>& ks,
                                 const InferenceOptions& opt = {},
                                 std::vector<RankedPrediction>* predictions_out = nullptr,
                                 const std::vector<std::string>* ids = nullptr) {
  if (texts.empty()) throw EmptyBatchError("evaluate: no documents to evaluate");
  if (texts.size() != golds.size())
    throw LengthMismatchError("evaluate: texts/golds length mismatch");
  if (ks.empty()) throw ConfigError("evaluate: need at least one k");
  const int max_k = *std::max_element(ks.begin(), ks.end());
  std::vector<std::string> default_ids;
  if (!ids) {
    for (std::size_t i = 0; i < texts.size(); ++i) default_ids.push_back(std::to_string(i));
    ids = &default_ids;
  }
  std::vector<RankedPrediction> preds = tag_batch(texts, *ids, model, index, max_k, opt);
  EvalReport report;
  report.count = static_cast<int>(texts.size());
  for (int k : ks) report.recall[k] = recall_at_k(preds, golds, k);
  if (predictions_out) *predictions_out = std::move(preds);
  return report;
}

inline EvalReport evaluate(const Corpus& corpus, Split split, const Model& model,
                           const LabelIndex& index, const std::vector<int>& ks,
                           const InferenceOptions& opt = {},
                           std::vector<RankedPrediction>* predictions_out = nullptr) {
  std::vector<std::string> texts;
  std::vector<std::string> ids;
  std::vector<TaxonomyPath> golds;
  for (int i : corpus.split_indices(split)) {
    const Document& d = corpus.docs()[static_cast<std::size_t>(i)];
    texts.push_back(model_input_text(d));
    ids.push_back(d.id);
    golds.push_back(d.gold);
  }
  if (texts.empty())
    throw EmptyBatchError(std::string("evaluate: split \"") + split_name(split) + "\" is empty");
  return evaluate_texts(texts, golds, model, index, ks, opt, predictions_out, &ids);
}

// Zero-shot flow: out-of-domain short texts against an existing checkpoint
// and index, no additional training. Same pipeline as evaluate; the paper
// protocol reports R@1 and R@2.
inline EvalReport zero_shot_evaluate(const std::vector<std::string>& texts,
                                     const std::vector<TaxonomyPath>& golds, const Model& model,
                                     const LabelIndex& index,
                                     const std::vector<int>& ks = {1, 2},
                                     const InferenceOptions& opt = {}) {
  return evaluate_texts(texts, golds, model, index, ks, opt);
}

inline void write_report(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write report file " + path.string());
  out << report.to_json().dump(2) << "\n";
}

// Audit dump: one record per document with its top-k labels and scores.
inline void write_predictions(const std::vector<RankedPrediction>& predictions,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write predictions file " + path.string());
  for (const RankedPrediction& p : predictions) {
    nlohmann::json rec;
    rec["id"] = p.id;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : p.ranked)
      arr.push_back({{"label", s.label.levels()}, {"score", s.score}});
    rec["predictions"] = std::move(arr);
    out << rec.dump() << "\n";
  }
}

}  // namespace taxotag
