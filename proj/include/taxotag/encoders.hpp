#pragma once

#include "taxotag/common.hpp"
#include "taxotag/errors.hpp"
#include "taxotag/taxonomy.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace taxotag {

enum class Pooling { Mean, First };

inline const char* pooling_name(Pooling p) { return p == Pooling::Mean ? "mean" : "first"; }

inline Pooling parse_pooling(std::string_view s) {
  if (s == "mean") return Pooling::Mean;
  if (s == "first") return Pooling::First;
  throw ConfigError("unknown pooling rule \"" + std::string(s) + "\" (expected mean|first)");
}

// Per-token embedding matrix (n x d_in) plus the pooled vector for one text.
struct ContentEncoding {
  Mat tokens;
  Vec pooled;
};

inline Vec pool_tokens(const Mat& tokens, Pooling rule) {
  if (rule == Pooling::First) return tokens.row(0).transpose();
  return tokens.colwise().mean().transpose();
}

// Frozen sentence encoder interface (paper-side: the label tower).
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual Vec encode(const std::string& text) const = 0;
  virtual int dim() const = 0;
  virtual std::string identifier() const = 0;
};

struct HashEncoderConfig {
  int dim = 48;
  std::uint64_t seed = 11;
};

// Deterministic bag-of-tokens sentence encoder: each token maps to a fixed
// pseudo-random gaussian vector derived from its hash, combined with a mild
// positional weight so reorderings of the same tokens stay distinguishable.
// Compositional by construction, which is what makes unseen recombinations of
// seen tokens land in sensible regions of the space. Frozen: no parameters.
class HashSentenceEncoder final : public SentenceEncoder {
 public:
  explicit HashSentenceEncoder(HashEncoderConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.dim < 1) throw ConfigError("sentence encoder dim must be >= 1");
  }

  Vec encode(const std::string& text) const override {
    const std::vector<std::string> tokens = tokenize_words(text);
    if (tokens.empty()) throw EncoderFailure("sentence encoder got no tokens from \"" + text + "\"");
    Vec acc = Vec::Zero(cfg_.dim);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      Rng rng(mix_seed(cfg_.seed, fnv1a64(tokens[i])));
      const double w = 1.0 + 0.05 * static_cast<double>(i);
      for (int d = 0; d < cfg_.dim; ++d) acc(d) += w * rng.gaussian();
    }
    return acc / static_cast<double>(tokens.size());
  }

  int dim() const override { return cfg_.dim; }

  std::string identifier() const override {
    return "hashsent-v1(d=" + std::to_string(cfg_.dim) + ",seed=" + std::to_string(cfg_.seed) + ")";
  }

 private:
  HashEncoderConfig cfg_;
};

struct LabelEmbedding {
  TaxonomyPath label;
  Vec vector;
};

inline LabelEmbedding encode_label(const SentenceEncoder& encoder, const TaxonomyPath& path) {
  return LabelEmbedding{path, encoder.encode(taxonomy_to_sequence(path))};
}

// Memoizes label embeddings for a frozen encoder. Safe for concurrent reads.
class LabelEmbeddingCache {
 public:
  explicit LabelEmbeddingCache(const SentenceEncoder& encoder) : encoder_(encoder) {}

  const Vec& get(const TaxonomyPath& path) const {
    const std::string key = path.sequence();
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, encoder_.encode(key)).first;
    return it->second;
  }

 private:
  const SentenceEncoder& encoder_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, Vec> cache_;
};

// Trainable content encoder interface (paper-side: the content tower).
class ContentEncoder {
 public:
  virtual ~ContentEncoder() = default;
  virtual ContentEncoding encode(const std::string& text) const = 0;
  virtual int dim() const = 0;
  virtual int context_limit() const = 0;
  virtual std::string identifier() const = 0;
};

struct TinyEncoderConfig {
  int dim = 32;
  int vocab = 4096;
  int context_limit = 64;
  Pooling pooling = Pooling::Mean;
  bool context_mix = true;
  std::uint64_t seed = 7;
};

// Forward-pass bookkeeping the encoder needs to push gradients back into its
// parameters: the hashed bucket per kept token and the mean token embedding
// at forward time.
struct TokenTrace {
  std::vector<int> buckets;
  Vec mean_embed;
};

struct TinyEncoderGrads {
  Mat d_embed;
  Mat d_mix;
};

// Tiny randomly initialized trainable encoder for desk-scale runs: a hashed
// token embedding table plus an optional context-mixing map that adds a
// learned transform of the mean token embedding to every token (making each
// token vector depend on its context). Gradients flow into both tables.
class TinyContentEncoder final : public ContentEncoder {
 public:
  explicit TinyContentEncoder(TinyEncoderConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.dim < 1 || cfg_.vocab < 1 || cfg_.context_limit < 1)
      throw ConfigError("tiny encoder dims/vocab/context_limit must be >= 1");
    Rng rng(mix_seed(cfg_.seed, 0xe0c0de));
    embed_ = gaussian_matrix(cfg_.vocab, cfg_.dim, 1.0 / std::sqrt(double(cfg_.dim)), rng);
    if (cfg_.context_mix)
      mix_ = gaussian_matrix(cfg_.dim, cfg_.dim, 0.1 / std::sqrt(double(cfg_.dim)), rng);
    else
      mix_ = Mat::Zero(0, 0);
  }

  int bucket(const std::string& token) const {
    return static_cast<int>(fnv1a64(token) % static_cast<std::uint64_t>(cfg_.vocab));
  }

  std::pair<ContentEncoding, TokenTrace> encode_traced(const std::string& text) const {
    std::vector<std::string> words = tokenize_words(text);
    if (words.empty()) throw EncoderFailure("content encoder got no tokens from input text");
    if (static_cast<int>(words.size()) > cfg_.context_limit)
      words.resize(static_cast<std::size_t>(cfg_.context_limit));

    const int n = static_cast<int>(words.size());
    TokenTrace trace;
    trace.buckets.reserve(words.size());
    Mat raw(n, cfg_.dim);
    for (int i = 0; i < n; ++i) {
      const int b = bucket(words[static_cast<std::size_t>(i)]);
      trace.buckets.push_back(b);
      raw.row(i) = embed_.row(b);
    }
    trace.mean_embed = raw.colwise().mean().transpose();

    ContentEncoding enc;
    if (cfg_.context_mix) {
      const Vec ctx = mix_ * trace.mean_embed;
      enc.tokens = raw.rowwise() + ctx.transpose();
    } else {
      enc.tokens = raw;
    }
    enc.pooled = pool_tokens(enc.tokens, cfg_.pooling);
    return {std::move(enc), std::move(trace)};
  }

  ContentEncoding encode(const std::string& text) const override {
    return encode_traced(text).first;
  }

  // d_tokens is dL/d(enc.tokens); accumulates into `grads`.
  void backward(const TokenTrace& trace, const Mat& d_tokens, TinyEncoderGrads& grads) const {
    const int n = static_cast<int>(trace.buckets.size());
    Mat d_raw = d_tokens;
    if (cfg_.context_mix) {
      const Vec g = d_tokens.colwise().sum().transpose();  // dL/d(ctx)
      grads.d_mix += g * trace.mean_embed.transpose();
      const Vec d_mean = mix_.transpose() * g;
      d_raw.rowwise() += (d_mean / double(n)).transpose();
    }
    for (int i = 0; i < n; ++i) grads.d_embed.row(trace.buckets[static_cast<std::size_t>(i)]) += d_raw.row(i);
  }

  TinyEncoderGrads zero_grads() const {
    TinyEncoderGrads g;
    g.d_embed = Mat::Zero(cfg_.vocab, cfg_.dim);
    g.d_mix = cfg_.context_mix ? Mat::Zero(cfg_.dim, cfg_.dim) : Mat::Zero(0, 0);
    return g;
  }

  int dim() const override { return cfg_.dim; }
  int context_limit() const override { return cfg_.context_limit; }
  const TinyEncoderConfig& config() const { return cfg_; }

  Mat& embed() { return embed_; }
  const Mat& embed() const { return embed_; }
  Mat& mix() { return mix_; }
  const Mat& mix() const { return mix_; }
  bool has_mix() const { return cfg_.context_mix; }

  std::string identifier() const override {
    return "tiny-v1(d=" + std::to_string(cfg_.dim) + ",vocab=" + std::to_string(cfg_.vocab) +
           ",ctx=" + std::to_string(cfg_.context_limit) + ",pool=" + pooling_name(cfg_.pooling) +
           ",mix=" + (cfg_.context_mix ? "1" : "0") + ",seed=" + std::to_string(cfg_.seed) + ")";
  }

 private:
  TinyEncoderConfig cfg_;
  Mat embed_;  // vocab x dim
  Mat mix_;    // dim x dim when context_mix, else 0x0
};

}  // namespace taxotag
