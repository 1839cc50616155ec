#pragma once

#include "taxotag/common.hpp"
#include "taxotag/corpus.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace taxotag {

// Template corpus for desk-scale runs: documents whose tokens embed their
// gold label's tokens plus noise words. Labels are (subject, chapter) family
// pairs crossed with a topic pool shared across families, so discrimination
// requires combining family and topic evidence. One combination per family is
// held out of the label space, giving unseen-but-composable labels for
// open-set tests.
struct SynthConfig {
  int families = 8;          // capped at the built-in family list
  int topics_per_family = 5; // capped at pool size - 1 (one combo held out)
  int train_docs = 400;
  int heldout_docs = 100;    // emitted with split=val
  int noise_tokens = 8;
  int topic_repeats = 1;
  double answer_prob = 0.3;
  std::uint64_t seed = 42;
};

namespace synth_detail {

inline const std::vector<std::pair<std::string, std::string>>& families() {
  static const std::vector<std::pair<std::string, std::string>> f = {
      {"science", "physics"},  {"science", "chemistry"}, {"science", "biology"},
      {"science", "astronomy"}, {"math", "algebra"},     {"math", "geometry"},
      {"math", "calculus"},    {"math", "statistics"}};
  return f;
}

inline const std::vector<std::string>& topic_pool() {
  static const std::vector<std::string> t = {"foundations",  "applications", "experiments",
                                             "calculations", "notation",     "measurement"};
  return t;
}

struct FamilyTopics {
  int families = 0;
  int pool_n = 0;  // topics considered per family; index (f % pool_n) is held out
};

inline FamilyTopics plan(const SynthConfig& cfg) {
  FamilyTopics p;
  p.families = std::min<int>(cfg.families, static_cast<int>(families().size()));
  p.pool_n = std::min<int>(cfg.topics_per_family + 1, static_cast<int>(topic_pool().size()));
  return p;
}

inline const std::vector<std::string>& noise_vocab() {
  static const std::vector<std::string> words = {
      "the",     "value",   "of",       "which",  "best",   "describes", "given",  "find",
      "state",   "explain", "why",      "does",   "a",      "an",        "object", "system",
      "measure", "unit",    "result",   "answer", "select", "option",    "case",   "shown",
      "figure",  "example", "consider", "small",  "large",  "common",    "basic",  "general",
      "true",    "about",   "between",  "under",  "above",  "below",     "model",  "method",
      "process", "change",  "constant", "applied", "total",  "initial",  "final",  "correct",
      "reason",  "compare", "observe",  "known",  "simple", "standard",  "typical", "main"};
  return words;
}

}  // namespace synth_detail

inline std::vector<TaxonomyPath> synthetic_labels(const SynthConfig& cfg = {}) {
  const auto& fams = synth_detail::families();
  const auto& pool = synth_detail::topic_pool();
  const auto p = synth_detail::plan(cfg);
  std::vector<TaxonomyPath> labels;
  for (int f = 0; f < p.families; ++f) {
    for (int t = 0; t < p.pool_n; ++t) {
      if (t == f % p.pool_n) continue;  // held out for unseen-label tests
      labels.push_back(TaxonomyPath::make(fams[static_cast<std::size_t>(f)].first,
                                          fams[static_cast<std::size_t>(f)].second,
                                          pool[static_cast<std::size_t>(t)]));
    }
  }
  return labels;
}

// The family/topic combinations excluded from the label space: valid paths
// built entirely from tokens the corpus contains, but never seen as labels.
inline std::vector<TaxonomyPath> synthetic_unseen_labels(const SynthConfig& cfg = {}) {
  const auto& fams = synth_detail::families();
  const auto& pool = synth_detail::topic_pool();
  const auto p = synth_detail::plan(cfg);
  std::vector<TaxonomyPath> labels;
  for (int f = 0; f < p.families; ++f)
    labels.push_back(TaxonomyPath::make(fams[static_cast<std::size_t>(f)].first,
                                        fams[static_cast<std::size_t>(f)].second,
                                        pool[static_cast<std::size_t>(f % p.pool_n)]));
  return labels;
}

// Question text whose tokens embed the label's tokens plus noise words,
// shuffled. Shared by the corpus generator and by unseen-label fixtures.
inline std::string synthetic_question(const TaxonomyPath& label, int noise_tokens,
                                      int topic_repeats, Rng& rng) {
  const auto& noise = synth_detail::noise_vocab();
  std::vector<std::string> words;
  words.push_back(label.subject());
  words.push_back(label.chapter());
  for (int r = 0; r < std::max(1, topic_repeats); ++r) words.push_back(label.topic());
  for (int i = 0; i < noise_tokens; ++i)
    words.push_back(noise[static_cast<std::size_t>(rng.below(noise.size()))]);
  rng.shuffle(words);
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) text.push_back(' ');
    text += words[i];
  }
  return text;
}

inline Corpus make_synthetic_corpus(const SynthConfig& cfg = {}) {
  const std::vector<TaxonomyPath> labels = synthetic_labels(cfg);
  Rng rng(mix_seed(cfg.seed, 0x5e7));
  std::vector<Document> docs;
  const int total = cfg.train_docs + cfg.heldout_docs;
  for (int i = 0; i < total; ++i) {
    const TaxonomyPath& label = labels[static_cast<std::size_t>(i) % labels.size()];
    Document d;
    d.split = i < cfg.train_docs ? Split::Train : Split::Val;
    d.id = std::string(d.split == Split::Train ? "train-" : "val-") + std::to_string(i);
    d.question = synthetic_question(label, cfg.noise_tokens, cfg.topic_repeats, rng);
    if (rng.uniform() < cfg.answer_prob) {
      const auto& noise = synth_detail::noise_vocab();
      d.answer = noise[static_cast<std::size_t>(rng.below(noise.size()))] + " " + label.chapter();
    }
    d.gold = label;
    docs.push_back(std::move(d));
  }
  return Corpus::from_documents(std::move(docs));
}

// Short out-of-domain texts over seen labels, built from a template never
// used by the corpus generator (zero-shot fixtures).
inline std::pair<std::vector<std::string>, std::vector<TaxonomyPath>> make_objective_texts(
    const std::vector<TaxonomyPath>& labels, int count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x0b1));
  std::vector<std::string> texts;
  std::vector<TaxonomyPath> golds;
  for (int i = 0; i < count; ++i) {
    const TaxonomyPath& label = labels[static_cast<std::size_t>(i) % labels.size()];
    std::string text = "understand " + label.topic() + " concepts in " + label.chapter();
    if (rng.uniform() < 0.5) text += " coursework";
    texts.push_back(std::move(text));
    golds.push_back(label);
  }
  return {std::move(texts), std::move(golds)};
}

}  // namespace taxotag
