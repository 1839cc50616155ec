// Minimal end-to-end walkthrough: build a small synthetic corpus, train for a
// few epochs, and tag one held-out question.

#include "taxotag/taxotag.hpp"

#include <iostream>

int main() {
  using namespace taxotag;

  SynthConfig synth;
  synth.train_docs = 200;
  synth.heldout_docs = 40;
  const Corpus corpus = make_synthetic_corpus(synth);
  std::cout << "corpus: " << corpus.size() << " docs, " << corpus.labels().size() << " labels\n";

  TrainConfig cfg;
  cfg.epochs = 5;
  const TrainResult run = train(corpus, cfg, TinyEncoderConfig{}, HashEncoderConfig{});
  for (const EpochMetrics& em : run.metrics)
    std::cout << "epoch " << em.epoch << ": loss=" << em.mean_loss << " R@1=" << em.recall.at(1)
              << "\n";

  const Document& doc = corpus.docs()[corpus.split_indices(Split::Val).front()];
  const RankedPrediction pred = tag_document(run.model, run.index, model_input_text(doc), 3,
                                             cfg.inference_options(), doc.id);
  std::cout << "question: " << doc.question << "\n";
  std::cout << "gold:     " << doc.gold.sequence() << "\n";
  for (std::size_t r = 0; r < pred.ranked.size(); ++r)
    std::cout << "  " << (r + 1) << ". " << pred.ranked[r].label.sequence() << " ("
              << pred.ranked[r].score << ")\n";
  return 0;
}
