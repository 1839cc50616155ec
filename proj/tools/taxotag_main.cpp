// Command-line front end: ingest, train, tag, evaluate, inspect-negatives,
// and a synthetic-corpus generator for demos and smoke tests.
//
// Exit codes: 0 success, 1 validation/config error, 2 runtime failure.

#include "taxotag/taxotag.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace taxotag;

std::vector<int> parse_ks(const std::string& csv) {
  std::vector<int> ks;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      ks.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("bad k value \"" + item + "\" in --ks");
    }
  }
  if (ks.empty()) throw ConfigError("--ks produced no values");
  return ks;
}

void cmd_ingest(const std::string& input, const std::string& output, const std::string& delimiter,
                int depth) {
  const Corpus corpus = load_corpus_file(input, delimiter, depth);
  save_corpus_file(corpus, output);
  std::cout << "documents: " << corpus.size() << " (train "
            << corpus.split_indices(Split::Train).size() << ", val "
            << corpus.split_indices(Split::Val).size() << ", test "
            << corpus.split_indices(Split::Test).size() << ")\n"
            << "labels: " << corpus.labels().size() << "\n"
            << "wrote " << output << "\n";
}

struct TrainFlags {
  std::optional<std::string> config_path;
  std::optional<std::string> corpus;
  std::optional<std::string> output_dir;
  std::optional<std::string> negative_mode;
  bool no_attention = false;
  std::optional<int> hard_neg_k;
  std::optional<int> neighborhood_l;
  std::optional<double> margin;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> learning_rate;
  bool diagnostics = false;
  std::vector<std::string> track_ids;
};

void cmd_train(const TrainFlags& f) {
  RunConfig cfg = f.config_path ? RunConfig::load(*f.config_path) : RunConfig{};
  apply_env_overrides(cfg);
  if (f.corpus) cfg.corpus_path = *f.corpus;
  if (f.output_dir) cfg.output_dir = *f.output_dir;
  if (f.negative_mode) cfg.train.negative_mode = parse_negative_mode(*f.negative_mode);
  if (f.no_attention) {
    cfg.train.attention_enabled = false;
    cfg.train.inference_mode = InferenceMode::Pooled;
  }
  if (f.hard_neg_k) cfg.train.hard_neg_k = *f.hard_neg_k;
  if (f.neighborhood_l) cfg.train.neighborhood_l = *f.neighborhood_l;
  if (f.margin) cfg.train.margin = *f.margin;
  if (f.seed) cfg.train.seed = *f.seed;
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.batch_size) cfg.train.batch_size = *f.batch_size;
  if (f.learning_rate) cfg.train.learning_rate = *f.learning_rate;
  if (f.diagnostics) cfg.train.diagnostics = true;
  if (!f.track_ids.empty()) cfg.train.track_ids = f.track_ids;
  if (cfg.corpus_path.empty())
    throw ConfigError("no corpus configured: set \"corpus\" in the config file or pass --corpus");

  const Corpus corpus = load_corpus_file(cfg.corpus_path, cfg.delimiter, cfg.depth);
  std::vector<TaxonomyPath> extra_labels;
  if (cfg.labels_file)
    extra_labels = load_label_file_path(*cfg.labels_file, cfg.delimiter, cfg.depth);

  const TrainResult res = train(corpus, cfg.train, cfg.content_encoder, cfg.label_encoder,
                                extra_labels);
  for (const EpochMetrics& em : res.metrics) {
    std::cout << "epoch " << em.epoch << ": loss=" << std::setprecision(6) << em.mean_loss;
    for (const auto& [k, v] : em.recall) std::cout << " R@" << k << "=" << v;
    std::cout << "\n";
  }
  save_checkpoint(cfg.output_dir, res.model, cfg, res.index, res.metrics, res.diagnostics,
                  res.best_epoch);
  std::cout << "best epoch: " << res.best_epoch << "\n"
            << "checkpoint: " << cfg.output_dir << "\n";
}

nlohmann::json prediction_json(const RankedPrediction& pred, const std::string& text) {
  nlohmann::json j;
  j["id"] = pred.id;
  j["text"] = text;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : pred.ranked)
    arr.push_back({{"label", s.label.levels()}, {"sequence", s.label.sequence()}, {"score", s.score}});
  j["predictions"] = std::move(arr);
  return j;
}

void cmd_tag(const std::string& checkpoint_dir, const std::optional<std::string>& text,
             const std::optional<std::string>& input_file,
             const std::optional<std::string>& add_labels_file, int k, bool as_json) {
  const Checkpoint ck = load_checkpoint(checkpoint_dir);
  LabelIndex index = ck.index;
  if (add_labels_file) {
    const HashSentenceEncoder enc(ck.config.label_encoder);
    index = add_labels(index, load_label_file_path(*add_labels_file, ck.config.delimiter,
                                                   ck.config.depth),
                       enc);
  }
  const InferenceOptions opt = ck.config.train.inference_options();

  std::vector<std::pair<std::string, std::string>> inputs;  // (id, text)
  if (text) inputs.emplace_back("input-0", *text);
  if (input_file) {
    std::ifstream in(*input_file);
    if (!in) throw IoError("cannot open input file " + *input_file);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      if (canonical_text(line).empty()) continue;
      inputs.emplace_back("input-" + std::to_string(n++), line);
    }
  }
  if (inputs.empty()) throw ConfigError("tag: provide --text or --input");

  for (const auto& [id, t] : inputs) {
    const RankedPrediction pred = tag_document(ck.model, index, t, k, opt, id);
    if (as_json) {
      std::cout << prediction_json(pred, t).dump() << "\n";
    } else {
      std::cout << id << ": " << t << "\n";
      for (std::size_t r = 0; r < pred.ranked.size(); ++r)
        std::cout << "  " << (r + 1) << ". " << pred.ranked[r].label.sequence() << "  ("
                  << std::setprecision(4) << pred.ranked[r].score << ")\n";
    }
  }
}

void cmd_evaluate(const std::string& checkpoint_dir, const std::optional<std::string>& corpus_path,
                  const std::string& split_str, const std::string& ks_csv,
                  const std::optional<std::string>& output,
                  const std::optional<std::string>& dump_path, bool as_json) {
  const Checkpoint ck = load_checkpoint(checkpoint_dir);
  const std::string corpus_file = corpus_path.value_or(ck.config.corpus_path);
  if (corpus_file.empty()) throw ConfigError("evaluate: no corpus path available");
  const Corpus corpus = load_corpus_file(corpus_file, ck.config.delimiter, ck.config.depth);
  std::vector<RankedPrediction> predictions;
  EvalReport report = evaluate(corpus, parse_split(split_str), ck.model, ck.index,
                               parse_ks(ks_csv), ck.config.train.inference_options(),
                               dump_path ? &predictions : nullptr);
  report.config_fingerprint = ck.config.fingerprint();
  report.checkpoint_id = ck.id;
  if (output) write_report(report, *output);
  if (dump_path) write_predictions(predictions, *dump_path);
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    std::cout << "split " << split_str << ", " << report.count << " documents\n";
    for (const auto& [k, v] : report.recall) std::cout << "  R@" << k << " = " << v << "\n";
    if (output) std::cout << "wrote " << *output << "\n";
  }
}

void cmd_inspect_negatives(const std::string& checkpoint_dir, const std::string& kind,
                           bool as_json) {
  const std::filesystem::path path = std::filesystem::path(checkpoint_dir) / "diagnostics.jsonl";
  std::ifstream in(path);
  if (!in)
    throw ConfigError("no diagnostics found at " + path.string() +
                      " (train with --diagnostics and --track-id)");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json rec = nlohmann::json::parse(line);
    if (rec.at("kind").get<std::string>() != kind) continue;
    if (as_json) {
      std::cout << rec.dump() << "\n";
      continue;
    }
    std::cout << "epoch " << rec.at("epoch").get<int>() << "  doc "
              << rec.at("doc_id").get<std::string>() << "\n";
    int rank = 1;
    for (const auto& item : rec.at("items"))
      std::cout << "  " << rank++ << ". " << item.at("label").get<std::string>() << "  ("
                << std::setprecision(4) << item.at("score").get<double>() << ")\n";
  }
}

void cmd_synth(const std::string& output, std::uint64_t seed, int train_docs, int heldout_docs,
               int noise_tokens) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.train_docs = train_docs;
  cfg.heldout_docs = heldout_docs;
  cfg.noise_tokens = noise_tokens;
  const Corpus corpus = make_synthetic_corpus(cfg);
  save_corpus_file(corpus, output);
  std::cout << "documents: " << corpus.size() << " (train "
            << corpus.split_indices(Split::Train).size() << ", val "
            << corpus.split_indices(Split::Val).size() << ")\n"
            << "labels: " << corpus.labels().size() << "\n"
            << "wrote " << output << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxotag: hierarchical taxonomy tagging via dense label retrieval"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate and persist a corpus file");
  std::string in_input, in_output, in_delim = " - ";
  int in_depth = kDefaultPathDepth;
  ingest->add_option("-i,--input", in_input, "Record-per-line corpus file")->required();
  ingest->add_option("-o,--output", in_output, "Validated corpus output path")->required();
  ingest->add_option("--delimiter", in_delim, "Delimiter for string-form labels");
  ingest->add_option("--depth", in_depth, "Taxonomy depth");
  ingest->callback([&] { cmd_ingest(in_input, in_output, in_delim, in_depth); });

  // train
  auto* tr = app.add_subcommand("train", "Train a tagging model and write a checkpoint");
  TrainFlags tf;
  std::string tr_config, tr_corpus, tr_out, tr_negmode;
  int tr_k = -1, tr_l = -1, tr_epochs = -1, tr_batch = -1;
  double tr_margin = -1.0, tr_lr = -1.0;
  std::uint64_t tr_seed = 0;
  bool tr_seed_set = false;
  tr->add_option("-c,--config", tr_config, "Run config JSON file");
  tr->add_option("--corpus", tr_corpus, "Corpus path (overrides config)");
  tr->add_option("-o,--output", tr_out, "Checkpoint output directory (overrides config)");
  tr->add_option("--negative-mode", tr_negmode, "hard|random")
      ->check(CLI::IsMember({"hard", "random"}));
  tr->add_flag("--no-attention", tf.no_attention, "Disable the cross-attention fusion");
  tr->add_option("--hard-neg-k", tr_k, "Negatives per document");
  tr->add_option("--neighborhood-l", tr_l, "Labels sampled for attention");
  tr->add_option("--margin", tr_margin, "Hinge margin");
  tr->add_option("--seed", tr_seed, "Training seed")->each([&](const std::string&) { tr_seed_set = true; });
  tr->add_option("--epochs", tr_epochs, "Training epochs");
  tr->add_option("--batch-size", tr_batch, "Batch size");
  tr->add_option("--learning-rate", tr_lr, "Learning rate");
  tr->add_flag("--diagnostics", tf.diagnostics, "Record per-epoch negative/tag diagnostics");
  tr->add_option("--track-id", tf.track_ids, "Document id to track in diagnostics (repeatable)");
  tr->callback([&] {
    if (!tr_config.empty()) tf.config_path = tr_config;
    if (!tr_corpus.empty()) tf.corpus = tr_corpus;
    if (!tr_out.empty()) tf.output_dir = tr_out;
    if (!tr_negmode.empty()) tf.negative_mode = tr_negmode;
    if (tr_k >= 0) tf.hard_neg_k = tr_k;
    if (tr_l >= 0) tf.neighborhood_l = tr_l;
    if (tr_margin >= 0.0) tf.margin = tr_margin;
    if (tr_seed_set) tf.seed = tr_seed;
    if (tr_epochs >= 0) tf.epochs = tr_epochs;
    if (tr_batch >= 0) tf.batch_size = tr_batch;
    if (tr_lr >= 0.0) tf.learning_rate = tr_lr;
    cmd_train(tf);
  });

  // tag
  auto* tag = app.add_subcommand("tag", "Rank taxonomy labels for input text");
  std::string tag_ck, tag_text, tag_input, tag_add;
  int tag_k = 5;
  bool tag_json = false;
  tag->add_option("--checkpoint", tag_ck, "Checkpoint directory")->required();
  tag->add_option("--text", tag_text, "Single input text");
  tag->add_option("--input", tag_input, "File with one input text per line");
  tag->add_option("--add-labels", tag_add, "Labels-only file to add to the index before tagging");
  tag->add_option("-k,--k", tag_k, "Number of labels to return");
  tag->add_flag("--json", tag_json, "Machine-readable JSONL output");
  tag->callback([&] {
    cmd_tag(tag_ck, tag_text.empty() ? std::nullopt : std::optional<std::string>(tag_text),
            tag_input.empty() ? std::nullopt : std::optional<std::string>(tag_input),
            tag_add.empty() ? std::nullopt : std::optional<std::string>(tag_add), tag_k, tag_json);
  });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Compute Recall@k for a corpus split");
  std::string ev_ck, ev_corpus, ev_split = "test", ev_ks = "1,3,5", ev_out, ev_dump;
  bool ev_json = false;
  ev->add_option("--checkpoint", ev_ck, "Checkpoint directory")->required();
  ev->add_option("--corpus", ev_corpus, "Corpus path (defaults to the checkpoint's)");
  ev->add_option("--split", ev_split, "train|val|test");
  ev->add_option("--ks", ev_ks, "Comma-separated recall cutoffs");
  ev->add_option("-o,--output", ev_out, "Write the report JSON here");
  ev->add_option("--dump", ev_dump, "Write per-document predictions (JSONL) here");
  ev->add_flag("--json", ev_json, "Print the report as JSON");
  ev->callback([&] {
    cmd_evaluate(ev_ck, ev_corpus.empty() ? std::nullopt : std::optional<std::string>(ev_corpus),
                 ev_split, ev_ks, ev_out.empty() ? std::nullopt : std::optional<std::string>(ev_out),
                 ev_dump.empty() ? std::nullopt : std::optional<std::string>(ev_dump), ev_json);
  });

  // inspect-negatives
  auto* insp = app.add_subcommand("inspect-negatives",
                                  "Show per-epoch sampled negatives for tracked documents");
  std::string insp_ck, insp_kind = "negatives";
  bool insp_json = false;
  insp->add_option("--checkpoint", insp_ck, "Checkpoint directory")->required();
  insp->add_option("--kind", insp_kind, "negatives|attention_tags")
      ->check(CLI::IsMember({"negatives", "attention_tags"}));
  insp->add_flag("--json", insp_json, "Dump raw diagnostic records");
  insp->callback([&] { cmd_inspect_negatives(insp_ck, insp_kind, insp_json); });

  // synth
  auto* sy = app.add_subcommand("synth", "Generate a synthetic template corpus");
  std::string sy_out;
  std::uint64_t sy_seed = 42;
  int sy_train = 400, sy_heldout = 100, sy_noise = 8;
  sy->add_option("-o,--output", sy_out, "Corpus output path")->required();
  sy->add_option("--seed", sy_seed, "Generator seed");
  sy->add_option("--train-docs", sy_train, "Training documents");
  sy->add_option("--heldout-docs", sy_heldout, "Held-out documents (split=val)");
  sy->add_option("--noise", sy_noise, "Noise tokens per document");
  sy->callback([&] { cmd_synth(sy_out, sy_seed, sy_train, sy_heldout, sy_noise); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const taxotag::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const taxotag::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const taxotag::MalformedPathError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const taxotag::DuplicateIdError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const taxotag::LengthMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const taxotag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
