#pragma once

#include "taxotag/encoders.hpp"
#include "taxotag/training.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace taxotag {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("unknown config key \"" + it.key() + "\" in " + where);
  }
}

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

// Full run configuration: dataset paths, encoder settings, and every
// training knob. Unknown keys are rejected, and to_json materializes all
// defaults so the checkpoint's config snapshot fully determines a rerun.
struct RunConfig {
  std::string corpus_path;
  std::optional<std::string> labels_file;
  std::string delimiter = " - ";
  int depth = kDefaultPathDepth;
  std::string output_dir = "runs/default";
  TinyEncoderConfig content_encoder;
  HashEncoderConfig label_encoder;
  TrainConfig train;

  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("run config must be a JSON object");
    detail::reject_unknown_keys(j,
                                {"corpus", "labels_file", "delimiter", "depth", "output_dir",
                                 "content_encoder", "label_encoder", "train"},
                                "config root");
    RunConfig c;
    detail::read_field(j, "corpus", c.corpus_path);
    if (j.contains("labels_file") && !j.at("labels_file").is_null())
      c.labels_file = j.at("labels_file").get<std::string>();
    detail::read_field(j, "delimiter", c.delimiter);
    detail::read_field(j, "depth", c.depth);
    detail::read_field(j, "output_dir", c.output_dir);

    if (j.contains("content_encoder")) {
      const auto& e = j.at("content_encoder");
      detail::reject_unknown_keys(
          e, {"dim", "vocab", "context_limit", "pooling", "context_mix", "seed"},
          "content_encoder");
      detail::read_field(e, "dim", c.content_encoder.dim);
      detail::read_field(e, "vocab", c.content_encoder.vocab);
      detail::read_field(e, "context_limit", c.content_encoder.context_limit);
      if (e.contains("pooling")) c.content_encoder.pooling = parse_pooling(e.at("pooling").get<std::string>());
      detail::read_field(e, "context_mix", c.content_encoder.context_mix);
      detail::read_field(e, "seed", c.content_encoder.seed);
    }
    if (j.contains("label_encoder")) {
      const auto& e = j.at("label_encoder");
      detail::reject_unknown_keys(e, {"dim", "seed"}, "label_encoder");
      detail::read_field(e, "dim", c.label_encoder.dim);
      detail::read_field(e, "seed", c.label_encoder.seed);
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      detail::reject_unknown_keys(
          t,
          {"margin", "hard_neg_k", "negative_mode", "attention_enabled", "neighborhood_l",
           "batch_size", "epochs", "learning_rate", "seed", "scale_after_softmax",
           "inference_mode", "eval_ks", "diagnostics", "track_ids"},
          "train");
      detail::read_field(t, "margin", c.train.margin);
      detail::read_field(t, "hard_neg_k", c.train.hard_neg_k);
      if (t.contains("negative_mode"))
        c.train.negative_mode = parse_negative_mode(t.at("negative_mode").get<std::string>());
      detail::read_field(t, "attention_enabled", c.train.attention_enabled);
      detail::read_field(t, "neighborhood_l", c.train.neighborhood_l);
      detail::read_field(t, "batch_size", c.train.batch_size);
      detail::read_field(t, "epochs", c.train.epochs);
      detail::read_field(t, "learning_rate", c.train.learning_rate);
      detail::read_field(t, "seed", c.train.seed);
      detail::read_field(t, "scale_after_softmax", c.train.scale_after_softmax);
      if (t.contains("inference_mode"))
        c.train.inference_mode = parse_inference_mode(t.at("inference_mode").get<std::string>());
      detail::read_field(t, "eval_ks", c.train.eval_ks);
      detail::read_field(t, "diagnostics", c.train.diagnostics);
      detail::read_field(t, "track_ids", c.train.track_ids);
    }
    return c;
  }

  static RunConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["corpus"] = corpus_path;
    j["labels_file"] = labels_file ? nlohmann::json(*labels_file) : nlohmann::json(nullptr);
    j["delimiter"] = delimiter;
    j["depth"] = depth;
    j["output_dir"] = output_dir;
    j["content_encoder"] = {{"dim", content_encoder.dim},
                            {"vocab", content_encoder.vocab},
                            {"context_limit", content_encoder.context_limit},
                            {"pooling", pooling_name(content_encoder.pooling)},
                            {"context_mix", content_encoder.context_mix},
                            {"seed", content_encoder.seed}};
    j["label_encoder"] = {{"dim", label_encoder.dim}, {"seed", label_encoder.seed}};
    j["train"] = {{"margin", train.margin},
                  {"hard_neg_k", train.hard_neg_k},
                  {"negative_mode", negative_mode_name(train.negative_mode)},
                  {"attention_enabled", train.attention_enabled},
                  {"neighborhood_l", train.neighborhood_l},
                  {"batch_size", train.batch_size},
                  {"epochs", train.epochs},
                  {"learning_rate", train.learning_rate},
                  {"seed", train.seed},
                  {"scale_after_softmax", train.scale_after_softmax},
                  {"inference_mode", inference_mode_name(train.inference_mode)},
                  {"eval_ks", train.eval_ks},
                  {"diagnostics", train.diagnostics},
                  {"track_ids", train.track_ids}};
    return j;
  }

  std::string fingerprint() const { return to_hex(fnv1a64(to_json().dump())); }
};

// Environment overrides for scripted runs; CLI flags still take precedence.
inline void apply_env_overrides(RunConfig& cfg) {
  if (const char* dir = std::getenv("TAXOTAG_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
  if (const char* seed = std::getenv("TAXOTAG_SEED"); seed && *seed) {
    try {
      cfg.train.seed = static_cast<std::uint64_t>(std::stoull(seed));
    } catch (const std::exception&) {
      throw ConfigError(std::string("TAXOTAG_SEED is not an integer: ") + seed);
    }
  }
}

}  // namespace taxotag
