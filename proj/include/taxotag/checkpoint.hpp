#pragma once

#include "taxotag/config.hpp"
#include "taxotag/model.hpp"
#include "taxotag/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace taxotag {

namespace detail {

inline constexpr std::uint32_t kWeightsMagic = 0x54585447;  // "TXTG"
inline constexpr std::uint32_t kWeightsVersion = 1;

inline void write_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
inline std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

inline void write_section(std::ostream& out, const std::string& name, const Mat& m) {
  write_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_u64(out, static_cast<std::uint64_t>(m.rows()));
  write_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

inline std::pair<std::string, Mat> read_section(std::istream& in) {
  const std::uint32_t name_len = read_u32(in);
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  const auto rows = static_cast<Eigen::Index>(read_u64(in));
  const auto cols = static_cast<Eigen::Index>(read_u64(in));
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double v = 0.0;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(r, c) = v;
    }
  if (!in) throw IoError("weights file truncated while reading section \"" + name + "\"");
  return {std::move(name), std::move(m)};
}

inline std::uint64_t hash_matrix(std::uint64_t h, const Mat& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      const char* bytes = reinterpret_cast<const char*>(&v);
      for (std::size_t i = 0; i < sizeof(v); ++i) {
        h ^= static_cast<unsigned char>(bytes[i]);
        h *= 1099511628211ull;
      }
    }
  return h;
}

}  // namespace detail

inline void write_weights(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write weights file " + path.string());
  detail::write_u32(out, detail::kWeightsMagic);
  detail::write_u32(out, detail::kWeightsVersion);
  const std::vector<std::pair<std::string, const Mat*>> sections = {
      {"embed", &model.encoder.embed()}, {"mix", &model.encoder.mix()},
      {"pooled_proj", &model.pooled_proj}, {"w_q", &model.fusion.w_q},
      {"w_k", &model.fusion.w_k},          {"w_v", &model.fusion.w_v}};
  detail::write_u32(out, static_cast<std::uint32_t>(sections.size()));
  for (const auto& [name, m] : sections) detail::write_section(out, name, *m);
}

inline void read_weights(const std::filesystem::path& path, Model& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open weights file " + path.string());
  if (detail::read_u32(in) != detail::kWeightsMagic)
    throw IoError("bad magic in weights file " + path.string());
  if (detail::read_u32(in) != detail::kWeightsVersion)
    throw IoError("unsupported weights version in " + path.string());
  const std::uint32_t n = detail::read_u32(in);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto [name, m] = detail::read_section(in);
    Mat* target = nullptr;
    if (name == "embed") target = &model.encoder.embed();
    else if (name == "mix") target = &model.encoder.mix();
    else if (name == "pooled_proj") target = &model.pooled_proj;
    else if (name == "w_q") target = &model.fusion.w_q;
    else if (name == "w_k") target = &model.fusion.w_k;
    else if (name == "w_v") target = &model.fusion.w_v;
    else throw IoError("unknown weights section \"" + name + "\"");
    if (target->rows() != m.rows() || target->cols() != m.cols())
      throw DimensionMismatchError("weights section \"" + name + "\" shape does not match config");
    *target = std::move(m);
  }
}

// Content of checkpoint.json / the hash identifying a trained model: the
// materialized config snapshot plus all weight bytes.
inline std::string checkpoint_id(const Model& model, const RunConfig& cfg) {
  std::uint64_t h = fnv1a64(cfg.to_json().dump());
  h = detail::hash_matrix(h, model.encoder.embed());
  h = detail::hash_matrix(h, model.encoder.mix());
  h = detail::hash_matrix(h, model.pooled_proj);
  h = detail::hash_matrix(h, model.fusion.w_q);
  h = detail::hash_matrix(h, model.fusion.w_k);
  h = detail::hash_matrix(h, model.fusion.w_v);
  return to_hex(h);
}

struct Checkpoint {
  Model model;
  RunConfig config;
  LabelIndex index;
  std::vector<EpochMetrics> metrics;
  std::string id;
  int best_epoch = 0;
};

// Checkpoint directory layout:
//   config.json       config snapshot + encoder identifiers + checkpoint id
//   weights.bin       content encoder, pooled projection, fusion weights
//   label_index.json  the label index the model was trained against
//   metrics.jsonl     one record per epoch: epoch, mean_loss, validation R@k
//   diagnostics.jsonl tracked-document records (only when produced)
inline void save_checkpoint(const std::filesystem::path& dir, const Model& model,
                            const RunConfig& cfg, const LabelIndex& index,
                            const std::vector<EpochMetrics>& metrics,
                            const std::vector<DiagnosticRecord>& diagnostics = {},
                            int best_epoch = 0) {
  std::filesystem::create_directories(dir);
  write_weights(dir / "weights.bin", model);
  index.save(dir / "label_index.json");

  nlohmann::json meta;
  meta["run"] = cfg.to_json();
  meta["content_encoder_id"] = model.encoder.identifier();
  meta["label_encoder_id"] = index.encoder_id();
  meta["d_lab"] = index.dim();
  meta["checkpoint_id"] = checkpoint_id(model, cfg);
  meta["best_epoch"] = best_epoch;
  std::ofstream cf(dir / "config.json");
  if (!cf) throw IoError("cannot write checkpoint config in " + dir.string());
  cf << meta.dump(2) << "\n";

  std::ofstream mf(dir / "metrics.jsonl");
  if (!mf) throw IoError("cannot write metrics log in " + dir.string());
  for (const auto& em : metrics) mf << em.to_json().dump() << "\n";

  if (!diagnostics.empty()) {
    std::ofstream df(dir / "diagnostics.jsonl");
    if (!df) throw IoError("cannot write diagnostics log in " + dir.string());
    for (const auto& rec : diagnostics) df << rec.to_json().dump() << "\n";
  }
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  std::ifstream cf(dir / "config.json");
  if (!cf) throw IoError("cannot open checkpoint config in " + dir.string());
  nlohmann::json meta;
  try {
    cf >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("checkpoint config: " + std::string(e.what()));
  }
  for (const char* field : {"run", "label_encoder_id", "checkpoint_id"})
    if (!meta.contains(field))
      throw SchemaError("checkpoint config missing field \"" + std::string(field) + "\"");

  Checkpoint ck{Model::init(TinyEncoderConfig{}, 1, 0),
                RunConfig::from_json(meta["run"]),
                LabelIndex::load(dir / "label_index.json"),
                {},
                meta["checkpoint_id"].get<std::string>(),
                meta.value("best_epoch", 0)};
  ck.model = Model::init(ck.config.content_encoder, ck.config.label_encoder.dim,
                         ck.config.train.seed);
  read_weights(dir / "weights.bin", ck.model);

  if (ck.index.dim() != ck.model.d_lab())
    throw DimensionMismatchError("checkpoint index dimension does not match model");
  if (ck.index.encoder_id() != meta["label_encoder_id"].get<std::string>())
    throw ConfigError("checkpoint label encoder does not match the stored index");

  std::ifstream mf(dir / "metrics.jsonl");
  if (mf) {
    std::string line;
    while (std::getline(mf, line)) {
      if (line.empty()) continue;
      const nlohmann::json j = nlohmann::json::parse(line);
      EpochMetrics em;
      em.epoch = j.at("epoch").get<int>();
      em.mean_loss = j.at("mean_loss").get<double>();
      for (auto it = j.at("recall").begin(); it != j.at("recall").end(); ++it)
        em.recall[std::stoi(it.key())] = it.value().get<double>();
      ck.metrics.push_back(std::move(em));
    }
  }
  return ck;
}

}  // namespace taxotag
