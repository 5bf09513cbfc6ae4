#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "orf/nn/encoder.hpp"
#include "orf/nn/vocab.hpp"

namespace orf::nn {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainMeta {
  int epoch = 0;
  double best_val_loss = 0.0;
  uint64_t seed = 0;
  std::string phase;  // "phase1" or "phase2"
};

// Full model state: vocabulary, both encoders, classifier, metadata. Stored as
// a JSON manifest (version, hyperparameters, vocab, tensor table) followed by
// a little-endian float32 blob; the manifest lists each tensor's byte offset.
struct ModelCheckpoint {
  std::string version = "oracleforge-ckpt-1";
  Vocab vocab;
  EncoderParams phi;  // MUT encoder
  EncoderParams psi;  // test encoder
  ClassifierParams classifier;
  TrainMeta meta;

  std::vector<Param*> all_params();
};

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& file);
ModelCheckpoint load_checkpoint(const std::filesystem::path& file);

// FNV-1a over the serialized bytes; used for reproducibility assertions.
uint64_t checkpoint_hash(const std::filesystem::path& file);

}  // namespace orf::nn
