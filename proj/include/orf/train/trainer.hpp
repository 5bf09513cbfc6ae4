#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orf/data/dataset.hpp"
#include "orf/nn/checkpoint.hpp"

namespace orf::train {

struct TrainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  double phase1_lr = 1.34e-4;
  double phase2_lr = 1.34e-6;
  int batch_size = 16;
  int patience = 5;
  int max_epochs = 100;
  uint64_t seed = 1;
  double alpha = 0.2;         // MRL margin
  double weight_decay = 0.01;
  bool freeze_encoders = false;  // phase 2 fine-tunes encoders by default
  nn::EncoderHyper encoder;      // vocab size filled in by the trainer
  std::vector<int> classifier_hidden = {128, 32};
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int stop_epoch = 0;
  std::string stop_reason;  // "patience" or "max_epochs"
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

struct OracleVerdict {
  char label = 'P';  // argmax class
  double pass_probability = 0.0;
  nn::Tensor d_t, d_m;                              // 1 x d embeddings
  std::vector<std::vector<nn::Tensor>> attention;   // phi on the MUT tokens
  bool truncated = false;                           // either text hit max_len
  double millis = 0.0;
};

// Logit index convention shared by trainer and harness.
inline constexpr int kPassIdx = 0;
inline constexpr int kFailIdx = 1;
inline int label_index(char label) { return label == 'P' ? kPassIdx : kFailIdx; }

struct TrainedModel {
  nn::ModelCheckpoint model;
  TrainReport report;
};

// Phase 1: joint embedding on triplets (MRL + AdamW at phase1_lr). Builds the
// vocabulary from the training triplets, initializes phi/psi/classifier from
// cfg.seed, and returns the best-validation-loss snapshot.
TrainedModel train_phase1(const std::vector<data::Triplet>& train,
                          const std::vector<data::Triplet>& val, const TrainConfig& cfg);

// Phase 2: classifier on labeled pairs (WCEL at phase2_lr) on top of the
// phase-1 model; encoders fine-tune unless cfg.freeze_encoders.
TrainedModel train_phase2(const std::vector<data::LabeledPair>& train,
                          const std::vector<data::LabeledPair>& val, nn::ModelCheckpoint base,
                          const data::ClassWeights& weights, const TrainConfig& cfg);

// Inference on raw texts (already-rendered test and MUT sources).
OracleVerdict predict_texts(const nn::ModelCheckpoint& ckpt, const std::string& test_text,
                            const std::string& mut_text);
// Full pipeline: extract the MUT for `test` from `program`, then classify.
OracleVerdict predict(const nn::ModelCheckpoint& ckpt, const UnitTest& test,
                      const std::vector<mj::SourceMethod>& program);

// Mean validation losses without updates (used for reporting).
double eval_phase1_loss(nn::ModelCheckpoint& model, const std::vector<data::Triplet>& triplets,
                        double alpha);
double eval_phase2_loss(nn::ModelCheckpoint& model, const std::vector<data::LabeledPair>& pairs,
                        const data::ClassWeights& weights);

struct FoldResult {
  nn::ModelCheckpoint model;
  TrainReport phase1, phase2;
  std::vector<std::string> val_ids;
  double val_accuracy = 0.0;
};

// Seeded k-fold cross-validation over pairs: each fold trains both phases on
// the other k-1 folds and validates on its own. Returns one result per fold.
std::vector<FoldResult> kfold(const std::vector<data::LabeledPair>& pairs, int k,
                              const TrainConfig& cfg);

}  // namespace orf::train
