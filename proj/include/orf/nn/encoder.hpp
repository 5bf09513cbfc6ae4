#pragma once

#include <random>
#include <string>
#include <vector>

#include "orf/nn/tape.hpp"
#include "orf/nn/tensor.hpp"

namespace orf::nn {

struct EncoderHyper {
  int layers = 2;
  int heads = 4;
  int emb = 64;      // token embedding width e (divisible by heads)
  int ff = 128;      // feed-forward hidden width
  int out_dim = 64;  // shared embedding dimension d
  int max_len = 256;
  int vocab = 0;
};

// One transformer encoder (role "phi" embeds MUTs, "psi" embeds tests).
struct EncoderParams {
  struct Layer {
    Param wq, bq, wk, bk, wv, bv, wo, bo;
    Param ln1_g, ln1_b;
    Param w1, b1, w2, b2;
    Param ln2_g, ln2_b;
  };

  std::string role;
  EncoderHyper hyper;
  Param tok_emb, pos_emb;
  std::vector<Layer> layers;
  Param w_out, b_out;

  EncoderParams() = default;
  EncoderParams(std::string role_name, const EncoderHyper& h, std::mt19937_64& rng);
  std::vector<Param*> params();
  void zero_grads();
};

// Fully-connected stack over [D_t ; D_m] ending in 2 logits.
struct ClassifierParams {
  std::vector<int> hidden = {128, 32};
  int in_dim = 0;
  std::vector<Param> ws, bs;

  ClassifierParams() = default;
  ClassifierParams(int in, std::vector<int> hidden_sizes, std::mt19937_64& rng);
  std::vector<Param*> params();
};

struct EncodeVars {
  Tape::Var embedding;  // 1 x d
  std::vector<std::vector<Tape::Var>> attention;  // [layer][head], each n x n
};

struct Encoded {
  Tensor embedding;  // 1 x d
  std::vector<std::vector<Tensor>> attention;  // [layer][head]
};

// Forward pass on a tape (for training). Throws SequenceTooLong.
EncodeVars encode_on_tape(Tape& tape, EncoderParams& params, const std::vector<int>& ids);
// Standalone forward pass (for inference/analysis).
Encoded encode(const EncoderParams& params, const std::vector<int>& ids);

Tape::Var classify_on_tape(Tape& tape, ClassifierParams& params, Tape::Var features);
Tensor classify(const ClassifierParams& params, const Tensor& features);

// cos(u, v); throws ZeroVector on a zero input.
double cosine_similarity(const Tensor& u, const Tensor& v);
Tape::Var cosine_on_tape(Tape& tape, Tape::Var u, Tape::Var v);

// max(dist(t, m+) - dist(t, m-) + alpha, 0) with dist = 1 - cosine.
double margin_ranking_loss(const Tensor& d_t, const Tensor& d_mplus, const Tensor& d_mminus,
                           double alpha);
Tape::Var mrl_on_tape(Tape& tape, Tape::Var d_t, Tape::Var d_mplus, Tape::Var d_mminus,
                      double alpha);

// -w * log softmax(logits)[label_idx], max-shift stabilized.
double weighted_cross_entropy(const Tensor& logits, int label_idx, double weight);
Tape::Var wcel_on_tape(Tape& tape, Tape::Var logits, int label_idx, double weight);

struct GradCheckReport {
  double max_rel_err = 0.0;
  size_t checked = 0;
  bool pass = false;
};

// Compares analytic gradients of `build` (re-run per probe) against central
// finite differences at the current parameter values. Probes up to
// `max_coords_per_param` coordinates of each tensor.
GradCheckReport grad_check(const std::vector<Param*>& params,
                           const std::function<Tape::Var(Tape&)>& build, double h, double tol,
                           size_t max_coords_per_param = 6, uint64_t seed = 7);

}  // namespace orf::nn
