#include "orf/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "orf/mj/lexer.hpp"
#include "orf/nn/adamw.hpp"
#include "orf/nn/encoder.hpp"

namespace orf::train {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<nn::Tensor> snapshot(const std::vector<nn::Param*>& params) {
  std::vector<nn::Tensor> out;
  for (const nn::Param* p : params) out.push_back(p->value);
  return out;
}

void restore(const std::vector<nn::Param*>& params, const std::vector<nn::Tensor>& snap) {
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = snap[i];
}

// Batches of `batch` indices over [0, n). Phase 1 drops a trailing short batch
// when at least one full batch exists; phase 2 keeps it.
std::vector<std::vector<size_t>> make_batches(size_t n, size_t batch, std::mt19937_64& rng,
                                              bool drop_short) {
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<size_t>> batches;
  for (size_t i = 0; i < n; i += batch) {
    size_t end = std::min(n, i + batch);
    if (drop_short && end - i < batch && !batches.empty()) break;
    batches.emplace_back(order.begin() + static_cast<long>(i), order.begin() + static_cast<long>(end));
  }
  return batches;
}

struct EarlyStopper {
  int patience;
  double best = 0.0;
  int best_epoch = 0;
  int stale = 0;

  bool update(int epoch, double val_loss) {  // returns true when this is a new best
    if (best_epoch == 0 || val_loss < best) {
      best = val_loss;
      best_epoch = epoch;
      stale = 0;
      return true;
    }
    ++stale;
    return false;
  }
  bool should_stop() const { return stale >= patience; }
};

struct TokTriplet {
  std::vector<int> t, mp, mn;
};
struct TokPair {
  std::vector<int> t, m;
  int label_idx;
  double weight;
};

}  // namespace

double eval_phase1_loss(nn::ModelCheckpoint& model, const std::vector<data::Triplet>& triplets,
                        double alpha) {
  size_t max_len = static_cast<size_t>(model.phi.hyper.max_len);
  double total = 0.0;
  for (const auto& tr : triplets) {
    nn::Tape tape;
    auto dt = nn::encode_on_tape(tape, model.psi, model.vocab.encode(tr.test_text, max_len)).embedding;
    auto dp = nn::encode_on_tape(tape, model.phi, model.vocab.encode(tr.mut_pass_text, max_len)).embedding;
    auto dn = nn::encode_on_tape(tape, model.phi, model.vocab.encode(tr.mut_fail_text, max_len)).embedding;
    total += tape.val(nn::mrl_on_tape(tape, dt, dp, dn, alpha)).at(0, 0);
  }
  return triplets.empty() ? 0.0 : total / static_cast<double>(triplets.size());
}

double eval_phase2_loss(nn::ModelCheckpoint& model, const std::vector<data::LabeledPair>& pairs,
                        const data::ClassWeights& weights) {
  size_t max_len = static_cast<size_t>(model.phi.hyper.max_len);
  double total = 0.0;
  for (const auto& p : pairs) {
    nn::Tape tape;
    auto dt = nn::encode_on_tape(tape, model.psi, model.vocab.encode(p.test_text, max_len)).embedding;
    auto dm = nn::encode_on_tape(tape, model.phi, model.vocab.encode(p.mut_text, max_len)).embedding;
    auto logits = nn::classify_on_tape(tape, model.classifier, tape.concat_cols({dt, dm}));
    double w = p.label == 'P' ? weights.w_pass : weights.w_fail;
    total += tape.val(nn::wcel_on_tape(tape, logits, label_index(p.label), w)).at(0, 0);
  }
  return pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
}

TrainedModel train_phase1(const std::vector<data::Triplet>& train,
                          const std::vector<data::Triplet>& val, const TrainConfig& cfg) {
  if (train.empty() || val.empty())
    throw TrainError("phase 1 needs non-empty train and validation triplet sets");

  std::vector<std::string> texts;
  for (const auto& t : train) {
    texts.push_back(t.test_text);
    texts.push_back(t.mut_pass_text);
    texts.push_back(t.mut_fail_text);
  }
  TrainedModel out;
  out.model.vocab = nn::Vocab::build(texts);
  nn::EncoderHyper hyper = cfg.encoder;
  hyper.vocab = static_cast<int>(out.model.vocab.size());
  std::mt19937_64 rng(cfg.seed);
  out.model.phi = nn::EncoderParams("phi", hyper, rng);
  out.model.psi = nn::EncoderParams("psi", hyper, rng);
  out.model.classifier = nn::ClassifierParams(2 * hyper.out_dim, cfg.classifier_hidden, rng);

  size_t max_len = static_cast<size_t>(hyper.max_len);
  auto tok = [&](const std::vector<data::Triplet>& src) {
    std::vector<TokTriplet> out_toks;
    for (const auto& t : src)
      out_toks.push_back({out.model.vocab.encode(t.test_text, max_len),
                          out.model.vocab.encode(t.mut_pass_text, max_len),
                          out.model.vocab.encode(t.mut_fail_text, max_len)});
    return out_toks;
  };
  std::vector<TokTriplet> tr = tok(train), va = tok(val);

  std::vector<nn::Param*> trainable = out.model.phi.params();
  for (nn::Param* p : out.model.psi.params()) trainable.push_back(p);
  nn::AdamW opt(trainable, {cfg.phase1_lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  std::vector<nn::Param*> all = out.model.all_params();
  std::vector<nn::Tensor> best = snapshot(all);

  auto val_loss_fn = [&]() {
    double total = 0.0;
    for (const auto& t : va) {
      nn::Tape tape;
      auto dt = nn::encode_on_tape(tape, out.model.psi, t.t).embedding;
      auto dp = nn::encode_on_tape(tape, out.model.phi, t.mp).embedding;
      auto dn = nn::encode_on_tape(tape, out.model.phi, t.mn).embedding;
      total += tape.val(nn::mrl_on_tape(tape, dt, dp, dn, cfg.alpha)).at(0, 0);
    }
    return total / static_cast<double>(va.size());
  };

  EarlyStopper stopper{cfg.patience};
  std::mt19937_64 batch_rng(cfg.seed ^ 0x5851f42d4c957f2dull);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto start = Clock::now();
    double train_total = 0.0;
    size_t seen = 0;
    try {
      for (const auto& batch : make_batches(tr.size(), static_cast<size_t>(cfg.batch_size),
                                            batch_rng, /*drop_short=*/true)) {
        opt.zero_grad();
        for (size_t idx : batch) {
          const TokTriplet& t = tr[idx];
          nn::Tape tape;
          auto dt = nn::encode_on_tape(tape, out.model.psi, t.t).embedding;
          auto dp = nn::encode_on_tape(tape, out.model.phi, t.mp).embedding;
          auto dn = nn::encode_on_tape(tape, out.model.phi, t.mn).embedding;
          auto loss = nn::mrl_on_tape(tape, dt, dp, dn, cfg.alpha);
          train_total += tape.val(loss).at(0, 0);
          ++seen;
          tape.backward(loss);  // batch loss is the sum over triplets
        }
        opt.step();
      }
    } catch (const nn::NonFinite& e) {
      throw TrainError("phase 1 aborted at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = seen ? train_total / static_cast<double>(seen) : 0.0;
    rec.val_loss = val_loss_fn();
    rec.seconds = seconds_since(start);
    out.report.epochs.push_back(rec);
    if (stopper.update(epoch, rec.val_loss)) best = snapshot(all);
    out.report.stop_epoch = epoch;
    if (stopper.should_stop()) {
      out.report.stop_reason = "patience";
      break;
    }
  }
  if (out.report.stop_reason.empty()) out.report.stop_reason = "max_epochs";
  out.report.best_epoch = stopper.best_epoch;
  out.report.best_val_loss = stopper.best;
  restore(all, best);
  out.model.meta = {stopper.best_epoch, stopper.best, cfg.seed, "phase1"};
  return out;
}

TrainedModel train_phase2(const std::vector<data::LabeledPair>& train,
                          const std::vector<data::LabeledPair>& val, nn::ModelCheckpoint base,
                          const data::ClassWeights& weights, const TrainConfig& cfg) {
  if (train.empty() || val.empty())
    throw TrainError("phase 2 needs non-empty train and validation pair sets");
  TrainedModel out;
  out.model = std::move(base);
  size_t max_len = static_cast<size_t>(out.model.phi.hyper.max_len);

  auto tok = [&](const std::vector<data::LabeledPair>& src) {
    std::vector<TokPair> out_toks;
    for (const auto& p : src)
      out_toks.push_back({out.model.vocab.encode(p.test_text, max_len),
                          out.model.vocab.encode(p.mut_text, max_len), label_index(p.label),
                          p.label == 'P' ? weights.w_pass : weights.w_fail});
    return out_toks;
  };
  std::vector<TokPair> tr = tok(train), va = tok(val);

  std::vector<nn::Param*> trainable = out.model.classifier.params();
  if (!cfg.freeze_encoders) {
    for (nn::Param* p : out.model.phi.params()) trainable.push_back(p);
    for (nn::Param* p : out.model.psi.params()) trainable.push_back(p);
  }
  nn::AdamW opt(trainable, {cfg.phase2_lr, 0.9, 0.999, 1e-8, cfg.weight_decay});
  std::vector<nn::Param*> all = out.model.all_params();
  std::vector<nn::Tensor> best = snapshot(all);

  auto pair_loss = [&](nn::Tape& tape, const TokPair& p) {
    auto dt = nn::encode_on_tape(tape, out.model.psi, p.t).embedding;
    auto dm = nn::encode_on_tape(tape, out.model.phi, p.m).embedding;
    auto logits = nn::classify_on_tape(tape, out.model.classifier, tape.concat_cols({dt, dm}));
    return nn::wcel_on_tape(tape, logits, p.label_idx, p.weight);
  };
  auto val_loss_fn = [&]() {
    double total = 0.0;
    for (const auto& p : va) {
      nn::Tape tape;
      total += tape.val(pair_loss(tape, p)).at(0, 0);
    }
    return total / static_cast<double>(va.size());
  };

  EarlyStopper stopper{cfg.patience};
  std::mt19937_64 batch_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    auto start = Clock::now();
    double train_total = 0.0;
    size_t seen = 0;
    try {
      for (const auto& batch : make_batches(tr.size(), static_cast<size_t>(cfg.batch_size),
                                            batch_rng, /*drop_short=*/false)) {
        opt.zero_grad();
        double inv = 1.0 / static_cast<double>(batch.size());
        for (size_t idx : batch) {
          nn::Tape tape;
          auto loss = pair_loss(tape, tr[idx]);
          train_total += tape.val(loss).at(0, 0);
          ++seen;
          tape.backward(tape.scale(loss, inv));  // batch loss is the weighted mean
        }
        opt.step();
      }
    } catch (const nn::NonFinite& e) {
      throw TrainError("phase 2 aborted at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = seen ? train_total / static_cast<double>(seen) : 0.0;
    rec.val_loss = val_loss_fn();
    rec.seconds = seconds_since(start);
    out.report.epochs.push_back(rec);
    if (stopper.update(epoch, rec.val_loss)) best = snapshot(all);
    out.report.stop_epoch = epoch;
    if (stopper.should_stop()) {
      out.report.stop_reason = "patience";
      break;
    }
  }
  if (out.report.stop_reason.empty()) out.report.stop_reason = "max_epochs";
  out.report.best_epoch = stopper.best_epoch;
  out.report.best_val_loss = stopper.best;
  restore(all, best);
  out.model.meta = {stopper.best_epoch, stopper.best, cfg.seed, "phase2"};
  return out;
}

OracleVerdict predict_texts(const nn::ModelCheckpoint& ckpt, const std::string& test_text,
                            const std::string& mut_text) {
  auto start = Clock::now();
  size_t max_len = static_cast<size_t>(ckpt.phi.hyper.max_len);
  OracleVerdict v;
  v.truncated = mj::lex(test_text).size() > max_len || mj::lex(mut_text).size() > max_len;
  nn::Encoded et = nn::encode(ckpt.psi, ckpt.vocab.encode(test_text, max_len));
  nn::Encoded em = nn::encode(ckpt.phi, ckpt.vocab.encode(mut_text, max_len));
  nn::Tensor features(1, et.embedding.cols + em.embedding.cols);
  for (size_t j = 0; j < et.embedding.cols; ++j) features.at(0, j) = et.embedding.at(0, j);
  for (size_t j = 0; j < em.embedding.cols; ++j)
    features.at(0, et.embedding.cols + j) = em.embedding.at(0, j);
  nn::Tensor logits = nn::classify(ckpt.classifier, features);
  double mx = std::max(logits.at(0, 0), logits.at(0, 1));
  double e0 = std::exp(logits.at(0, 0) - mx), e1 = std::exp(logits.at(0, 1) - mx);
  v.pass_probability = e0 / (e0 + e1);
  v.label = logits.at(0, kPassIdx) >= logits.at(0, kFailIdx) ? 'P' : 'F';
  v.d_t = std::move(et.embedding);
  v.d_m = std::move(em.embedding);
  v.attention = std::move(em.attention);
  v.millis = seconds_since(start) * 1e3;
  return v;
}

OracleVerdict predict(const nn::ModelCheckpoint& ckpt, const UnitTest& test,
                      const std::vector<mj::SourceMethod>& program) {
  ExtractedMUT mut = extract_mut(test, program);
  return predict_texts(ckpt, render_test_text(test), mut.concatenated_source);
}

std::vector<FoldResult> kfold(const std::vector<data::LabeledPair>& pairs, int k,
                              const TrainConfig& cfg) {
  if (k < 2) throw TrainError("kfold needs k >= 2");
  if (pairs.size() < static_cast<size_t>(k))
    throw data::InsufficientData("kfold needs at least k pairs");
  std::vector<size_t> order(pairs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<FoldResult> results;
  for (int fold = 0; fold < k; ++fold) {
    std::vector<data::LabeledPair> train, val;
    for (size_t pos = 0; pos < order.size(); ++pos)
      (static_cast<int>(pos) % k == fold ? val : train).push_back(pairs[order[pos]]);
    std::vector<data::Triplet> tr_triplets = data::build_triplets(train);
    std::vector<data::Triplet> va_triplets = data::build_triplets(val);
    if (va_triplets.empty()) va_triplets = tr_triplets;  // tiny folds: validate on train MRL
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<uint64_t>(fold) + 1;
    TrainedModel p1 = train_phase1(tr_triplets, va_triplets, fold_cfg);
    TrainedModel p2 = train_phase2(train, val, std::move(p1.model), data::class_weights(train),
                                   fold_cfg);
    FoldResult res;
    res.phase1 = std::move(p1.report);
    res.phase2 = std::move(p2.report);
    size_t correct = 0;
    for (const auto& p : val) {
      res.val_ids.push_back(p.id);
      if (predict_texts(p2.model, p.test_text, p.mut_text).label == p.label) ++correct;
    }
    res.val_accuracy = val.empty() ? 0.0 : static_cast<double>(correct) / val.size();
    res.model = std::move(p2.model);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace orf::train
