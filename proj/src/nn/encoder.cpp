#include "orf/nn/encoder.hpp"

#include <algorithm>
#include <cmath>

namespace orf::nn {

namespace {

Param normal_param(const std::string& name, size_t r, size_t c, std::mt19937_64& rng,
                   double stddev = 0.02) {
  Param p(name, r, c);
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& v : p.value.data) v = dist(rng);
  return p;
}

Param const_param(const std::string& name, size_t r, size_t c, double fill) {
  Param p(name, r, c);
  p.value.fill(fill);
  return p;
}

}  // namespace

EncoderParams::EncoderParams(std::string role_name, const EncoderHyper& h, std::mt19937_64& rng)
    : role(std::move(role_name)), hyper(h) {
  const std::string pre = role + "/";
  size_t e = static_cast<size_t>(h.emb);
  tok_emb = normal_param(pre + "tok_emb", static_cast<size_t>(h.vocab), e, rng);
  pos_emb = normal_param(pre + "pos_emb", static_cast<size_t>(h.max_len), e, rng);
  for (int l = 0; l < h.layers; ++l) {
    const std::string lp = pre + "layer" + std::to_string(l) + "/";
    Layer layer;
    layer.wq = normal_param(lp + "wq", e, e, rng);
    layer.bq = const_param(lp + "bq", 1, e, 0.0);
    layer.wk = normal_param(lp + "wk", e, e, rng);
    layer.bk = const_param(lp + "bk", 1, e, 0.0);
    layer.wv = normal_param(lp + "wv", e, e, rng);
    layer.bv = const_param(lp + "bv", 1, e, 0.0);
    layer.wo = normal_param(lp + "wo", e, e, rng);
    layer.bo = const_param(lp + "bo", 1, e, 0.0);
    layer.ln1_g = const_param(lp + "ln1_g", 1, e, 1.0);
    layer.ln1_b = const_param(lp + "ln1_b", 1, e, 0.0);
    layer.w1 = normal_param(lp + "w1", e, static_cast<size_t>(h.ff), rng);
    layer.b1 = const_param(lp + "b1", 1, static_cast<size_t>(h.ff), 0.0);
    layer.w2 = normal_param(lp + "w2", static_cast<size_t>(h.ff), e, rng);
    layer.b2 = const_param(lp + "b2", 1, e, 0.0);
    layer.ln2_g = const_param(lp + "ln2_g", 1, e, 1.0);
    layer.ln2_b = const_param(lp + "ln2_b", 1, e, 0.0);
    layers.push_back(std::move(layer));
  }
  w_out = normal_param(pre + "w_out", e, static_cast<size_t>(h.out_dim), rng);
  b_out = const_param(pre + "b_out", 1, static_cast<size_t>(h.out_dim), 0.0);
}

std::vector<Param*> EncoderParams::params() {
  std::vector<Param*> out = {&tok_emb, &pos_emb};
  for (auto& l : layers)
    for (Param* p : {&l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo, &l.ln1_g, &l.ln1_b,
                     &l.w1, &l.b1, &l.w2, &l.b2, &l.ln2_g, &l.ln2_b})
      out.push_back(p);
  out.push_back(&w_out);
  out.push_back(&b_out);
  return out;
}

void EncoderParams::zero_grads() {
  for (Param* p : params()) p->zero_grad();
}

ClassifierParams::ClassifierParams(int in, std::vector<int> hidden_sizes, std::mt19937_64& rng)
    : hidden(std::move(hidden_sizes)), in_dim(in) {
  std::vector<int> widths = {in};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(2);
  for (size_t i = 0; i + 1 < widths.size(); ++i) {
    // The final (logit) layer starts at zero so the verdict argmax reflects
    // accumulated training signal rather than initialization noise; argmax is
    // scale invariant, which matters at very small fine-tuning rates.
    if (i + 2 == widths.size()) {
      ws.push_back(const_param("clf/w" + std::to_string(i), static_cast<size_t>(widths[i]),
                               static_cast<size_t>(widths[i + 1]), 0.0));
    } else {
      ws.push_back(normal_param("clf/w" + std::to_string(i), static_cast<size_t>(widths[i]),
                                static_cast<size_t>(widths[i + 1]), rng));
    }
    bs.push_back(const_param("clf/b" + std::to_string(i), 1, static_cast<size_t>(widths[i + 1]), 0.0));
  }
}

std::vector<Param*> ClassifierParams::params() {
  std::vector<Param*> out;
  for (auto& w : ws) out.push_back(&w);
  for (auto& b : bs) out.push_back(&b);
  return out;
}

EncodeVars encode_on_tape(Tape& tape, EncoderParams& params, const std::vector<int>& ids) {
  const EncoderHyper& h = params.hyper;
  size_t n = ids.size();
  if (n == 0 || n > static_cast<size_t>(h.max_len))
    throw SequenceTooLong(n, static_cast<size_t>(h.max_len));
  std::vector<int> positions(n);
  for (size_t i = 0; i < n; ++i) positions[i] = static_cast<int>(i);

  Tape::Var x = tape.add(tape.rows(tape.leaf(params.tok_emb), ids),
                         tape.rows(tape.leaf(params.pos_emb), positions));
  size_t dh = static_cast<size_t>(h.emb) / static_cast<size_t>(h.heads);
  double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  EncodeVars out;
  for (auto& layer : params.layers) {
    Tape::Var q = tape.add_rowvec(tape.matmul(x, tape.leaf(layer.wq)), tape.leaf(layer.bq));
    Tape::Var k = tape.add_rowvec(tape.matmul(x, tape.leaf(layer.wk)), tape.leaf(layer.bk));
    Tape::Var v = tape.add_rowvec(tape.matmul(x, tape.leaf(layer.wv)), tape.leaf(layer.bv));
    std::vector<Tape::Var> head_outs, head_attn;
    for (int head = 0; head < h.heads; ++head) {
      size_t c0 = static_cast<size_t>(head) * dh;
      Tape::Var qh = tape.slice_cols(q, c0, c0 + dh);
      Tape::Var kh = tape.slice_cols(k, c0, c0 + dh);
      Tape::Var vh = tape.slice_cols(v, c0, c0 + dh);
      Tape::Var scores = tape.scale(tape.matmul(qh, tape.transpose(kh)), scale);
      Tape::Var attn = tape.softmax_rows(scores);
      head_attn.push_back(attn);
      head_outs.push_back(tape.matmul(attn, vh));
    }
    out.attention.push_back(head_attn);
    Tape::Var merged = tape.concat_cols(head_outs);
    Tape::Var proj = tape.add_rowvec(tape.matmul(merged, tape.leaf(layer.wo)), tape.leaf(layer.bo));
    x = tape.layer_norm_rows(tape.add(x, proj), tape.leaf(layer.ln1_g), tape.leaf(layer.ln1_b));
    Tape::Var ff = tape.relu(tape.add_rowvec(tape.matmul(x, tape.leaf(layer.w1)), tape.leaf(layer.b1)));
    Tape::Var ff2 = tape.add_rowvec(tape.matmul(ff, tape.leaf(layer.w2)), tape.leaf(layer.b2));
    x = tape.layer_norm_rows(tape.add(x, ff2), tape.leaf(layer.ln2_g), tape.leaf(layer.ln2_b));
  }
  out.embedding = tape.add_rowvec(tape.matmul(tape.mean_rows(x), tape.leaf(params.w_out)),
                                  tape.leaf(params.b_out));
  return out;
}

Encoded encode(const EncoderParams& params, const std::vector<int>& ids) {
  Tape tape;
  // The tape only mutates grads during backward; a forward pass leaves the
  // parameters untouched.
  EncodeVars vars = encode_on_tape(tape, const_cast<EncoderParams&>(params), ids);
  Encoded out;
  out.embedding = tape.val(vars.embedding);
  for (const auto& layer : vars.attention) {
    std::vector<Tensor> heads;
    for (Tape::Var v : layer) heads.push_back(tape.val(v));
    out.attention.push_back(std::move(heads));
  }
  return out;
}

Tape::Var classify_on_tape(Tape& tape, ClassifierParams& params, Tape::Var features) {
  Tape::Var x = features;
  for (size_t i = 0; i < params.ws.size(); ++i) {
    x = tape.add_rowvec(tape.matmul(x, tape.leaf(params.ws[i])), tape.leaf(params.bs[i]));
    if (i + 1 < params.ws.size()) x = tape.relu(x);
  }
  return x;
}

Tensor classify(const ClassifierParams& params, const Tensor& features) {
  Tape tape;
  Tape::Var out =
      classify_on_tape(tape, const_cast<ClassifierParams&>(params), tape.input(features));
  return tape.val(out);
}

double cosine_similarity(const Tensor& u, const Tensor& v) {
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    uu += u.data[i] * u.data[i];
    vv += v.data[i] * v.data[i];
    uv += u.data[i] * v.data[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector();
  return uv / (std::sqrt(uu) * std::sqrt(vv));
}

Tape::Var cosine_on_tape(Tape& tape, Tape::Var u, Tape::Var v) {
  Tape::Var nu = tape.norm(u);
  Tape::Var nv = tape.norm(v);
  if (tape.val(nu).at(0, 0) == 0.0 || tape.val(nv).at(0, 0) == 0.0) throw ZeroVector();
  return tape.div(tape.dot(u, v), tape.mul(nu, nv));
}

double margin_ranking_loss(const Tensor& d_t, const Tensor& d_mplus, const Tensor& d_mminus,
                           double alpha) {
  double gap = cosine_similarity(d_t, d_mminus) - cosine_similarity(d_t, d_mplus) + alpha;
  return gap > 0.0 ? gap : 0.0;
}

Tape::Var mrl_on_tape(Tape& tape, Tape::Var d_t, Tape::Var d_mplus, Tape::Var d_mminus,
                      double alpha) {
  // dist(t, m+) - dist(t, m-) + alpha = cos(t, m-) - cos(t, m+) + alpha
  Tape::Var gap = tape.add_const(
      tape.sub(cosine_on_tape(tape, d_t, d_mminus), cosine_on_tape(tape, d_t, d_mplus)), alpha);
  return tape.relu(gap);
}

double weighted_cross_entropy(const Tensor& logits, int label_idx, double weight) {
  double mx = logits.data[0];
  for (double v : logits.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : logits.data) sum += std::exp(v - mx);
  double lse = mx + std::log(sum);
  return weight * (lse - logits.data[static_cast<size_t>(label_idx)]);
}

Tape::Var wcel_on_tape(Tape& tape, Tape::Var logits, int label_idx, double weight) {
  return tape.scale(
      tape.sub(tape.logsumexp_row(logits), tape.pick(logits, 0, static_cast<size_t>(label_idx))),
      weight);
}

GradCheckReport grad_check(const std::vector<Param*>& params,
                           const std::function<Tape::Var(Tape&)>& build, double h, double tol,
                           size_t max_coords_per_param, uint64_t seed) {
  for (Param* p : params) p->zero_grad();
  {
    Tape tape;
    Tape::Var loss = build(tape);
    tape.backward(loss);
  }
  std::mt19937_64 rng(seed);
  GradCheckReport report;
  for (Param* p : params) {
    std::vector<size_t> coords(p->value.size());
    for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (coords.size() > max_coords_per_param) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_param);
    }
    for (size_t i : coords) {
      double saved = p->value.data[i];
      p->value.data[i] = saved + h;
      Tape tp;
      double fp = tp.val(build(tp)).at(0, 0);
      p->value.data[i] = saved - h;
      Tape tm;
      double fm = tm.val(build(tm)).at(0, 0);
      p->value.data[i] = saved;
      double numeric = (fp - fm) / (2.0 * h);
      double analytic = p->grad.data[i];
      // The floor keeps central-difference roundoff (~1e-11 absolute at
      // h=1e-5) from dominating the ratio when both gradients are near zero.
      double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
      double err = std::abs(analytic - numeric) / denom;
      report.max_rel_err = std::max(report.max_rel_err, err);
      ++report.checked;
    }
  }
  report.pass = report.max_rel_err <= tol;
  return report;
}

}  // namespace orf::nn
