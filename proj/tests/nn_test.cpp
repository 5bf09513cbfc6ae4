#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "orf/nn/adamw.hpp"
#include "orf/nn/checkpoint.hpp"
#include "orf/nn/encoder.hpp"
#include "orf/nn/kernels.hpp"
#include "orf/nn/tape.hpp"
#include "orf/nn/vocab.hpp"

using namespace orf::nn;

namespace {

namespace fs = std::filesystem;

Tensor random_tensor(size_t r, size_t c, std::mt19937_64& rng) {
  Tensor t(r, c);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (auto& v : t.data) v = dist(rng);
  return t;
}

EncoderHyper small_hyper(int vocab) {
  EncoderHyper h;
  h.layers = 1;
  h.heads = 2;
  h.emb = 8;
  h.ff = 16;
  h.out_dim = 6;
  h.max_len = 12;
  h.vocab = vocab;
  return h;
}

}  // namespace

TEST_CASE("parallel matmul kernels are bitwise identical to the serial reference") {
  std::mt19937_64 rng(3);
  for (auto [m, k, n] : {std::tuple<size_t, size_t, size_t>{1, 1, 1},
                         {3, 5, 7},
                         {17, 9, 13},
                         {32, 32, 32}}) {
    Tensor a = random_tensor(m, k, rng), b = random_tensor(k, n, rng);
    Tensor c_par(m, n), c_ser(m, n), naive(m, n);
    kernels::matmul(a.data.data(), b.data.data(), c_par.data.data(), m, k, n);
    kernels::matmul_serial(a.data.data(), b.data.data(), c_ser.data.data(), m, k, n);
    CHECK(c_par.data == c_ser.data);
    // independent accumulation against the plain triple loop
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (size_t kk = 0; kk < k; ++kk) acc += a.at(i, kk) * b.at(kk, j);
        naive.at(i, j) = acc;
      }
    CHECK(c_ser.data == naive.data);

    Tensor at = random_tensor(k, m, rng);  // A^T * B
    Tensor t_par(m, n), t_ser(m, n);
    kernels::matmul_tn(at.data.data(), b.data.data(), t_par.data.data(), m, k, n);
    kernels::matmul_tn_serial(at.data.data(), b.data.data(), t_ser.data.data(), m, k, n);
    CHECK(t_par.data == t_ser.data);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (size_t kk = 0; kk < k; ++kk) acc += at.at(kk, i) * b.at(kk, j);
        CHECK(t_ser.at(i, j) == acc);
      }

    Tensor bt = random_tensor(n, k, rng);  // A * B^T
    Tensor u_par(m, n), u_ser(m, n);
    kernels::matmul_nt(a.data.data(), bt.data.data(), u_par.data.data(), m, k, n);
    kernels::matmul_nt_serial(a.data.data(), bt.data.data(), u_ser.data.data(), m, k, n);
    CHECK(u_par.data == u_ser.data);
  }
}

TEST_CASE("tape primitives pass finite-difference gradient checks") {
  std::mt19937_64 rng(5);
  Param a("a", 3, 4), b("b", 4, 3), g("g", 1, 4), be("be", 1, 4), bias("bias", 1, 3);
  for (Param* p : {&a, &b, &g, &be, &bias}) p->value = random_tensor(p->value.rows, p->value.cols, rng);
  g.value.fill(1.0);

  auto check = [&](std::vector<Param*> params, const std::function<Tape::Var(Tape&)>& build) {
    GradCheckReport rep = grad_check(params, build, 1e-5, 1e-4, 8, 11);
    CAPTURE(rep.max_rel_err);
    CHECK(rep.pass);
    CHECK(rep.checked > 0);
  };

  check({&a, &b, &bias}, [&](Tape& t) {
    Tape::Var prod = t.add_rowvec(t.matmul(t.leaf(a), t.leaf(b)), t.leaf(bias));
    return t.dot(prod, prod);
  });
  check({&a}, [&](Tape& t) {
    Tape::Var s = t.softmax_rows(t.leaf(a));
    return t.dot(s, t.relu(t.leaf(a)));
  });
  check({&a, &g, &be}, [&](Tape& t) {
    Tape::Var ln = t.layer_norm_rows(t.leaf(a), t.leaf(g), t.leaf(be));
    return t.dot(ln, ln);
  });
  check({&a}, [&](Tape& t) {
    Tape::Var m = t.mean_rows(t.scale(t.leaf(a), 1.7));
    return t.logsumexp_row(m);
  });
  check({&a}, [&](Tape& t) {
    Tape::Var v = t.leaf(a);
    Tape::Var parts = t.concat_cols({t.slice_cols(v, 0, 2), t.slice_cols(v, 2, 4)});
    return t.pick(t.mul(parts, parts), 1, 3);
  });
}

TEST_CASE("cosine similarity basics") {
  Tensor u(1, 3), v(1, 3);
  u.data = {1.0, 2.0, 2.0};
  v.data = {2.0, 4.0, 4.0};
  CHECK(cosine_similarity(u, v) == doctest::Approx(1.0).epsilon(1e-12));
  Tensor w(1, 3);
  w.data = {2.0, -1.0, 0.0};
  CHECK(cosine_similarity(u, w) == doctest::Approx(0.0).epsilon(1e-12));
  Tensor z(1, 3);
  CHECK_THROWS_AS(cosine_similarity(u, z), ZeroVector);

  Param a("a", 1, 4), b("b", 1, 4);
  std::mt19937_64 rng(2);
  a.value = random_tensor(1, 4, rng);
  b.value = random_tensor(1, 4, rng);
  Tape t;
  Tape::Var c = cosine_on_tape(t, t.leaf(a), t.leaf(b));
  CHECK(t.val(c).at(0, 0) == doctest::Approx(cosine_similarity(a.value, b.value)).epsilon(1e-12));
  GradCheckReport rep = grad_check({&a, &b}, [&](Tape& tp) {
    return cosine_on_tape(tp, tp.leaf(a), tp.leaf(b));
  }, 1e-5, 1e-4);
  CHECK(rep.pass);
}

TEST_CASE("margin ranking loss semantics") {
  Tensor t(1, 4), mp(1, 4), mm(1, 4);
  t.data = {1.0, 0.0, 0.0, 0.0};
  // equal distances to both candidates -> loss is exactly alpha
  mp.data = {0.0, 1.0, 0.0, 0.0};
  mm.data = {0.0, 0.0, 1.0, 0.0};
  CHECK(margin_ranking_loss(t, mp, mm, 0.2) == doctest::Approx(0.2).epsilon(1e-12));
  // m+ aligned with t, m- opposed: margin exceeded -> exactly zero
  mp = t;
  mm.data = {-1.0, 0.0, 0.0, 0.0};
  CHECK(margin_ranking_loss(t, mp, mm, 0.2) == 0.0);
  // ordering violated -> loss > alpha
  CHECK(margin_ranking_loss(t, mm, mp, 0.2) > 0.2);
}

TEST_CASE("weighted cross entropy reference values") {
  Tensor logits(1, 2);
  logits.data = {0.0, 0.0};
  CHECK(weighted_cross_entropy(logits, 0, 1.0) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-12));
  logits.data = {10.0, -10.0};
  CHECK(weighted_cross_entropy(logits, 0, 1.0) ==
        doctest::Approx(std::log1p(std::exp(-20.0))).epsilon(1e-9));
  // weight scales the loss linearly
  logits.data = {0.3, -0.7};
  CHECK(weighted_cross_entropy(logits, 1, 2.5) ==
        doctest::Approx(2.5 * weighted_cross_entropy(logits, 1, 1.0)).epsilon(1e-12));
  // extreme logits stay finite thanks to the max shift
  logits.data = {5000.0, -5000.0};
  CHECK(std::isfinite(weighted_cross_entropy(logits, 1, 1.0)));

  Param p("p", 1, 2);
  p.value.data = {0.4, -0.2};
  Tape tp;
  Tape::Var l = wcel_on_tape(tp, tp.leaf(p), 1, 1.5);
  CHECK(tp.val(l).at(0, 0) == doctest::Approx(weighted_cross_entropy(p.value, 1, 1.5)).epsilon(1e-12));
  GradCheckReport rep = grad_check({&p}, [&](Tape& t) {
    return wcel_on_tape(t, t.leaf(p), 1, 1.5);
  }, 1e-5, 1e-4);
  CHECK(rep.pass);
}

TEST_CASE("AdamW reference steps") {
  // single scalar, grad 1: m_hat = 1, v_hat = 1 -> p' ~ p - lr
  Param p("p", 1, 1);
  p.value.data = {1.0};
  AdamW opt({&p}, {.lr = 0.1});
  p.grad.data = {1.0};
  opt.step();
  CHECK(p.value.data[0] == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(opt.steps() == 1);

  // zero grad, pure decoupled decay: p' = p * (1 - lr * wd)
  Param q("q", 1, 1);
  q.value.data = {2.0};
  AdamW opt2({&q}, {.lr = 0.1, .weight_decay = 0.5});
  q.grad.data = {0.0};
  opt2.step();
  CHECK(q.value.data[0] == doctest::Approx(2.0 * (1.0 - 0.1 * 0.5)).epsilon(1e-12));

  // non-finite parameter is reported, not silently kept
  Param r("r", 1, 1);
  r.value.data = {1.0};
  AdamW opt3({&r}, {.lr = 1.0});
  r.grad.data = {std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(opt3.step(), NonFinite);
}

TEST_CASE("vocabulary reserves ids and truncates") {
  Vocab v = Vocab::build({"int f(int a) { return a + 1; }", "f(3);"});
  CHECK(v.id_to_token[Vocab::kPad] == "<pad>");
  CHECK(v.id_to_token[Vocab::kUnk] == "<unk>");
  CHECK(v.id_to_token[Vocab::kSep] == "<sep>");
  CHECK(v.id("int") >= 3);
  CHECK(v.id("never_seen_token") == Vocab::kUnk);
  // first-seen order: "int" appears before "return"
  CHECK(v.id("int") < v.id("return"));

  auto ids = v.encode("int f(int a) { return a + 1; }", 5);
  CHECK(ids.size() == 5);
  auto full = v.encode("int f(int a) { return a + 1; }", 200);
  CHECK(full.size() > 5);
  for (size_t i = 0; i < 5; ++i) CHECK(ids[i] == full[i]);

  Vocab rebuilt = Vocab::from_tokens(
      std::vector<std::string>(v.id_to_token.begin() + 3, v.id_to_token.end()));
  CHECK(rebuilt.id_to_token == v.id_to_token);
}

TEST_CASE("encoder attention is row stochastic and order sensitive") {
  std::mt19937_64 rng(21);
  EncoderParams enc("phi", small_hyper(10), rng);
  Encoded e = encode(enc, {3, 4, 5, 6});
  REQUIRE(e.attention.size() == 1);
  REQUIRE(e.attention[0].size() == 2);
  for (const auto& head : e.attention[0]) {
    REQUIRE(head.rows == 4);
    for (size_t r = 0; r < head.rows; ++r) {
      double sum = 0.0;
      for (size_t c = 0; c < head.cols; ++c) {
        sum += head.at(r, c);
        CHECK(head.at(r, c) >= 0.0);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // a single token can only attend to itself
  Encoded one = encode(enc, {3});
  CHECK(one.attention[0][0].rows == 1);
  CHECK(one.attention[0][0].at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // position embeddings make permuted inputs embed differently
  Encoded ab = encode(enc, {3, 4, 5, 6});
  Encoded ba = encode(enc, {6, 5, 4, 3});
  bool differs = false;
  for (size_t i = 0; i < ab.embedding.size(); ++i)
    if (ab.embedding.data[i] != ba.embedding.data[i]) differs = true;
  CHECK(differs);

  CHECK_THROWS_AS(encode(enc, std::vector<int>(13, 3)), SequenceTooLong);
  CHECK_THROWS_AS(encode(enc, {}), SequenceTooLong);
}

TEST_CASE("gradients flow through the full encoder + ranking loss") {
  std::mt19937_64 rng(31);
  EncoderParams phi("phi", small_hyper(9), rng);
  EncoderParams psi("psi", small_hyper(9), rng);
  std::vector<int> t_ids = {3, 4, 5}, p_ids = {4, 6, 7}, f_ids = {8, 3};
  std::vector<Param*> all = phi.params();
  for (Param* p : psi.params()) all.push_back(p);
  GradCheckReport rep = grad_check(all, [&](Tape& t) {
    Tape::Var dt = encode_on_tape(t, psi, t_ids).embedding;
    Tape::Var dp = encode_on_tape(t, phi, p_ids).embedding;
    Tape::Var df = encode_on_tape(t, phi, f_ids).embedding;
    return mrl_on_tape(t, dt, dp, df, 0.2);
  }, 1e-5, 1e-4, 2, 17);
  CAPTURE(rep.max_rel_err);
  CHECK(rep.pass);
  CHECK(rep.checked >= 50);
}

TEST_CASE("checkpoint round trip is byte identical") {
  std::mt19937_64 rng(13);
  ModelCheckpoint ckpt;
  ckpt.vocab = Vocab::build({"int f(int a) { return a * 2; }"});
  EncoderHyper h = small_hyper(static_cast<int>(ckpt.vocab.size()));
  ckpt.phi = EncoderParams("phi", h, rng);
  ckpt.psi = EncoderParams("psi", h, rng);
  ckpt.classifier = ClassifierParams(2 * h.out_dim, {10, 4}, rng);
  ckpt.meta = {7, 0.125, 99, "phase2"};

  fs::path dir = fs::temp_directory_path() / "orf_ckpt_test";
  fs::create_directories(dir);
  fs::path f1 = dir / "a.bin", f2 = dir / "b.bin";
  save_checkpoint(ckpt, f1);
  ModelCheckpoint loaded = load_checkpoint(f1);
  CHECK(loaded.meta.epoch == 7);
  CHECK(loaded.meta.best_val_loss == 0.125);
  CHECK(loaded.meta.seed == 99);
  CHECK(loaded.meta.phase == "phase2");
  CHECK(loaded.vocab.id_to_token == ckpt.vocab.id_to_token);
  save_checkpoint(loaded, f2);
  CHECK(checkpoint_hash(f1) == checkpoint_hash(f2));
  CHECK(fs::file_size(f1) == fs::file_size(f2));

  // parameter values survive the round trip exactly (float32 storage on both sides)
  std::vector<Param*> pa = ckpt.phi.params(), pb = loaded.phi.params();
  REQUIRE(pa.size() == pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    for (size_t j = 0; j < pa[i]->value.size(); ++j)
      CHECK(static_cast<float>(pa[i]->value.data[j]) == static_cast<float>(pb[i]->value.data[j]));
  }

  // corrupting the magic is rejected
  {
    std::ofstream out(f1, std::ios::binary | std::ios::in);
    out.seekp(0);
    out.write("XXXX", 4);
  }
  CHECK_THROWS_AS(load_checkpoint(f1), CheckpointError);
  fs::remove_all(dir);
}

TEST_CASE("seeded training steps are bitwise reproducible") {
  auto run = [](uint64_t seed) {
    std::mt19937_64 rng(seed);
    EncoderParams enc("phi", small_hyper(8), rng);
    std::vector<Param*> params = enc.params();
    AdamW opt(params, {.lr = 1e-3});
    std::vector<int> ids = {3, 4, 5, 6, 7};
    for (int step = 0; step < 5; ++step) {
      opt.zero_grad();
      Tape t;
      Tape::Var emb = encode_on_tape(t, enc, ids).embedding;
      t.backward(t.dot(emb, emb));
      opt.step();
    }
    std::vector<double> flat;
    for (Param* p : params) flat.insert(flat.end(), p->value.data.begin(), p->value.data.end());
    return flat;
  };
  CHECK(run(123) == run(123));
  CHECK(run(123) != run(124));
}
