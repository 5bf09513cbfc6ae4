#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "orf/harness/experiment.hpp"
#include "orf/interpret/heatmap.hpp"
#include "orf/interpret/lda.hpp"
#include "orf/train/trainer.hpp"

using nlohmann::json;
using namespace orf;

namespace {

struct DomainError {};  // carrier: message already printed

std::vector<double> parse_k_grid(const std::string& spec) {
  double lo = 5, hi = 50, step = 5;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
    throw CLI::ValidationError("--k-grid expects lo:hi:step");
  std::vector<double> grid;
  for (double k = lo; k <= hi + 1e-9; k += step) grid.push_back(k);
  return grid;
}

const data::LabeledPair& find_pair(const std::vector<data::LabeledPair>& pairs,
                                   const std::string& id) {
  for (const auto& p : pairs)
    if (p.id == id) return p;
  throw std::runtime_error("pair id '" + id + "' not found");
}

// Collapsed final-layer attention of phi over the (possibly truncated) MUT
// tokens, annotated with lexemes and statement ids.
interpret::AttentionMatrix mut_attention(const nn::ModelCheckpoint& ckpt,
                                         const std::string& mut_text) {
  ExtractedMUT ann = annotate_mut_source(mut_text);
  size_t max_len = static_cast<size_t>(ckpt.phi.hyper.max_len);
  std::vector<int> ids = ckpt.vocab.encode(mut_text, max_len);
  std::vector<std::string> tokens;
  std::vector<int> stmts;
  for (size_t i = 0; i < ids.size(); ++i) {
    tokens.push_back(ann.tokens[i].lexeme);
    stmts.push_back(ann.stmt_of_token[i]);
  }
  nn::Encoded enc = nn::encode(ckpt.phi, ids);
  return interpret::collapse_attention(enc.attention.back(), std::move(tokens), std::move(stmts));
}

void add_train_flags(CLI::App* cmd, train::TrainConfig& cfg) {
  cmd->add_option("--phase1-lr", cfg.phase1_lr, "Phase-1 learning rate");
  cmd->add_option("--phase2-lr", cfg.phase2_lr, "Phase-2 learning rate");
  cmd->add_option("--batch-size", cfg.batch_size, "Batch size");
  cmd->add_option("--patience", cfg.patience, "Early-stopping patience (epochs)");
  cmd->add_option("--max-epochs", cfg.max_epochs, "Epoch ceiling");
  cmd->add_option("--alpha", cfg.alpha, "MRL margin");
  cmd->add_option("--weight-decay", cfg.weight_decay, "AdamW weight decay");
  cmd->add_flag("--freeze-encoders", cfg.freeze_encoders, "Do not fine-tune encoders in phase 2");
  cmd->add_option("--layers", cfg.encoder.layers, "Encoder layers");
  cmd->add_option("--heads", cfg.encoder.heads, "Attention heads");
  cmd->add_option("--emb", cfg.encoder.emb, "Token embedding width");
  cmd->add_option("--ff", cfg.encoder.ff, "Feed-forward width");
  cmd->add_option("--out-dim", cfg.encoder.out_dim, "Shared embedding dimension d");
  cmd->add_option("--max-len", cfg.encoder.max_len, "Sequence length cap");
  cmd->add_option("--hidden", cfg.classifier_hidden, "Classifier hidden sizes");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned test-oracle pipeline for the MJ mini-language"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override");

  uint64_t seed = 1;
  app.add_option("--seed", seed, "Global seed")->envname("ORACLEFORGE_SEED");

  // ---- corpus ----
  auto* c_corpus = app.add_subcommand("corpus", "Generate a synthetic corpus");
  std::string corpus_out;
  data::SynthConfig synth;
  c_corpus->add_option("--out", corpus_out, "Output directory")->required();
  c_corpus->add_option("--families", synth.n_families, "Family count");
  c_corpus->add_option("--methods-per-family", synth.methods_per_family, "Methods per family");
  c_corpus->add_option("--tests-per-method", synth.tests_per_method, "Tests per method");

  // ---- mutate ----
  auto* c_mutate = app.add_subcommand("mutate", "Generate higher-order mutants");
  std::string mut_corpus, mut_out, mut_family;
  int mut_order = 2, mut_per_method = 6;
  c_mutate->add_option("--corpus", mut_corpus, "Corpus directory")->required();
  c_mutate->add_option("--out", mut_out, "Output mutants.jsonl")->required();
  c_mutate->add_option("--family", mut_family, "Restrict to one family");
  c_mutate->add_option("--order", mut_order, "Maximum mutation order");
  c_mutate->add_option("--per-method", mut_per_method, "Mutants per method");

  // ---- label ----
  auto* c_label = app.add_subcommand("label", "Label (test, program) pairs by differential execution");
  std::string lab_corpus, lab_mutants, lab_out;
  c_label->add_option("--corpus", lab_corpus, "Corpus directory")->required();
  c_label->add_option("--mutants", lab_mutants, "mutants.jsonl")->required();
  c_label->add_option("--out", lab_out, "Output pairs.jsonl")->required();

  // ---- dataset build ----
  auto* c_dataset = app.add_subcommand("dataset", "Dataset assembly");
  auto* c_build = c_dataset->add_subcommand("build", "Pairs, triplets, and the split");
  std::string ds_corpus, ds_mutants, ds_out;
  std::vector<double> ds_ratios = {0.90, 0.05, 0.05};
  bool ds_no_stratify = false;
  c_build->add_option("--corpus", ds_corpus, "Corpus directory")->required();
  c_build->add_option("--mutants", ds_mutants, "mutants.jsonl")->required();
  c_build->add_option("--out", ds_out, "Output directory")->required();
  c_build->add_option("--ratios", ds_ratios, "train val test ratios")->expected(3);
  c_build->add_flag("--no-stratify", ds_no_stratify, "Disable per-family stratification");

  // ---- train ----
  auto* c_train = app.add_subcommand("train", "Two-phase training");
  std::string tr_dataset, tr_out;
  train::TrainConfig tr_cfg;
  c_train->add_option("--dataset", tr_dataset, "Dataset directory (from `dataset build`)")->required();
  c_train->add_option("--out", tr_out, "Output directory")->required();
  add_train_flags(c_train, tr_cfg);

  // ---- predict ----
  auto* c_predict = app.add_subcommand("predict", "Oracle verdict for one test");
  std::string pr_ckpt, pr_corpus, pr_family, pr_test;
  c_predict->add_option("--ckpt", pr_ckpt, "Checkpoint file")->required();
  c_predict->add_option("--corpus", pr_corpus, "Corpus directory")->required();
  c_predict->add_option("--family", pr_family, "Family name")->required();
  c_predict->add_option("--test-id", pr_test, "Test id")->required();

  // ---- eval ----
  auto* c_eval = app.add_subcommand("eval", "Seeded end-to-end experiment");
  harness::ExperimentConfig ex;
  std::string ex_out;
  c_eval->add_option("--out", ex_out, "Output directory")->required();
  c_eval->add_option("--mode", ex.mode, "within | cross_family")
      ->check(CLI::IsMember({"within", "cross_family"}));
  c_eval->add_option("--held-out", ex.held_out, "Held-out families (cross_family mode)");
  c_eval->add_option("--families", ex.corpus.n_families, "Family count");
  c_eval->add_option("--methods-per-family", ex.corpus.methods_per_family, "Methods per family");
  c_eval->add_option("--tests-per-method", ex.corpus.tests_per_method, "Tests per method");
  c_eval->add_option("--mutants-per-method", ex.mutants_per_method, "Mutants per method");
  c_eval->add_option("--max-hom-order", ex.max_hom_order, "Maximum mutation order");
  std::string ex_positive = "P";
  c_eval->add_option("--positive-class", ex_positive, "Positive class for metrics (P or F)")
      ->check(CLI::IsMember({"P", "F"}));
  add_train_flags(c_eval, ex.train);

  // ---- explain ----
  auto* c_explain = app.add_subcommand("explain", "Attention analysis for one pair");
  std::string xp_ckpt, xp_pairs, xp_id, xp_out;
  double xp_k = 20.0;
  c_explain->add_option("--ckpt", xp_ckpt, "Checkpoint file")->required();
  c_explain->add_option("--pairs", xp_pairs, "pairs.jsonl")->required();
  c_explain->add_option("--pair-id", xp_id, "Pair id")->required();
  c_explain->add_option("--k", xp_k, "Attention threshold percent");
  c_explain->add_option("--out", xp_out, "Output directory")->required();

  // ---- embed-viz ----
  auto* c_viz = app.add_subcommand("embed-viz", "LDA separation of MUT embeddings");
  std::string vz_ckpt, vz_pairs, vz_out;
  c_viz->add_option("--ckpt", vz_ckpt, "Checkpoint file")->required();
  c_viz->add_option("--pairs", vz_pairs, "pairs.jsonl")->required();
  c_viz->add_option("--out", vz_out, "Output directory")->required();

  // ---- localize ----
  auto* c_localize = app.add_subcommand("localize", "Bug-localization curve over fail pairs");
  std::string lc_ckpt, lc_pairs, lc_out, lc_grid = "5:50:5";
  c_localize->add_option("--ckpt", lc_ckpt, "Checkpoint file")->required();
  c_localize->add_option("--pairs", lc_pairs, "pairs.jsonl")->required();
  c_localize->add_option("--k-grid", lc_grid, "lo:hi:step percents");
  c_localize->add_option("--out", lc_out, "Output curve.csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_corpus) {
      synth.seed = seed;
      data::Corpus corpus = data::synth_corpus(synth);
      data::save_corpus(corpus, corpus_out);
      size_t tests = 0;
      for (const auto& f : corpus.families) tests += f.tests.size();
      std::printf("wrote %zu families, %zu tests to %s\n", corpus.families.size(), tests,
                  corpus_out.c_str());
    } else if (*c_mutate) {
      data::Corpus corpus = data::load_corpus(mut_corpus);
      if (!mut_family.empty()) {
        data::Corpus one;
        one.families.push_back(corpus.family(mut_family));
        corpus = std::move(one);
      }
      auto mutants = harness::generate_mutants(corpus, mut_per_method, mut_order, seed);
      data::save_mutants(mutants, mut_out);
      std::printf("wrote %zu mutants to %s\n", mutants.size(), mut_out.c_str());
    } else if (*c_label) {
      data::Corpus corpus = data::load_corpus(lab_corpus);
      auto pairs = data::build_pairs(corpus, data::load_mutants(lab_mutants));
      data::save_pairs(pairs, lab_out);
      std::printf("wrote %zu labeled pairs to %s\n", pairs.size(), lab_out.c_str());
    } else if (*c_build) {
      data::Corpus corpus = data::load_corpus(ds_corpus);
      auto pairs = data::build_pairs(corpus, data::load_mutants(ds_mutants));
      auto triplets = data::build_triplets(pairs);
      auto split = data::split(pairs, {ds_ratios[0], ds_ratios[1], ds_ratios[2]}, seed,
                               !ds_no_stratify);
      auto weights = data::class_weights(pairs);
      std::filesystem::create_directories(ds_out);
      data::save_pairs(pairs, std::filesystem::path(ds_out) / "pairs.jsonl");
      data::save_triplets(triplets, std::filesystem::path(ds_out) / "triplets.jsonl");
      std::ofstream out(std::filesystem::path(ds_out) / "split.json");
      out << json{{"seed", seed},
                  {"ratios", ds_ratios},
                  {"train", split.train},
                  {"validation", split.validation},
                  {"test", split.test},
                  {"class_weights", {{"pass", weights.w_pass}, {"fail", weights.w_fail}}}}
                 .dump(2)
          << "\n";
      std::printf("wrote %zu pairs, %zu triplets, split %zu/%zu/%zu to %s\n", pairs.size(),
                  triplets.size(), split.train.size(), split.validation.size(), split.test.size(),
                  ds_out.c_str());
    } else if (*c_train) {
      tr_cfg.seed = seed;
      auto pairs = data::load_pairs(std::filesystem::path(tr_dataset) / "pairs.jsonl");
      std::ifstream in(std::filesystem::path(tr_dataset) / "split.json");
      if (!in) throw std::runtime_error("missing split.json in " + tr_dataset);
      json sp = json::parse(in);
      auto pick = [&](const char* key) {
        std::vector<data::LabeledPair> out;
        for (const auto& id : sp.at(key).get<std::vector<std::string>>())
          out.push_back(find_pair(pairs, id));
        return out;
      };
      auto train_pairs = pick("train");
      auto val_pairs = pick("validation");
      auto weights = data::class_weights(train_pairs);
      auto train_triplets = data::build_triplets(train_pairs);
      auto val_triplets = data::build_triplets(val_pairs);
      if (val_triplets.empty()) val_triplets = train_triplets;
      auto p1 = train::train_phase1(train_triplets, val_triplets, tr_cfg);
      auto p2 = train::train_phase2(train_pairs, val_pairs, std::move(p1.model), weights, tr_cfg);
      std::filesystem::create_directories(tr_out);
      nn::save_checkpoint(p2.model, std::filesystem::path(tr_out) / "checkpoint.bin");
      auto epochs_json = [](const train::TrainReport& r) {
        json arr = json::array();
        for (const auto& e : r.epochs)
          arr.push_back({{"epoch", e.epoch},
                         {"train_loss", e.train_loss},
                         {"val_loss", e.val_loss},
                         {"seconds", e.seconds}});
        return json{{"stop_epoch", r.stop_epoch},
                    {"stop_reason", r.stop_reason},
                    {"best_epoch", r.best_epoch},
                    {"best_val_loss", r.best_val_loss},
                    {"epochs", arr}};
      };
      std::ofstream rep(std::filesystem::path(tr_out) / "train_report.json");
      rep << json{{"phase1", epochs_json(p1.report)}, {"phase2", epochs_json(p2.report)}}.dump(2)
          << "\n";
      std::printf("phase1 stopped at %d (%s), phase2 at %d (%s); checkpoint in %s\n",
                  p1.report.stop_epoch, p1.report.stop_reason.c_str(), p2.report.stop_epoch,
                  p2.report.stop_reason.c_str(), tr_out.c_str());
    } else if (*c_predict) {
      auto ckpt = nn::load_checkpoint(pr_ckpt);
      data::Corpus corpus = data::load_corpus(pr_corpus);
      const data::Family& fam = corpus.family(pr_family);
      const UnitTest* test = nullptr;
      for (const auto& t : fam.tests)
        if (t.id == pr_test) test = &t;
      if (!test) throw std::runtime_error("test '" + pr_test + "' not found in " + pr_family);
      auto v = train::predict(ckpt, *test, fam.methods);
      std::cout << json{{"family", pr_family},
                        {"test_id", pr_test},
                        {"label", std::string(1, v.label)},
                        {"pass_probability", v.pass_probability},
                        {"truncated", v.truncated},
                        {"millis", v.millis}}
                       .dump(2)
                << "\n";
    } else if (*c_eval) {
      ex.corpus.seed = seed;
      ex.split_seed = seed;
      ex.train.seed = seed;
      ex.positive_class = ex_positive[0];
      ex.out_dir = ex_out;
      json report = ex.mode == "within" ? harness::run_within_experiment(ex)
                                        : harness::run_cross_family_experiment(ex);
      std::cout << report["metrics"].dump(2) << "\n";
    } else if (*c_explain) {
      auto ckpt = nn::load_checkpoint(xp_ckpt);
      const auto pairs = data::load_pairs(xp_pairs);
      const data::LabeledPair& pair = find_pair(pairs, xp_id);
      interpret::AttentionMatrix sa = mut_attention(ckpt, pair.mut_text);
      interpret::AttentionReport rep = interpret::attention_analysis(sa, xp_k);
      std::filesystem::create_directories(xp_out);
      interpret::emit_heatmap(sa, std::filesystem::path(xp_out) / "attention.svg");
      json atkn = json::array();
      for (const auto& [tok, idx] : rep.atkn) atkn.push_back({{"token", tok}, {"index", idx}});
      std::ofstream out(std::filesystem::path(xp_out) / "report.json");
      out << json{{"pair_id", pair.id},
                  {"k", rep.k},
                  {"atkn", atkn},
                  {"asmt", rep.asmt},
                  {"buggy_stmts", pair.buggy_stmts}}
                 .dump(2)
          << "\n";
      std::printf("attended %zu tokens, %zu statements; artifacts in %s\n", rep.atkn.size(),
                  rep.asmt.size(), xp_out.c_str());
    } else if (*c_viz) {
      auto ckpt = nn::load_checkpoint(vz_ckpt);
      const auto pairs = data::load_pairs(vz_pairs);
      std::vector<std::vector<double>> embeddings;
      std::vector<int> labels;
      for (const auto& p : pairs) {
        auto v = train::predict_texts(ckpt, p.test_text, p.mut_text);
        embeddings.push_back(v.d_m.data);
        labels.push_back(p.label == 'P' ? 0 : 1);
      }
      interpret::LdaProjection proj = interpret::lda_project(embeddings, labels);
      std::filesystem::create_directories(vz_out);
      std::ofstream csv(std::filesystem::path(vz_out) / "lda_projection.csv");
      csv << "projection,label\n";
      for (size_t i = 0; i < proj.projected.size(); ++i)
        csv << proj.projected[i] << "," << (proj.labels[i] ? "buggy" : "correct") << "\n";
      // two-class histogram as overlaid translucent bars
      double lo = *std::min_element(proj.projected.begin(), proj.projected.end());
      double hi = *std::max_element(proj.projected.begin(), proj.projected.end());
      constexpr int bins = 64, w = 8, hgt = 160;
      std::vector<int> h0(bins, 0), h1(bins, 0);
      for (size_t i = 0; i < proj.projected.size(); ++i) {
        int b = hi > lo ? std::min(bins - 1, static_cast<int>((proj.projected[i] - lo) /
                                                              (hi - lo) * bins))
                        : 0;
        (proj.labels[i] ? h1 : h0)[b]++;
      }
      int peak = 1;
      for (int b = 0; b < bins; ++b) peak = std::max({peak, h0[b], h1[b]});
      std::ofstream svg(std::filesystem::path(vz_out) / "lda_histogram.svg");
      svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << bins * w << "\" height=\""
          << hgt << "\">\n";
      for (int b = 0; b < bins; ++b) {
        int bh0 = h0[b] * (hgt - 10) / peak, bh1 = h1[b] * (hgt - 10) / peak;
        svg << "<rect x=\"" << b * w << "\" y=\"" << hgt - bh0 << "\" width=\"" << w
            << "\" height=\"" << bh0 << "\" fill=\"steelblue\" fill-opacity=\"0.6\"/>\n";
        svg << "<rect x=\"" << b * w << "\" y=\"" << hgt - bh1 << "\" width=\"" << w
            << "\" height=\"" << bh1 << "\" fill=\"firebrick\" fill-opacity=\"0.6\"/>\n";
      }
      svg << "</svg>\n";
      std::ofstream out(std::filesystem::path(vz_out) / "lda.json");
      out << json{{"overlap", proj.overlap},
                  {"mean_correct", proj.mean0},
                  {"mean_buggy", proj.mean1},
                  {"var_correct", proj.var0},
                  {"var_buggy", proj.var1}}
                 .dump(2)
          << "\n";
      std::printf("overlap coefficient %.4f; artifacts in %s\n", proj.overlap, vz_out.c_str());
    } else if (*c_localize) {
      auto ckpt = nn::load_checkpoint(lc_ckpt);
      const auto pairs = data::load_pairs(lc_pairs);
      std::vector<double> grid = parse_k_grid(lc_grid);
      std::vector<std::vector<interpret::AttentionReport>> reports;
      std::vector<std::vector<int>> buggy;
      for (const auto& p : pairs) {
        if (p.label != 'F' || p.buggy_stmts.empty()) continue;
        interpret::AttentionMatrix sa = mut_attention(ckpt, p.mut_text);
        std::vector<interpret::AttentionReport> per_k;
        for (double k : grid) per_k.push_back(interpret::attention_analysis(sa, k));
        reports.push_back(std::move(per_k));
        buggy.push_back(p.buggy_stmts);
      }
      auto curve = interpret::localization_curve(reports, buggy, grid);
      std::ofstream out(lc_out);
      out << "k,percent\n";
      for (const auto& pt : curve) out << pt.k << "," << pt.percent << "\n";
      std::printf("localization over %zu fail pairs written to %s\n", reports.size(),
                  lc_out.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
