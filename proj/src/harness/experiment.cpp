#include "orf/harness/experiment.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "orf/mj/lexer.hpp"
#include "orf/mutate.hpp"

namespace orf::harness {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json config_echo(const ExperimentConfig& cfg) {
  return {{"mode", cfg.mode},
          {"corpus",
           {{"n_families", cfg.corpus.n_families},
            {"methods_per_family", cfg.corpus.methods_per_family},
            {"tests_per_method", cfg.corpus.tests_per_method},
            {"seed", cfg.corpus.seed}}},
          {"train",
           {{"phase1_lr", cfg.train.phase1_lr},
            {"phase2_lr", cfg.train.phase2_lr},
            {"batch_size", cfg.train.batch_size},
            {"patience", cfg.train.patience},
            {"max_epochs", cfg.train.max_epochs},
            {"seed", cfg.train.seed},
            {"alpha", cfg.train.alpha},
            {"freeze_encoders", cfg.train.freeze_encoders},
            {"encoder",
             {{"layers", cfg.train.encoder.layers},
              {"heads", cfg.train.encoder.heads},
              {"emb", cfg.train.encoder.emb},
              {"ff", cfg.train.encoder.ff},
              {"out_dim", cfg.train.encoder.out_dim},
              {"max_len", cfg.train.encoder.max_len}}}}},
          {"ratios", cfg.ratios},
          {"split_seed", cfg.split_seed},
          {"mutants_per_method", cfg.mutants_per_method},
          {"max_hom_order", cfg.max_hom_order},
          {"positive_class", std::string(1, cfg.positive_class)},
          {"held_out", cfg.held_out}};
}

json report_to_json(const train::TrainReport& r) {
  return {{"epochs_run", r.epochs.size()},
          {"stop_epoch", r.stop_epoch},
          {"stop_reason", r.stop_reason},
          {"best_epoch", r.best_epoch},
          {"best_val_loss", r.best_val_loss}};
}

std::vector<data::LabeledPair> select_pairs(const std::vector<data::LabeledPair>& pairs,
                                            const std::vector<std::string>& ids) {
  std::map<std::string, const data::LabeledPair*> by_id;
  for (const auto& p : pairs) by_id[p.id] = &p;
  std::vector<data::LabeledPair> out;
  for (const auto& id : ids) out.push_back(*by_id.at(id));
  return out;
}

struct Scored {
  std::vector<char> predicted, gold;
  std::vector<std::string> families, ids;
  std::vector<double> pass_prob;
  double mean_ms = 0.0;
};

Scored score_pairs(const nn::ModelCheckpoint& model, const std::vector<data::LabeledPair>& pairs) {
  Scored s;
  double total_ms = 0.0;
  for (const auto& p : pairs) {
    train::OracleVerdict v = train::predict_texts(model, p.test_text, p.mut_text);
    s.predicted.push_back(v.label);
    s.gold.push_back(p.label);
    s.families.push_back(p.family);
    s.ids.push_back(p.id);
    s.pass_prob.push_back(v.pass_probability);
    total_ms += v.millis;
  }
  if (!pairs.empty()) s.mean_ms = total_ms / static_cast<double>(pairs.size());
  return s;
}

double majority_baseline(const std::vector<char>& gold) {
  size_t np = 0;
  for (char c : gold)
    if (c == 'P') ++np;
  size_t maj = std::max(np, gold.size() - np);
  return static_cast<double>(maj) / static_cast<double>(gold.size());
}

void write_verdicts_csv(const std::filesystem::path& file, const Scored& s) {
  std::ofstream out(file);
  out << "pair_id,gold,predicted,pass_probability\n";
  char buf[64];
  for (size_t i = 0; i < s.ids.size(); ++i) {
    auto res = std::to_chars(buf, buf + sizeof(buf), s.pass_prob[i]);
    out << s.ids[i] << "," << s.gold[i] << "," << s.predicted[i] << ","
        << std::string_view(buf, static_cast<size_t>(res.ptr - buf)) << "\n";
  }
}

std::string opt_csv(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), *v);
  return std::string(buf, static_cast<size_t>(res.ptr - buf));
}

void write_family_csv(const std::filesystem::path& file, const std::map<std::string, Metrics>& per) {
  std::ofstream out(file);
  out << "family,tp,fp,tn,fn,accuracy,precision,recall,f1\n";
  for (const auto& [fam, m] : per)
    out << fam << "," << m.tp << "," << m.fp << "," << m.tn << "," << m.fn << ","
        << opt_csv(m.accuracy) << "," << opt_csv(m.precision) << "," << opt_csv(m.recall) << ","
        << opt_csv(m.f1) << "\n";
}

struct PipelineResult {
  nn::ModelCheckpoint model;
  json report_fragment;
  json timings;
  Scored test_scored;
  Metrics test_metrics;
};

// Shared core: dataset -> split -> phase 1 -> phase 2 -> test-split scoring.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const data::Corpus& corpus,
                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<data::MutantRecord> mutants =
      generate_mutants(corpus, cfg.mutants_per_method, cfg.max_hom_order, cfg.train.seed);
  std::vector<data::LabeledPair> pairs = build_pairs(corpus, mutants);
  data::save_mutants(mutants, out_dir / "mutants.jsonl");
  data::save_pairs(pairs, out_dir / "pairs.jsonl");

  data::DatasetSplit split = data::split(pairs, cfg.ratios, cfg.split_seed, /*stratify=*/true);
  std::vector<data::LabeledPair> train_pairs = select_pairs(pairs, split.train);
  std::vector<data::LabeledPair> val_pairs = select_pairs(pairs, split.validation);
  std::vector<data::LabeledPair> test_pairs = select_pairs(pairs, split.test);

  std::vector<data::Triplet> train_triplets = data::build_triplets(train_pairs);
  std::vector<data::Triplet> val_triplets = data::build_triplets(val_pairs);
  if (val_triplets.empty()) val_triplets = data::build_triplets(val_pairs.empty() ? train_pairs : val_pairs);
  if (val_triplets.empty()) val_triplets = train_triplets;
  data::save_triplets(train_triplets, out_dir / "triplets.jsonl");
  data::ClassWeights weights = data::class_weights(train_pairs);

  auto t1 = Clock::now();
  train::TrainedModel p1 = train::train_phase1(train_triplets, val_triplets, cfg.train);
  double phase1_s = seconds_since(t1);
  auto t2 = Clock::now();
  train::TrainedModel p2 =
      train::train_phase2(train_pairs, val_pairs, std::move(p1.model), weights, cfg.train);
  double phase2_s = seconds_since(t2);
  nn::save_checkpoint(p2.model, out_dir / "checkpoint.bin");

  PipelineResult result;
  result.test_scored = score_pairs(p2.model, test_pairs);
  result.test_metrics =
      compute_metrics(result.test_scored.predicted, result.test_scored.gold, cfg.positive_class);

  size_t n_tests = 0, n_methods = 0;
  for (const auto& fam : corpus.families) {
    n_tests += fam.tests.size();
    n_methods += fam.methods.size();
  }
  result.report_fragment = {
      {"dataset",
       {{"families", corpus.families.size()},
        {"methods", n_methods},
        {"tests", n_tests},
        {"mutants", mutants.size()},
        {"pairs", pairs.size()},
        {"triplets_train", train_triplets.size()},
        {"split",
         {{"train", split.train.size()},
          {"validation", split.validation.size()},
          {"test", split.test.size()}}},
        {"class_weights", {{"pass", weights.w_pass}, {"fail", weights.w_fail}}}}},
      {"phase1", report_to_json(p1.report)},
      {"phase2", report_to_json(p2.report)},
      {"checkpoint_hash", nn::checkpoint_hash(out_dir / "checkpoint.bin")},
  };
  result.timings = {{"phase1_seconds", phase1_s},
                    {"phase2_seconds", phase2_s},
                    {"mean_inference_ms", result.test_scored.mean_ms}};
  result.model = std::move(p2.model);
  return result;
}

void finalize_report(json& report, const std::filesystem::path& out_dir) {
  report["report_hash"] = report_content_hash(report);
  std::ofstream out(out_dir / "report.json");
  out << report.dump(2) << "\n";
}

}  // namespace

std::vector<data::MutantRecord> generate_mutants(const data::Corpus& corpus,
                                                 int mutants_per_method, int max_hom_order,
                                                 uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<data::MutantRecord> out;
  for (const auto& fam : corpus.families) {
    for (const auto& method : fam.methods) {
      std::set<std::string> seen;
      int attempts = 0;
      while (static_cast<int>(seen.size()) < mutants_per_method &&
             attempts < mutants_per_method * 4) {
        int order = attempts % max_hom_order + 1;
        ++attempts;
        try {
          Mutant m = generate_hom(method, order, rng, /*shuffle=*/true);
          if (seen.insert(m.source).second) out.push_back({fam.name, std::move(m)});
        } catch (const NoMutant&) {
          break;
        }
      }
    }
  }
  return out;
}

json metrics_to_json(const Metrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"tp", m.tp},       {"fp", m.fp},
          {"tn", m.tn},       {"fn", m.fn},
          {"accuracy", opt(m.accuracy)}, {"precision", opt(m.precision)},
          {"recall", opt(m.recall)},     {"f1", opt(m.f1)}};
}

uint64_t fnv1a(std::string_view bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t report_content_hash(json report) {
  report.erase("timings");
  report.erase("report_hash");
  return fnv1a(report.dump());
}

json run_within_experiment(const ExperimentConfig& cfg) {
  data::Corpus corpus = data::synth_corpus(cfg.corpus);
  PipelineResult r = run_pipeline(cfg, corpus, cfg.out_dir);

  json report = {{"config", config_echo(cfg)}};
  report.update(r.report_fragment);
  report["metrics"] = {
      {"overall", metrics_to_json(r.test_metrics)},
      {"baseline_accuracy", majority_baseline(r.test_scored.gold)},
  };
  std::map<std::string, Metrics> per_family = compute_metrics_per_family(
      r.test_scored.predicted, r.test_scored.gold, r.test_scored.families, cfg.positive_class);
  json per = json::object();
  for (const auto& [fam, m] : per_family) per[fam] = metrics_to_json(m);
  report["metrics"]["per_family"] = per;
  report["timings"] = r.timings;

  write_verdicts_csv(cfg.out_dir / "verdicts.csv", r.test_scored);
  write_family_csv(cfg.out_dir / "metrics_per_family.csv", per_family);
  finalize_report(report, cfg.out_dir);
  return report;
}

json run_cross_family_experiment(const ExperimentConfig& cfg) {
  if (cfg.held_out.empty())
    throw std::invalid_argument("cross_family mode needs at least one held-out family");
  data::Corpus full = data::synth_corpus(cfg.corpus);
  std::set<std::string> held(cfg.held_out.begin(), cfg.held_out.end());
  for (const auto& name : held) full.family(name);  // validates the names
  data::Corpus training;
  std::vector<const data::Family*> held_families;
  for (const auto& fam : full.families) {
    if (held.count(fam.name)) held_families.push_back(&fam);
    else training.families.push_back(fam);
  }
  if (training.families.empty()) throw std::invalid_argument("no training families remain");

  PipelineResult r = run_pipeline(cfg, training, cfg.out_dir);

  // Score every pair of the held-out families with the trained model.
  data::Corpus held_corpus;
  for (const data::Family* f : held_families) held_corpus.families.push_back(*f);
  std::vector<data::MutantRecord> held_mutants =
      generate_mutants(held_corpus, cfg.mutants_per_method, cfg.max_hom_order, cfg.train.seed + 1);
  std::vector<data::LabeledPair> held_pairs = build_pairs(held_corpus, held_mutants);
  Scored held_scored = score_pairs(r.model, held_pairs);
  Metrics held_metrics = compute_metrics(held_scored.predicted, held_scored.gold, cfg.positive_class);

  // Vocabulary overlap: share of distinct held-out lexemes known to the vocab.
  std::set<std::string> held_tokens;
  for (const auto& p : held_pairs) {
    for (const auto& tok : mj::lex(p.test_text)) held_tokens.insert(tok.lexeme);
    for (const auto& tok : mj::lex(p.mut_text)) held_tokens.insert(tok.lexeme);
  }
  size_t known = 0;
  for (const auto& tok : held_tokens)
    if (r.model.vocab.token_to_id.count(tok)) ++known;
  double vocab_overlap =
      held_tokens.empty() ? 0.0 : static_cast<double>(known) / static_cast<double>(held_tokens.size());

  auto delta = [](const std::optional<double>& within, const std::optional<double>& out) {
    return (within && out) ? json(*within - *out) : json(nullptr);
  };
  json report = {{"config", config_echo(cfg)}};
  report.update(r.report_fragment);
  report["metrics"] = {
      {"within", metrics_to_json(r.test_metrics)},
      {"held_out", metrics_to_json(held_metrics)},
      {"delta_precision", delta(r.test_metrics.precision, held_metrics.precision)},
      {"delta_recall", delta(r.test_metrics.recall, held_metrics.recall)},
      {"vocab_overlap", vocab_overlap},
      {"baseline_accuracy", majority_baseline(r.test_scored.gold)},
  };
  report["timings"] = r.timings;
  report["timings"]["held_out_mean_inference_ms"] = held_scored.mean_ms;

  write_verdicts_csv(cfg.out_dir / "verdicts.csv", r.test_scored);
  write_verdicts_csv(cfg.out_dir / "verdicts_held_out.csv", held_scored);
  std::map<std::string, Metrics> per_family = compute_metrics_per_family(
      held_scored.predicted, held_scored.gold, held_scored.families, cfg.positive_class);
  write_family_csv(cfg.out_dir / "metrics_per_family.csv", per_family);
  finalize_report(report, cfg.out_dir);
  return report;
}

}  // namespace orf::harness
