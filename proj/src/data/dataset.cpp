#include "orf/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>

#include <json.hpp>

namespace orf::data {

using nlohmann::json;

char label_pair(const UnitTest& test, const std::vector<mj::SourceMethod>& candidate_program,
                const std::vector<mj::SourceMethod>& reference_program, int64_t step_limit) {
  mj::EvalOutcome ref = mj::evaluate(reference_program, test.calls, step_limit);
  if (!ref.ok && (ref.error == mj::RuntimeErrorKind::AbsentMethod ||
                  ref.error == mj::RuntimeErrorKind::ArityMismatch))
    throw LabelError("reference program failed with " +
                     std::string(mj::runtime_error_name(ref.error)) + " on test " + test.id);
  mj::EvalOutcome cand = mj::evaluate(candidate_program, test.calls, step_limit);
  return mj::outcomes_equal(cand, ref) ? 'P' : 'F';
}

namespace {

struct Job {
  const Family* family;
  const UnitTest* test;
  const MutantRecord* mutant;  // null for the original pair
  int mutant_index;            // index within the family's mutant list
};

LabeledPair run_job(const Job& job, int64_t step_limit) {
  const Family& fam = *job.family;
  const UnitTest& test = *job.test;
  LabeledPair pair;
  pair.family = fam.name;
  pair.test_id = test.id;
  pair.test_text = render_test_text(test);
  if (!job.mutant) {
    pair.id = fam.name + "/" + test.id + "/original";
    pair.label = label_pair(test, fam.methods, fam.methods, step_limit);
    pair.origin = "original";
    pair.mut_text = extract_mut(test, fam.methods).concatenated_source;
    return pair;
  }
  const Mutant& mut = job.mutant->mutant;
  std::vector<mj::SourceMethod> candidate = fam.methods;
  for (auto& m : candidate)
    if (m.name == mut.parent) m = mj::parse_method(mut.source);
  pair.id = fam.name + "/" + test.id + "/" + mut.parent + "#" + std::to_string(job.mutant_index);
  pair.label = label_pair(test, candidate, fam.methods, step_limit);
  pair.origin = "hom";
  pair.mutant_order = mut.order;
  pair.parent = mut.parent;
  ExtractedMUT ext = extract_mut(test, candidate);
  pair.mut_text = ext.concatenated_source;
  // statement ids of the mutated sites, re-based into the concatenation
  int offset = 0;
  for (const auto& name : ext.constituents) {
    if (name == mut.parent) break;
    for (const auto& m : candidate)
      if (m.name == name) offset += m.stmt_count;
  }
  std::set<int> stmts;
  for (const auto& applied : mut.applied) stmts.insert(applied.stmt + offset);
  pair.buggy_stmts.assign(stmts.begin(), stmts.end());
  return pair;
}

}  // namespace

std::vector<LabeledPair> build_pairs(const Corpus& corpus, const std::vector<MutantRecord>& mutants,
                                     int64_t step_limit) {
  std::vector<Job> jobs;
  for (const auto& fam : corpus.families) {
    std::vector<std::pair<const MutantRecord*, int>> fam_muts;
    int idx = 0;
    for (const auto& mr : mutants) {
      if (mr.family == fam.name) fam_muts.emplace_back(&mr, idx++);
    }
    for (const auto& test : fam.tests) {
      jobs.push_back({&fam, &test, nullptr, -1});
      std::set<std::string> invoked;
      for (const auto& c : test.calls) invoked.insert(c.method_name);
      for (const auto& [mr, i] : fam_muts)
        if (invoked.count(mr->mutant.parent)) jobs.push_back({&fam, &test, mr, i});
    }
  }
  std::vector<LabeledPair> pairs(jobs.size());
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < static_cast<long>(jobs.size()); ++i) {
    try {
      pairs[i] = run_job(jobs[i], step_limit);
    } catch (const std::exception& e) {
#pragma omp critical
      error = e.what();
    }
  }
  if (!error.empty()) throw LabelError(error);
  return pairs;
}

std::vector<Triplet> build_triplets(const std::vector<LabeledPair>& pairs) {
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<const LabeledPair*>, std::vector<const LabeledPair*>>> by_test;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& p : pairs) {
    auto key = std::make_pair(p.family, p.test_id);
    if (!by_test.count(key)) order.push_back(key);
    auto& bucket = by_test[key];
    (p.label == 'P' ? bucket.first : bucket.second).push_back(&p);
  }
  std::vector<Triplet> out;
  for (const auto& key : order) {
    const auto& [passes, fails] = by_test[key];
    for (const LabeledPair* p : passes)
      for (const LabeledPair* f : fails)
        out.push_back({key.first, key.second, p->test_text, p->mut_text, f->mut_text});
  }
  return out;
}

namespace {

void partition(const std::vector<std::string>& ids, const std::array<double, 3>& ratios,
               std::mt19937_64& rng, DatasetSplit& out) {
  std::vector<std::string> shuffled = ids;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  size_t n = shuffled.size();
  size_t n_val = static_cast<size_t>(n * ratios[1]);
  size_t n_test = static_cast<size_t>(n * ratios[2]);
  size_t n_train = n - n_val - n_test;
  if ((n_train == 0 && ratios[0] > 0) || (n_val == 0 && ratios[1] > 0) ||
      (n_test == 0 && ratios[2] > 0))
    throw InsufficientData("a split with positive ratio would be empty (n=" + std::to_string(n) + ")");
  out.train.insert(out.train.end(), shuffled.begin(), shuffled.begin() + n_train);
  out.validation.insert(out.validation.end(), shuffled.begin() + n_train, shuffled.begin() + n_train + n_val);
  out.test.insert(out.test.end(), shuffled.begin() + n_train + n_val, shuffled.end());
}

}  // namespace

DatasetSplit split(const std::vector<LabeledPair>& pairs, std::array<double, 3> ratios,
                   uint64_t seed, bool stratify_by_family) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  std::mt19937_64 rng(seed);
  DatasetSplit out;
  if (!stratify_by_family) {
    std::vector<std::string> ids;
    for (const auto& p : pairs) ids.push_back(p.id);
    partition(ids, ratios, rng, out);
    return out;
  }
  std::map<std::string, std::vector<std::string>> by_family;
  std::vector<std::string> fam_order;
  for (const auto& p : pairs) {
    if (!by_family.count(p.family)) fam_order.push_back(p.family);
    by_family[p.family].push_back(p.id);
  }
  for (const auto& fam : fam_order) partition(by_family[fam], ratios, rng, out);
  return out;
}

ClassWeights class_weights(const std::vector<LabeledPair>& pairs) {
  size_t n_pass = 0, n_fail = 0;
  for (const auto& p : pairs) (p.label == 'P' ? n_pass : n_fail)++;
  if (n_pass == 0 || n_fail == 0) throw DegenerateClasses("both classes must be present");
  double total = static_cast<double>(pairs.size());
  return {total / (2.0 * n_pass), total / (2.0 * n_fail)};
}

// ---------------------------------------------------------------------------
// JSONL

namespace {

json mutable_to_json(const Mutable& m) {
  return {{"op", operator_name(m.op)}, {"stmt", m.stmt}, {"node", m.node}, {"variant", m.variant}};
}

Mutable mutable_from_json(const json& j) {
  return {operator_from_name(j.at("op").get<std::string>()), j.at("stmt").get<int>(),
          j.at("node").get<int>(), j.at("variant").get<int>()};
}

std::vector<json> read_jsonl(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

void save_mutants(const std::vector<MutantRecord>& mutants, const std::filesystem::path& file) {
  std::ofstream out(file);
  for (const auto& mr : mutants) {
    json applied = json::array();
    for (const auto& m : mr.mutant.applied) applied.push_back(mutable_to_json(m));
    out << json{{"family", mr.family},
                {"parent", mr.mutant.parent},
                {"source", mr.mutant.source},
                {"applied", applied},
                {"order", mr.mutant.order}}
               .dump()
        << "\n";
  }
}

std::vector<MutantRecord> load_mutants(const std::filesystem::path& file) {
  std::vector<MutantRecord> out;
  for (const auto& j : read_jsonl(file)) {
    MutantRecord mr;
    mr.family = j.at("family").get<std::string>();
    mr.mutant.parent = j.at("parent").get<std::string>();
    mr.mutant.source = j.at("source").get<std::string>();
    mr.mutant.order = j.at("order").get<int>();
    for (const auto& ja : j.at("applied")) mr.mutant.applied.push_back(mutable_from_json(ja));
    out.push_back(std::move(mr));
  }
  return out;
}

void save_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& file) {
  std::ofstream out(file);
  for (const auto& p : pairs) {
    out << json{{"id", p.id},
                {"family", p.family},
                {"test_id", p.test_id},
                {"test_text", p.test_text},
                {"mut_text", p.mut_text},
                {"label", std::string(1, p.label)},
                {"origin", p.origin},
                {"order", p.mutant_order},
                {"parent", p.parent},
                {"buggy_stmts", p.buggy_stmts}}
               .dump()
        << "\n";
  }
}

std::vector<LabeledPair> load_pairs(const std::filesystem::path& file) {
  std::vector<LabeledPair> out;
  for (const auto& j : read_jsonl(file)) {
    LabeledPair p;
    p.id = j.at("id").get<std::string>();
    p.family = j.at("family").get<std::string>();
    p.test_id = j.at("test_id").get<std::string>();
    p.test_text = j.at("test_text").get<std::string>();
    p.mut_text = j.at("mut_text").get<std::string>();
    p.label = j.at("label").get<std::string>().at(0);
    p.origin = j.at("origin").get<std::string>();
    p.mutant_order = j.at("order").get<int>();
    p.parent = j.at("parent").get<std::string>();
    p.buggy_stmts = j.at("buggy_stmts").get<std::vector<int>>();
    out.push_back(std::move(p));
  }
  return out;
}

void save_triplets(const std::vector<Triplet>& triplets, const std::filesystem::path& file) {
  std::ofstream out(file);
  for (const auto& t : triplets) {
    out << json{{"family", t.family},
                {"test_id", t.test_id},
                {"test_text", t.test_text},
                {"mut_pass_text", t.mut_pass_text},
                {"mut_fail_text", t.mut_fail_text}}
               .dump()
        << "\n";
  }
}

std::vector<Triplet> load_triplets(const std::filesystem::path& file) {
  std::vector<Triplet> out;
  for (const auto& j : read_jsonl(file)) {
    Triplet t;
    t.family = j.at("family").get<std::string>();
    t.test_id = j.at("test_id").get<std::string>();
    t.test_text = j.at("test_text").get<std::string>();
    t.mut_pass_text = j.at("mut_pass_text").get<std::string>();
    t.mut_fail_text = j.at("mut_fail_text").get<std::string>();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace orf::data
