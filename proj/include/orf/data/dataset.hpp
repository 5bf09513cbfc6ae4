#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "orf/data/corpus.hpp"
#include "orf/mutate.hpp"

namespace orf::data {

struct LabelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateClasses : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MutantRecord {
  std::string family;
  Mutant mutant;
};

struct LabeledPair {
  std::string id;
  std::string family;
  std::string test_id;
  std::string test_text;
  std::string mut_text;      // concatenated MUT source over the candidate program
  char label = 'P';          // 'P' or 'F'
  std::string origin;        // "original" or "hom"
  int mutant_order = 0;      // 0 for original
  std::string parent;        // mutated method name, empty for original
  std::vector<int> buggy_stmts;  // mutated statement ids in mut_text coordinates
};

struct Triplet {
  std::string family;
  std::string test_id;
  std::string test_text;
  std::string mut_pass_text;
  std::string mut_fail_text;
};

struct DatasetSplit {
  std::vector<std::string> train, validation, test;  // pair ids
};

struct ClassWeights {
  double w_pass = 1.0;
  double w_fail = 1.0;
};

char label_pair(const UnitTest& test, const std::vector<mj::SourceMethod>& candidate_program,
                const std::vector<mj::SourceMethod>& reference_program,
                int64_t step_limit = mj::kDefaultStepLimit);

// One pair per (test x {original program, each mutant of a method the test
// invokes}). Deterministic order; labeling fans out across threads.
std::vector<LabeledPair> build_pairs(const Corpus& corpus, const std::vector<MutantRecord>& mutants,
                                     int64_t step_limit = mj::kDefaultStepLimit);

// All m*n (pass, fail) combinations per test.
std::vector<Triplet> build_triplets(const std::vector<LabeledPair>& pairs);

DatasetSplit split(const std::vector<LabeledPair>& pairs,
                   std::array<double, 3> ratios = {0.90, 0.05, 0.05}, uint64_t seed = 1,
                   bool stratify_by_family = false);

ClassWeights class_weights(const std::vector<LabeledPair>& pairs);

// JSONL round trips.
void save_mutants(const std::vector<MutantRecord>& mutants, const std::filesystem::path& file);
std::vector<MutantRecord> load_mutants(const std::filesystem::path& file);
void save_pairs(const std::vector<LabeledPair>& pairs, const std::filesystem::path& file);
std::vector<LabeledPair> load_pairs(const std::filesystem::path& file);
void save_triplets(const std::vector<Triplet>& triplets, const std::filesystem::path& file);
std::vector<Triplet> load_triplets(const std::filesystem::path& file);

}  // namespace orf::data
