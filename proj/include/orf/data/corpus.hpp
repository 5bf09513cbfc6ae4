#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "orf/extract.hpp"
#include "orf/mj/method.hpp"

namespace orf::data {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Family {
  std::string name;
  std::vector<mj::SourceMethod> methods;
  std::vector<UnitTest> tests;
};

struct Corpus {
  std::vector<Family> families;

  const Family& family(const std::string& name) const;
};

struct SynthConfig {
  int n_families = 4;
  int methods_per_family = 12;
  int tests_per_method = 6;
  double grid_lo = -4.0;
  double grid_hi = 4.0;
  double grid_step = 0.25;
  uint64_t seed = 1;
};

// Generates a deterministic corpus of typechecking methods and error-free
// tests. The first family hosts the fixture pair of implementations of
// |x|*(x+2)*(x-2). Layout: <out>/<family>/methods/*.mj + <out>/<family>/tests.json.
Corpus synth_corpus(const SynthConfig& config);
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus(const std::filesystem::path& dir);

// Fixture sources: a correct method computing |x|*(x+2)*(x-2) and a variant
// with a closing parenthesis displaced to the end of the expression.
extern const char* kFixtureCorrectSource;
extern const char* kFixtureBuggySource;

}  // namespace orf::data
