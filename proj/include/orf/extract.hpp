#pragma once

#include <string>
#include <vector>

#include "orf/mj/interp.hpp"
#include "orf/mj/method.hpp"

namespace orf {

struct UnitTest {
  std::string id;
  std::string family;
  std::vector<mj::Invocation> calls;
};

struct AbsentMethodError : std::runtime_error {
  explicit AbsentMethodError(const std::string& name)
      : std::runtime_error("method '" + name + "' not found in program") {}
};

// Concatenated source of the methods a test directly invokes, in order of
// first invocation, with token/statement indices re-based across the join.
struct ExtractedMUT {
  std::string concatenated_source;
  std::vector<std::string> constituents;
  std::vector<mj::Token> tokens;
  std::vector<int> stmt_of_token;
  int stmt_count = 0;
};

// Whole-body extraction: the full signature + body of every directly invoked
// program method, once each, in order of first invocation. Builtin `abs`
// calls are skipped. Throws AbsentMethodError for unresolvable methods.
ExtractedMUT extract_mut(const UnitTest& test, const std::vector<mj::SourceMethod>& program);

// Canonical assertion-free rendering: "name(args); name(args); ...".
std::string render_test_text(const UnitTest& test);

// Re-derives token/statement annotations from a previously rendered
// concatenated MUT source (one or more methods back to back).
ExtractedMUT annotate_mut_source(const std::string& concatenated_source);

}  // namespace orf
