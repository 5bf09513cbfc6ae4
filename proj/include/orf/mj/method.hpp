#pragma once

#include <map>
#include <string>
#include <vector>

#include "orf/mj/ast.hpp"
#include "orf/mj/token.hpp"

namespace orf::mj {

// A parsed, typechecked method together with its token stream and the
// token-index -> statement-id map.
struct SourceMethod {
  std::string name;
  std::vector<std::pair<std::string, MjType>> params;
  MjType return_type = MjType::Int;
  std::string source;
  Method ast;
  std::vector<Token> tokens;
  std::vector<int> stmt_of_token;  // one statement id per token
  int stmt_count = 0;
};

// Parse + typecheck a single method. Calls to methods other than the builtin
// `abs` are resolved lazily at evaluation time; the standalone typechecker
// accepts them only when a signature table is supplied (see typecheck.hpp).
SourceMethod parse_method(const std::string& source);

// Token stream and statement spans of an already parsed method.
std::pair<std::vector<Token>, std::vector<int>> tokenize_with_statements(const SourceMethod& m);

}  // namespace orf::mj
