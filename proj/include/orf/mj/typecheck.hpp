#pragma once

#include <map>
#include <string>
#include <vector>

#include "orf/mj/ast.hpp"

namespace orf::mj {

struct Signature {
  std::vector<MjType> params;
  MjType ret;
};

using SignatureTable = std::map<std::string, Signature>;

// Typechecks the method in place (annotates Expr::type). `table` supplies
// signatures of callable corpus methods; the builtin `abs` is always
// available (Int -> Int, Num -> Num). Throws TypeError. Statement ids must be
// assigned before the check. Also verifies that every control-flow path
// returns a value of the declared type.
void typecheck(Method& m, const SignatureTable& table = {});

}  // namespace orf::mj
