#pragma once

#include <string>

#include "orf/mj/ast.hpp"

namespace orf::mj {

// Canonical source rendering. print(parse(s).ast) re-parses to a structurally
// identical AST; explicit Paren nodes are preserved and no parentheses are
// invented beyond what precedence requires.
std::string print(const Method& m);
std::string print(const Expr& e);

// Shortest round-trip rendering of a Num literal; always contains '.' or an
// exponent so it re-lexes as a NumLit (2.0 prints as "2.0", never "2").
std::string print_num(double v);

}  // namespace orf::mj
