#pragma once

#include <string>
#include <vector>

#include "orf/mj/ast.hpp"
#include "orf/mj/token.hpp"

namespace orf::mj {

// Throws ParseError on an unrecognized character.
std::vector<Token> lex(const std::string& source);

bool is_keyword(const std::string& s);

}  // namespace orf::mj
