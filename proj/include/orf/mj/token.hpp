#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace orf::mj {

enum class TokKind { Ident, Keyword, IntLit, NumLit, BoolLit, Op, Punct };

struct Token {
  std::string lexeme;
  TokKind kind = TokKind::Ident;
  size_t begin = 0;  // byte offsets into the source
  size_t end = 0;
};

const char* tok_kind_name(TokKind k);

}  // namespace orf::mj
