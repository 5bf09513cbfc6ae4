#include "orf/mj/lexer.hpp"

#include <cctype>
#include <set>

namespace orf::mj {

const char* tok_kind_name(TokKind k) {
  switch (k) {
    case TokKind::Ident: return "ident";
    case TokKind::Keyword: return "keyword";
    case TokKind::IntLit: return "int-lit";
    case TokKind::NumLit: return "num-lit";
    case TokKind::BoolLit: return "bool-lit";
    case TokKind::Op: return "operator";
    case TokKind::Punct: return "punct";
  }
  return "?";
}

const char* type_name(MjType t) {
  switch (t) {
    case MjType::Int: return "int";
    case MjType::Num: return "num";
    case MjType::Bool: return "bool";
  }
  return "?";
}

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"int", "num", "bool", "if", "else", "while", "return"};
  return kw.count(s) > 0;
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  size_t i = 0;
  const size_t n = src.size();
  while (i < n) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      std::string word = src.substr(start, i - start);
      TokKind kind = TokKind::Ident;
      if (word == "true" || word == "false")
        kind = TokKind::BoolLit;
      else if (is_keyword(word))
        kind = TokKind::Keyword;
      out.push_back({word, kind, start, i});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      bool is_num = false;
      if (i < n && src[i] == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1]))) {
        is_num = true;
        ++i;
        while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < n && (src[i] == 'e' || src[i] == 'E')) {
        size_t j = i + 1;
        if (j < n && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
          is_num = true;
          i = j;
          while (i < n && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      out.push_back({src.substr(start, i - start), is_num ? TokKind::NumLit : TokKind::IntLit, start, i});
      continue;
    }
    auto two = [&](const char* op) {
      return i + 1 < n && src[i] == op[0] && src[i + 1] == op[1];
    };
    if (two("<=") || two(">=") || two("==") || two("!=") || two("&&") || two("||")) {
      out.push_back({src.substr(i, 2), TokKind::Op, i, i + 2});
      i += 2;
      continue;
    }
    if (std::string("+-*/%<>!=").find(c) != std::string::npos) {
      out.push_back({std::string(1, c), TokKind::Op, i, i + 1});
      ++i;
      continue;
    }
    if (std::string("(){},;").find(c) != std::string::npos) {
      out.push_back({std::string(1, c), TokKind::Punct, i, i + 1});
      ++i;
      continue;
    }
    throw ParseError(i, std::string("unexpected character '") + c + "'");
  }
  return out;
}

}  // namespace orf::mj
