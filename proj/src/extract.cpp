#include "orf/extract.hpp"

#include <algorithm>
#include <map>

#include "orf/mj/lexer.hpp"

namespace orf {

ExtractedMUT extract_mut(const UnitTest& test, const std::vector<mj::SourceMethod>& program) {
  std::map<std::string, const mj::SourceMethod*> by_name;
  for (const auto& m : program) by_name.emplace(m.name, &m);

  ExtractedMUT out;
  for (const auto& call : test.calls) {
    if (call.method_name == "abs") continue;  // third-party/builtin calls are excluded
    auto it = by_name.find(call.method_name);
    if (it == by_name.end()) throw AbsentMethodError(call.method_name);
    if (std::find(out.constituents.begin(), out.constituents.end(), call.method_name) !=
        out.constituents.end())
      continue;  // repeated invocations contribute the method text once
    out.constituents.push_back(call.method_name);
  }

  size_t byte_off = 0;
  for (size_t i = 0; i < out.constituents.size(); ++i) {
    const mj::SourceMethod& m = *by_name.at(out.constituents[i]);
    if (i) {
      out.concatenated_source += "\n";
      byte_off += 1;
    }
    out.concatenated_source += m.source;
    for (size_t t = 0; t < m.tokens.size(); ++t) {
      mj::Token tok = m.tokens[t];
      tok.begin += byte_off;
      tok.end += byte_off;
      out.tokens.push_back(tok);
      out.stmt_of_token.push_back(m.stmt_of_token[t] + out.stmt_count);
    }
    byte_off += m.source.size();
    out.stmt_count += m.stmt_count;
  }
  return out;
}

ExtractedMUT annotate_mut_source(const std::string& concatenated_source) {
  std::vector<mj::Token> all = mj::lex(concatenated_source);
  ExtractedMUT out;
  out.concatenated_source = concatenated_source;
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    if (all[i].lexeme == "{") ++depth;
    if (all[i].lexeme == "}" && --depth == 0) {
      std::string piece =
          concatenated_source.substr(all[start].begin, all[i].end - all[start].begin);
      mj::SourceMethod m = mj::parse_method(piece);
      out.constituents.push_back(m.name);
      for (size_t t = 0; t < m.tokens.size(); ++t) {
        mj::Token tok = m.tokens[t];
        tok.begin += all[start].begin;
        tok.end += all[start].begin;
        out.tokens.push_back(tok);
        out.stmt_of_token.push_back(m.stmt_of_token[t] + out.stmt_count);
      }
      out.stmt_count += m.stmt_count;
      start = i + 1;
    }
  }
  return out;
}

std::string render_test_text(const UnitTest& test) {
  std::string out;
  for (const auto& call : test.calls) {
    out += call.method_name + "(";
    for (size_t i = 0; i < call.args.size(); ++i) {
      if (i) out += ", ";
      out += mj::print_value(call.args[i]);
    }
    out += "); ";
  }
  if (!out.empty()) out.pop_back();  // trailing space
  return out;
}

}  // namespace orf
