#include "orf/nn/vocab.hpp"

#include "orf/mj/lexer.hpp"

namespace orf::nn {

Vocab Vocab::from_tokens(const std::vector<std::string>& non_reserved) {
  Vocab v;
  v.id_to_token = {"<pad>", "<unk>", "<sep>"};
  for (const auto& tok : non_reserved) {
    if (v.token_to_id.count(tok)) continue;
    v.token_to_id[tok] = static_cast<int>(v.id_to_token.size());
    v.id_to_token.push_back(tok);
  }
  return v;
}

Vocab Vocab::build(const std::vector<std::string>& texts) {
  std::vector<std::string> tokens;
  for (const auto& text : texts)
    for (const auto& tok : mj::lex(text)) tokens.push_back(tok.lexeme);
  return from_tokens(tokens);
}

int Vocab::id(const std::string& token) const {
  auto it = token_to_id.find(token);
  return it == token_to_id.end() ? kUnk : it->second;
}

std::vector<int> Vocab::encode(const std::string& text, size_t max_len) const {
  std::vector<int> ids;
  for (const auto& tok : mj::lex(text)) {
    if (ids.size() == max_len) break;
    ids.push_back(id(tok.lexeme));
  }
  return ids;
}

}  // namespace orf::nn
