#pragma once

#include <map>
#include <string>
#include <vector>

namespace orf::nn {

// Token vocabulary built from lexing the training-split texts. Ids 0..2 are
// reserved; every other id maps one-to-one to a lexeme in first-seen order.
struct Vocab {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kSep = 2;

  std::map<std::string, int> token_to_id;
  std::vector<std::string> id_to_token;  // includes the reserved entries

  static Vocab build(const std::vector<std::string>& texts);
  static Vocab from_tokens(const std::vector<std::string>& non_reserved);

  size_t size() const { return id_to_token.size(); }
  int id(const std::string& token) const;
  // Lexes `text` and maps to ids, truncating the tail at max_len.
  std::vector<int> encode(const std::string& text, size_t max_len) const;
};

}  // namespace orf::nn
