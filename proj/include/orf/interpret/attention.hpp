#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orf/nn/tensor.hpp"

namespace orf::interpret {

// Row-stochastic token-to-token attention with statement annotations.
struct AttentionMatrix {
  nn::Tensor weights;                // n x n
  std::vector<std::string> tokens;   // length n
  std::vector<int> stmt_of_token;    // statement id per token, length n
};

struct AttentionReport {
  std::vector<std::pair<std::string, int>> atkn;  // attended (token, index), index-ascending
  std::vector<int> asmt;                          // attended statement ids, ascending
  double k = 0.0;                                 // percent threshold used
};

// Element-wise mean over the final layer's heads, rows renormalized to sum 1.
AttentionMatrix collapse_attention(const std::vector<nn::Tensor>& final_layer_heads,
                                   std::vector<std::string> tokens,
                                   std::vector<int> stmt_of_token);

// Per row, the top ceil(k/100 * n) weights (ties broken by lower index) are
// attended; ATkn is the index-sensitive union across rows. A statement joins
// ASmt iff strictly more than k% of its tokens are attended.
AttentionReport attention_analysis(const AttentionMatrix& sa, double k);

struct LocalizationPoint {
  double k = 0.0;
  double percent = 0.0;  // % of pairs with >= 1 buggy statement in ASmt
};

// reports_per_pair[p][i] is the report for pair p at k_grid[i].
std::vector<LocalizationPoint> localization_curve(
    const std::vector<std::vector<AttentionReport>>& reports_per_pair,
    const std::vector<std::vector<int>>& buggy_stmts_per_pair, const std::vector<double>& k_grid);

}  // namespace orf::interpret
