#include "orf/interpret/attention.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace orf::interpret {

AttentionMatrix collapse_attention(const std::vector<nn::Tensor>& final_layer_heads,
                                   std::vector<std::string> tokens,
                                   std::vector<int> stmt_of_token) {
  if (final_layer_heads.empty()) throw std::invalid_argument("no attention heads");
  size_t n = final_layer_heads[0].rows;
  AttentionMatrix out;
  out.weights = nn::Tensor(n, n);
  for (const auto& head : final_layer_heads)
    for (size_t i = 0; i < n * n; ++i) out.weights.data[i] += head.data[i];
  for (size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += out.weights.at(i, j);
    for (size_t j = 0; j < n; ++j) out.weights.at(i, j) /= sum;
  }
  out.tokens = std::move(tokens);
  out.stmt_of_token = std::move(stmt_of_token);
  return out;
}

AttentionReport attention_analysis(const AttentionMatrix& sa, double k) {
  if (k <= 0.0 || k > 100.0) throw std::invalid_argument("k must be in (0, 100]");
  size_t n = sa.weights.rows;
  size_t top = static_cast<size_t>(std::ceil(k / 100.0 * static_cast<double>(n)));

  std::set<size_t> attended;
  std::vector<size_t> idx(n);
  for (size_t row = 0; row < n; ++row) {
    for (size_t j = 0; j < n; ++j) idx[j] = j;
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
      return sa.weights.at(row, a) > sa.weights.at(row, b);
    });
    for (size_t j = 0; j < top; ++j) attended.insert(idx[j]);
  }

  AttentionReport report;
  report.k = k;
  for (size_t j : attended) report.atkn.emplace_back(sa.tokens[j], static_cast<int>(j));

  std::map<int, std::pair<size_t, size_t>> per_stmt;  // stmt -> (total, attended)
  for (size_t j = 0; j < sa.stmt_of_token.size(); ++j) {
    auto& [total, hit] = per_stmt[sa.stmt_of_token[j]];
    ++total;
    if (attended.count(j)) ++hit;
  }
  for (const auto& [stmt, counts] : per_stmt)
    if (static_cast<double>(counts.second) > k / 100.0 * static_cast<double>(counts.first))
      report.asmt.push_back(stmt);
  return report;
}

std::vector<LocalizationPoint> localization_curve(
    const std::vector<std::vector<AttentionReport>>& reports_per_pair,
    const std::vector<std::vector<int>>& buggy_stmts_per_pair, const std::vector<double>& k_grid) {
  std::vector<LocalizationPoint> curve;
  for (size_t ki = 0; ki < k_grid.size(); ++ki) {
    size_t hits = 0;
    for (size_t p = 0; p < reports_per_pair.size(); ++p) {
      const auto& asmt = reports_per_pair[p][ki].asmt;
      bool hit = false;
      for (int s : buggy_stmts_per_pair[p])
        if (std::find(asmt.begin(), asmt.end(), s) != asmt.end()) hit = true;
      if (hit) ++hits;
    }
    double pct = reports_per_pair.empty()
                     ? 0.0
                     : 100.0 * static_cast<double>(hits) / static_cast<double>(reports_per_pair.size());
    curve.push_back({k_grid[ki], pct});
  }
  return curve;
}

}  // namespace orf::interpret
