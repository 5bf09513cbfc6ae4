#pragma once

#include <vector>

#include "orf/data/dataset.hpp"

namespace orf::interpret {

struct LdaProjection {
  std::vector<double> w;          // unit-norm Fisher direction
  std::vector<double> projected;  // x . w per instance
  std::vector<int> labels;        // 0 / 1, aligned with projected
  double mean0 = 0.0, mean1 = 0.0;
  double var0 = 0.0, var1 = 0.0;
  double overlap = 0.0;  // 64-bin histogram overlap coefficient in [0, 1]
};

// Two-class Fisher direction w ~ (S_W + 1e-6 I)^-1 (mu1 - mu0), plus the 1-D
// projections and the overlap of their normalized histograms.
LdaProjection lda_project(const std::vector<std::vector<double>>& embeddings,
                          const std::vector<int>& labels);

// Between-class over within-class variance of the projections onto dir.
double fisher_criterion(const std::vector<std::vector<double>>& embeddings,
                        const std::vector<int>& labels, const std::vector<double>& dir);

}  // namespace orf::interpret
