#include "orf/interpret/lda.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orf::interpret {

namespace {

// Solves A x = b in place via Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular scatter matrix");
    for (size_t r = col + 1; r < n; ++r) {
      double f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  return x;
}

}  // namespace

LdaProjection lda_project(const std::vector<std::vector<double>>& embeddings,
                          const std::vector<int>& labels) {
  if (embeddings.size() != labels.size() || embeddings.empty())
    throw std::invalid_argument("embeddings/labels mismatch");
  size_t d = embeddings[0].size();
  size_t n0 = 0, n1 = 0;
  std::vector<double> mu0(d, 0.0), mu1(d, 0.0);
  for (size_t i = 0; i < embeddings.size(); ++i) {
    auto& mu = labels[i] == 0 ? mu0 : mu1;
    (labels[i] == 0 ? n0 : n1)++;
    for (size_t j = 0; j < d; ++j) mu[j] += embeddings[i][j];
  }
  if (n0 < 2 || n1 < 2) throw data::DegenerateClasses("LDA needs >= 2 instances per class");
  for (size_t j = 0; j < d; ++j) {
    mu0[j] /= static_cast<double>(n0);
    mu1[j] /= static_cast<double>(n1);
  }

  std::vector<std::vector<double>> sw(d, std::vector<double>(d, 0.0));
  for (size_t i = 0; i < embeddings.size(); ++i) {
    const auto& mu = labels[i] == 0 ? mu0 : mu1;
    for (size_t a = 0; a < d; ++a) {
      double da = embeddings[i][a] - mu[a];
      for (size_t b = 0; b < d; ++b) sw[a][b] += da * (embeddings[i][b] - mu[b]);
    }
  }
  // ridge proportional to the mean within-class variance, so the computed
  // direction is invariant to a global rescaling of the embeddings
  double trace = 0.0;
  for (size_t j = 0; j < d; ++j) trace += sw[j][j];
  double ridge = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1e-12;
  for (size_t j = 0; j < d; ++j) sw[j][j] += ridge;

  std::vector<double> diff(d);
  for (size_t j = 0; j < d; ++j) diff[j] = mu1[j] - mu0[j];
  LdaProjection out;
  out.w = solve(std::move(sw), std::move(diff));
  double norm = 0.0;
  for (double v : out.w) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) throw data::DegenerateClasses("identical class means");
  for (double& v : out.w) v /= norm;

  out.labels = labels;
  for (const auto& x : embeddings) {
    double p = 0.0;
    for (size_t j = 0; j < d; ++j) p += x[j] * out.w[j];
    out.projected.push_back(p);
  }
  for (size_t i = 0; i < out.projected.size(); ++i)
    (labels[i] == 0 ? out.mean0 : out.mean1) += out.projected[i];
  out.mean0 /= static_cast<double>(n0);
  out.mean1 /= static_cast<double>(n1);
  for (size_t i = 0; i < out.projected.size(); ++i) {
    double dm = out.projected[i] - (labels[i] == 0 ? out.mean0 : out.mean1);
    (labels[i] == 0 ? out.var0 : out.var1) += dm * dm;
  }
  out.var0 /= static_cast<double>(n0);
  out.var1 /= static_cast<double>(n1);

  // 64-bin overlap coefficient over the joint range.
  constexpr size_t kBins = 64;
  double lo = *std::min_element(out.projected.begin(), out.projected.end());
  double hi = *std::max_element(out.projected.begin(), out.projected.end());
  if (hi == lo) {
    out.overlap = 1.0;
    return out;
  }
  double width = (hi - lo) / static_cast<double>(kBins);
  std::vector<double> h0(kBins, 0.0), h1(kBins, 0.0);
  for (size_t i = 0; i < out.projected.size(); ++i) {
    size_t bin = std::min(kBins - 1, static_cast<size_t>((out.projected[i] - lo) / width));
    (labels[i] == 0 ? h0 : h1)[bin] += 1.0;
  }
  for (size_t b = 0; b < kBins; ++b) {
    h0[b] /= static_cast<double>(n0) * width;  // normalized densities
    h1[b] /= static_cast<double>(n1) * width;
    out.overlap += std::min(h0[b], h1[b]) * width;
  }
  return out;
}

double fisher_criterion(const std::vector<std::vector<double>>& embeddings,
                        const std::vector<int>& labels, const std::vector<double>& dir) {
  size_t n0 = 0, n1 = 0;
  double m0 = 0.0, m1 = 0.0;
  std::vector<double> proj(embeddings.size());
  for (size_t i = 0; i < embeddings.size(); ++i) {
    double p = 0.0;
    for (size_t j = 0; j < dir.size(); ++j) p += embeddings[i][j] * dir[j];
    proj[i] = p;
    if (labels[i] == 0) {
      m0 += p;
      ++n0;
    } else {
      m1 += p;
      ++n1;
    }
  }
  m0 /= static_cast<double>(n0);
  m1 /= static_cast<double>(n1);
  double s = 0.0;
  for (size_t i = 0; i < proj.size(); ++i) {
    double dm = proj[i] - (labels[i] == 0 ? m0 : m1);
    s += dm * dm;
  }
  double between = (m1 - m0) * (m1 - m0);
  return s == 0.0 ? (between == 0.0 ? 0.0 : 1e300) : between / s;
}

}  // namespace orf::interpret
