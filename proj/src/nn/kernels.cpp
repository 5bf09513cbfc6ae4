#include "orf/nn/kernels.hpp"

namespace orf::nn::kernels {

namespace {

inline void row_nn(const double* a, const double* b, double* c, size_t i, size_t k, size_t n) {
  double* ci = c + i * n;
  for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
  const double* ai = a + i * k;
  for (size_t p = 0; p < k; ++p) {
    double av = ai[p];
    const double* bp = b + p * n;
    for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void row_tn(const double* a, const double* b, double* c, size_t i, size_t m, size_t k,
                   size_t n) {
  double* ci = c + i * n;
  for (size_t j = 0; j < n; ++j) ci[j] = 0.0;
  for (size_t p = 0; p < k; ++p) {
    double av = a[p * m + i];
    const double* bp = b + p * n;
    for (size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
  }
}

inline void row_nt(const double* a, const double* b, double* c, size_t i, size_t k, size_t n) {
  const double* ai = a + i * k;
  double* ci = c + i * n;
  for (size_t j = 0; j < n; ++j) {
    const double* bj = b + j * k;
    double acc = 0.0;
    for (size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
    ci[j] = acc;
  }
}

}  // namespace

void matmul_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) row_nn(a, b, c, i, k, n);
}

void matmul(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(m); ++i) row_nn(a, b, c, static_cast<size_t>(i), k, n);
}

void matmul_tn_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) row_tn(a, b, c, i, m, k, n);
}

void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(m); ++i) row_tn(a, b, c, static_cast<size_t>(i), m, k, n);
}

void matmul_nt_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
  for (size_t i = 0; i < m; ++i) row_nt(a, b, c, i, k, n);
}

void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(m); ++i) row_nt(a, b, c, static_cast<size_t>(i), k, n);
}

}  // namespace orf::nn::kernels
