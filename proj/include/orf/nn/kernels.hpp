#pragma once

#include <cstddef>

namespace orf::nn::kernels {

// Row-major matrix products. The parallel variants split work across output
// rows; each output element accumulates its dot product in the same order as
// the serial reference, so results are bitwise identical.

// C[m,n] = A[m,k] * B[k,n]
void matmul(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);
void matmul_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);

// C[m,n] = A^T * B with A[k,m], B[k,n]
void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);
void matmul_tn_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);

// C[m,n] = A * B^T with A[m,k], B[n,k]
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);
void matmul_nt_serial(const double* a, const double* b, double* c, size_t m, size_t k, size_t n);

}  // namespace orf::nn::kernels
