#include "orf/nn/tape.hpp"

#include <algorithm>
#include <cmath>

#include "orf/nn/kernels.hpp"

namespace orf::nn {

Tape::Var Tape::push(Tensor value, std::function<void(Tape&)> back) {
  Node node;
  node.grad = Tensor(value.rows, value.cols);
  node.value = std::move(value);
  node.back = std::move(back);
  nodes_.push_back(std::move(node));
  return static_cast<Var>(nodes_.size() - 1);
}

Tape::Var Tape::leaf(Param& p) {
  auto it = leaves_.find(&p);
  if (it != leaves_.end()) return it->second;
  Var v = push(p.value, {});
  nodes_[v].param = &p;
  leaves_[&p] = v;
  return v;
}

Tape::Var Tape::input(Tensor t) { return push(std::move(t), {}); }

Tape::Var Tape::matmul(Var a, Var b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  Tensor C(A.rows, B.cols);
  kernels::matmul(A.data.data(), B.data.data(), C.data.data(), A.rows, A.cols, B.cols);
  Var out = push(std::move(C), [a, b](Tape& t) {
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    const Tensor& dC = t.g(t.last_);
    // dA += dC * B^T ; dB += A^T * dC
    Tensor tmp(A.rows, A.cols);
    kernels::matmul_nt(dC.data.data(), B.data.data(), tmp.data.data(), A.rows, B.cols, A.cols);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < dA.size(); ++i) dA.data[i] += tmp.data[i];
    Tensor tmp2(A.cols, B.cols);
    kernels::matmul_tn(A.data.data(), dC.data.data(), tmp2.data.data(), A.cols, A.rows, B.cols);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < dB.size(); ++i) dB.data[i] += tmp2.data[i];
  });
  return out;
}

Tape::Var Tape::transpose(Var a) {
  const Tensor& A = val(a);
  Tensor T(A.cols, A.rows);
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t j = 0; j < A.cols; ++j) T.at(j, i) = A.at(i, j);
  return push(std::move(T), [a](Tape& t) {
    const Tensor& dT = t.g(t.last_);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < dA.rows; ++i)
      for (size_t j = 0; j < dA.cols; ++j) dA.at(i, j) += dT.at(j, i);
  });
}

Tape::Var Tape::add(Var a, Var b) {
  Tensor C = val(a);
  const Tensor& B = val(b);
  for (size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[i];
  return push(std::move(C), [a, b](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < d.size(); ++i) {
      dA.data[i] += d.data[i];
      dB.data[i] += d.data[i];
    }
  });
}

Tape::Var Tape::sub(Var a, Var b) {
  Tensor C = val(a);
  const Tensor& B = val(b);
  for (size_t i = 0; i < C.size(); ++i) C.data[i] -= B.data[i];
  return push(std::move(C), [a, b](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < d.size(); ++i) {
      dA.data[i] += d.data[i];
      dB.data[i] -= d.data[i];
    }
  });
}

Tape::Var Tape::mul(Var a, Var b) {
  Tensor C = val(a);
  const Tensor& B = val(b);
  for (size_t i = 0; i < C.size(); ++i) C.data[i] *= B.data[i];
  return push(std::move(C), [a, b](Tape& t) {
    const Tensor& d = t.g(t.last_);
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < d.size(); ++i) {
      dA.data[i] += d.data[i] * B.data[i];
      dB.data[i] += d.data[i] * A.data[i];
    }
  });
}

Tape::Var Tape::add_rowvec(Var a, Var bias) {
  Tensor C = val(a);
  const Tensor& B = val(bias);
  for (size_t i = 0; i < C.rows; ++i)
    for (size_t j = 0; j < C.cols; ++j) C.at(i, j) += B.at(0, j);
  return push(std::move(C), [a, bias](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(bias);
    for (size_t i = 0; i < d.size(); ++i) dA.data[i] += d.data[i];
    for (size_t i = 0; i < d.rows; ++i)
      for (size_t j = 0; j < d.cols; ++j) dB.at(0, j) += d.at(i, j);
  });
}

Tape::Var Tape::scale(Var a, double k) {
  Tensor C = val(a);
  for (double& v : C.data) v *= k;
  return push(std::move(C), [a, k](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < d.size(); ++i) dA.data[i] += k * d.data[i];
  });
}

Tape::Var Tape::add_const(Var a, double c) {
  Tensor C = val(a);
  for (double& v : C.data) v += c;
  return push(std::move(C), [a](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < d.size(); ++i) dA.data[i] += d.data[i];
  });
}

Tape::Var Tape::relu(Var a) {
  Tensor C = val(a);
  for (double& v : C.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(C), [a](Tape& t) {
    const Tensor& d = t.g(t.last_);
    const Tensor& A = t.val(a);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < d.size(); ++i)
      if (A.data[i] > 0.0) dA.data[i] += d.data[i];
  });
}

Tape::Var Tape::softmax_rows(Var a) {
  Tensor P = val(a);
  for (size_t i = 0; i < P.rows; ++i) {
    double mx = P.at(i, 0);
    for (size_t j = 1; j < P.cols; ++j) mx = std::max(mx, P.at(i, j));
    double sum = 0.0;
    for (size_t j = 0; j < P.cols; ++j) {
      P.at(i, j) = std::exp(P.at(i, j) - mx);
      sum += P.at(i, j);
    }
    for (size_t j = 0; j < P.cols; ++j) P.at(i, j) /= sum;
  }
  return push(std::move(P), [a](Tape& t) {
    const Tensor& P = t.val(t.last_);
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < P.rows; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < P.cols; ++j) s += d.at(i, j) * P.at(i, j);
      for (size_t j = 0; j < P.cols; ++j) dA.at(i, j) += P.at(i, j) * (d.at(i, j) - s);
    }
  });
}

Tape::Var Tape::mean_rows(Var a) {
  const Tensor& A = val(a);
  Tensor M(1, A.cols);
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t j = 0; j < A.cols; ++j) M.at(0, j) += A.at(i, j);
  for (double& v : M.data) v /= static_cast<double>(A.rows);
  return push(std::move(M), [a](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    double inv = 1.0 / static_cast<double>(dA.rows);
    for (size_t i = 0; i < dA.rows; ++i)
      for (size_t j = 0; j < dA.cols; ++j) dA.at(i, j) += inv * d.at(0, j);
  });
}

Tape::Var Tape::rows(Var table, std::vector<int> ids) {
  const Tensor& T = val(table);
  Tensor R(ids.size(), T.cols);
  for (size_t i = 0; i < ids.size(); ++i)
    for (size_t j = 0; j < T.cols; ++j) R.at(i, j) = T.at(static_cast<size_t>(ids[i]), j);
  return push(std::move(R), [table, ids = std::move(ids)](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dT = t.g(table);
    for (size_t i = 0; i < ids.size(); ++i)
      for (size_t j = 0; j < dT.cols; ++j) dT.at(static_cast<size_t>(ids[i]), j) += d.at(i, j);
  });
}

Tape::Var Tape::slice_cols(Var a, size_t c0, size_t c1) {
  const Tensor& A = val(a);
  Tensor S(A.rows, c1 - c0);
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t j = c0; j < c1; ++j) S.at(i, j - c0) = A.at(i, j);
  return push(std::move(S), [a, c0](Tape& t) {
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < d.rows; ++i)
      for (size_t j = 0; j < d.cols; ++j) dA.at(i, c0 + j) += d.at(i, j);
  });
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  size_t rows = val(parts[0]).rows;
  size_t cols = 0;
  for (Var p : parts) cols += val(p).cols;
  Tensor C(rows, cols);
  size_t off = 0;
  for (Var p : parts) {
    const Tensor& A = val(p);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < A.cols; ++j) C.at(i, off + j) = A.at(i, j);
    off += A.cols;
  }
  return push(std::move(C), [parts](Tape& t) {
    const Tensor& d = t.g(t.last_);
    size_t off = 0;
    for (Var p : parts) {
      Tensor& dA = t.g(p);
      for (size_t i = 0; i < dA.rows; ++i)
        for (size_t j = 0; j < dA.cols; ++j) dA.at(i, j) += d.at(i, off + j);
      off += dA.cols;
    }
  });
}

Tape::Var Tape::layer_norm_rows(Var a, Var gamma, Var beta) {
  constexpr double kEps = 1e-5;
  const Tensor& A = val(a);
  const Tensor& G = val(gamma);
  const Tensor& B = val(beta);
  Tensor Y(A.rows, A.cols);
  for (size_t i = 0; i < A.rows; ++i) {
    double mu = 0.0;
    for (size_t j = 0; j < A.cols; ++j) mu += A.at(i, j);
    mu /= static_cast<double>(A.cols);
    double var = 0.0;
    for (size_t j = 0; j < A.cols; ++j) {
      double dv = A.at(i, j) - mu;
      var += dv * dv;
    }
    var /= static_cast<double>(A.cols);
    double inv = 1.0 / std::sqrt(var + kEps);
    for (size_t j = 0; j < A.cols; ++j)
      Y.at(i, j) = (A.at(i, j) - mu) * inv * G.at(0, j) + B.at(0, j);
  }
  return push(std::move(Y), [a, gamma, beta](Tape& t) {
    const Tensor& A = t.val(a);
    const Tensor& G = t.val(gamma);
    const Tensor& d = t.g(t.last_);
    Tensor& dA = t.g(a);
    Tensor& dG = t.g(gamma);
    Tensor& dB = t.g(beta);
    size_t n = A.cols;
    for (size_t i = 0; i < A.rows; ++i) {
      double mu = 0.0;
      for (size_t j = 0; j < n; ++j) mu += A.at(i, j);
      mu /= static_cast<double>(n);
      double var = 0.0;
      for (size_t j = 0; j < n; ++j) {
        double dv = A.at(i, j) - mu;
        var += dv * dv;
      }
      var /= static_cast<double>(n);
      double inv = 1.0 / std::sqrt(var + 1e-5);
      double sum_dxh = 0.0, sum_dxh_xh = 0.0;
      for (size_t j = 0; j < n; ++j) {
        double xh = (A.at(i, j) - mu) * inv;
        double dxh = d.at(i, j) * G.at(0, j);
        dG.at(0, j) += d.at(i, j) * xh;
        dB.at(0, j) += d.at(i, j);
        sum_dxh += dxh;
        sum_dxh_xh += dxh * xh;
      }
      for (size_t j = 0; j < n; ++j) {
        double xh = (A.at(i, j) - mu) * inv;
        double dxh = d.at(i, j) * G.at(0, j);
        dA.at(i, j) += inv * (dxh - sum_dxh / n - xh * sum_dxh_xh / n);
      }
    }
  });
}

Tape::Var Tape::pick(Var a, size_t r, size_t c) {
  Tensor P(1, 1);
  P.at(0, 0) = val(a).at(r, c);
  return push(std::move(P), [a, r, c](Tape& t) {
    t.g(a).at(r, c) += t.g(t.last_).at(0, 0);
  });
}

Tape::Var Tape::logsumexp_row(Var a) {
  const Tensor& A = val(a);
  double mx = A.data[0];
  for (double v : A.data) mx = std::max(mx, v);
  double sum = 0.0;
  for (double v : A.data) sum += std::exp(v - mx);
  Tensor L(1, 1);
  L.at(0, 0) = mx + std::log(sum);
  return push(std::move(L), [a](Tape& t) {
    const Tensor& A = t.val(a);
    double lse = t.val(t.last_).at(0, 0);
    double d = t.g(t.last_).at(0, 0);
    Tensor& dA = t.g(a);
    for (size_t i = 0; i < A.size(); ++i) dA.data[i] += d * std::exp(A.data[i] - lse);
  });
}

Tape::Var Tape::dot(Var a, Var b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  double acc = 0.0;
  for (size_t i = 0; i < A.size(); ++i) acc += A.data[i] * B.data[i];
  Tensor D(1, 1);
  D.at(0, 0) = acc;
  return push(std::move(D), [a, b](Tape& t) {
    double d = t.g(t.last_).at(0, 0);
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < A.size(); ++i) {
      dA.data[i] += d * B.data[i];
      dB.data[i] += d * A.data[i];
    }
  });
}

Tape::Var Tape::norm(Var a) {
  const Tensor& A = val(a);
  double acc = 0.0;
  for (double v : A.data) acc += v * v;
  Tensor N(1, 1);
  N.at(0, 0) = std::sqrt(acc);
  return push(std::move(N), [a](Tape& t) {
    double nv = t.val(t.last_).at(0, 0);
    double d = t.g(t.last_).at(0, 0);
    const Tensor& A = t.val(a);
    Tensor& dA = t.g(a);
    if (nv > 0.0)
      for (size_t i = 0; i < A.size(); ++i) dA.data[i] += d * A.data[i] / nv;
  });
}

Tape::Var Tape::div(Var a, Var b) {
  Tensor C = val(a);
  const Tensor& B = val(b);
  for (size_t i = 0; i < C.size(); ++i) C.data[i] /= B.data[i];
  return push(std::move(C), [a, b](Tape& t) {
    const Tensor& d = t.g(t.last_);
    const Tensor& A = t.val(a);
    const Tensor& B = t.val(b);
    Tensor& dA = t.g(a);
    Tensor& dB = t.g(b);
    for (size_t i = 0; i < d.size(); ++i) {
      dA.data[i] += d.data[i] / B.data[i];
      dB.data[i] -= d.data[i] * A.data[i] / (B.data[i] * B.data[i]);
    }
  });
}

Tape::Var Tape::add_many(const std::vector<Var>& vs) {
  Tensor C = val(vs[0]);
  for (size_t k = 1; k < vs.size(); ++k) {
    const Tensor& A = val(vs[k]);
    for (size_t i = 0; i < C.size(); ++i) C.data[i] += A.data[i];
  }
  return push(std::move(C), [vs](Tape& t) {
    const Tensor& d = t.g(t.last_);
    for (Var v : vs) {
      Tensor& dA = t.g(v);
      for (size_t i = 0; i < d.size(); ++i) dA.data[i] += d.data[i];
    }
  });
}

void Tape::backward(Var out) {
  g(out).at(0, 0) = 1.0;
  for (Var v = out; v >= 0; --v) {
    if (nodes_[v].back) {
      last_ = v;
      nodes_[v].back(*this);
    } else if (nodes_[v].param) {
      Param& p = *nodes_[v].param;
      const Tensor& d = nodes_[v].grad;
      for (size_t i = 0; i < d.size(); ++i) p.grad.data[i] += d.data[i];
    }
  }
}

}  // namespace orf::nn
