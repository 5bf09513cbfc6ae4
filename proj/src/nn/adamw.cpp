#include "orf/nn/adamw.hpp"

#include <cmath>

namespace orf::nn {

AdamW::AdamW(std::vector<Param*> params, AdamWHyper hyper)
    : params_(std::move(params)), hyper_(hyper) {
  for (Param* p : params_) {
    m_.emplace_back(p->value.rows, p->value.cols);
    v_.emplace_back(p->value.rows, p->value.cols);
  }
}

void AdamW::zero_grad() {
  for (Param* p : params_) p->zero_grad();
}

void AdamW::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(hyper_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(hyper_.beta2, static_cast<double>(t_));
  for (size_t pi = 0; pi < params_.size(); ++pi) {
    Param& p = *params_[pi];
    Tensor& m = m_[pi];
    Tensor& v = v_[pi];
    for (size_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad.data[i];
      m.data[i] = hyper_.beta1 * m.data[i] + (1.0 - hyper_.beta1) * g;
      v.data[i] = hyper_.beta2 * v.data[i] + (1.0 - hyper_.beta2) * g * g;
      double mhat = m.data[i] / bc1;
      double vhat = v.data[i] / bc2;
      double next = p.value.data[i] - hyper_.lr * mhat / (std::sqrt(vhat) + hyper_.eps) -
                    hyper_.lr * hyper_.weight_decay * p.value.data[i];
      if (!std::isfinite(next))
        throw NonFinite("non-finite update in parameter '" + p.name + "' at step " +
                        std::to_string(t_));
      p.value.data[i] = next;
    }
  }
}

}  // namespace orf::nn
