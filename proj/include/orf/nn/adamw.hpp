#pragma once

#include <vector>

#include "orf/nn/tape.hpp"

namespace orf::nn {

struct AdamWHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// AdamW with decoupled weight decay: the decay term multiplies the parameter
// directly and is not folded into the gradient moments.
class AdamW {
 public:
  AdamW(std::vector<Param*> params, AdamWHyper hyper);

  void zero_grad();
  // Applies one update from the accumulated grads. Throws NonFinite if any
  // resulting parameter is NaN/Inf.
  void step();
  int64_t steps() const { return t_; }

 private:
  std::vector<Param*> params_;
  AdamWHyper hyper_;
  std::vector<Tensor> m_, v_;
  int64_t t_ = 0;
};

}  // namespace orf::nn
