#pragma once

#include "nbeaver/ring.hpp"

namespace nbeaver {

// Iteration schedules for the nonlinear approximations. exp_iters drives
// exp() itself; exponentials nested inside log/reciprocal/sigmoid/softmax
// use the shorter inner_exp_iters schedule, which trades a little method
// error (absorbed by the enclosing contraction) for much lower fixed-point
// noise amplification (the base-d recurrence amplifies quantization by
// d^iters).
struct ApproxConfig {
  int exp_base = 3;       // d
  int exp_iters = 8;      // n for exp()
  int inner_exp_iters = 6;
  int log_order = 8;      // k, series truncation of the Householder step
  int log_iters = 2;      // outer Householder iterations
  int recip_iters = 10;   // Newton-Raphson iterations
  int trig_iters = 10;    // complex squaring iterations (d = 2)

  void validate() const {
    if (exp_base < 2) throw ConfigError("ApproxConfig: exp_base must be >= 2");
    if (exp_iters < 1 || inner_exp_iters < 1 || log_order < 1 ||
        log_iters < 1 || recip_iters < 1 || trig_iters < 1)
      throw ConfigError("ApproxConfig: iteration counts must be >= 1");
  }
};

} // namespace nbeaver
