#pragma once

#include <cmath>
#include <vector>

#include "nbeaver/approx_config.hpp"
#include "nbeaver/protocols.hpp"

namespace nbeaver {

// e^x via the iterated-power recurrence y <- y^d starting from
// y0 = 1 + x * d^-iters. One online round per iteration (the d-th power is a
// single d-ary multivariate product, or one binary square for d = 2).
// Documented domain |x| <= 8; outside it accuracy degrades, it does not trap.
inline ShareVec exp_iterated(PartyCtx& ctx, const ShareVec& x, int d,
                             int iters) {
  if (d < 2) throw ConfigError("exp: base must be >= 2");
  if (iters < 1) throw ConfigError("exp: need at least one iteration");
  const FixedCodec& codec = ctx.codec();
  ShareVec y = mul_public_real(x, std::pow(double(d), -iters), codec);
  y = add_public(y, codec.encode(1.0));
  for (int k = 0; k < iters; ++k) {
    if (d == 2) {
      TripleShare t = ctx.take_triple(y.size());
      y = mul(ctx, y, y, t);
    } else {
      std::vector<ShareVec> copies(std::size_t(d), y);
      AuxShare aux = ctx.take_aux(d, y.size());
      y = mul_multi(ctx, copies, aux);
    }
  }
  return y;
}

inline ShareVec exp(PartyCtx& ctx, const ShareVec& x,
                    const ApproxConfig& cfg) {
  cfg.validate();
  return exp_iterated(ctx, x, cfg.exp_base, cfg.exp_iters);
}

// 1/x by Newton-Raphson, y <- 2y - x*y*y, with the cubic term as one 3-ary
// product (one round per iteration). Initial guess 3*e^(1/2 - x) + 0.003
// converges across the documented domain x in [0.01, 100].
inline ShareVec reciprocal(PartyCtx& ctx, const ShareVec& x,
                           const ApproxConfig& cfg) {
  cfg.validate();
  const FixedCodec& codec = ctx.codec();
  ShareVec arg = add_public(neg_shared(x), codec.encode(0.5));
  ShareVec y = mul_public_real(
      exp_iterated(ctx, arg, cfg.exp_base, cfg.inner_exp_iters), 3.0, codec);
  y = add_public(y, codec.encode(0.003));
  for (int it = 0; it < cfg.recip_iters; ++it) {
    std::vector<ShareVec> xyy = {x, y, y};
    AuxShare aux = ctx.take_aux(3, x.size());
    ShareVec cube = mul_multi(ctx, xyy, aux);
    y = sub_shared(mul_public(y, 2), cube);
  }
  return y;
}

// ln x by Householder iteration: h = 1 - x e^-y, y <- y - sum_{k=1..K} h^k/k.
// The correction series is one poly_eval per iteration. Documented domain
// x in [0.05, 60].
inline ShareVec log(PartyCtx& ctx, const ShareVec& x,
                    const ApproxConfig& cfg) {
  cfg.validate();
  const FixedCodec& codec = ctx.codec();
  // y0 = x/120 - 20 e^-(2x+1) + 3
  ShareVec arg = add_public(mul_public(x, from_signed(-2)),
                            codec.encode(-1.0));
  ShareVec t = exp_iterated(ctx, arg, cfg.exp_base, cfg.inner_exp_iters);
  ShareVec y = add_shared(mul_public_real(x, 1.0 / 120.0, codec),
                          mul_public_real(t, -20.0, codec));
  y = add_public(y, codec.encode(3.0));

  PolyPlan series;
  series.base_size = std::min(4, ctx.max_arity());
  series.coeffs.assign(std::size_t(cfg.log_order) + 1, 0.0);
  for (int k = 1; k <= cfg.log_order; ++k)
    series.coeffs[std::size_t(k)] = 1.0 / double(k);

  for (int it = 0; it < cfg.log_iters; ++it) {
    ShareVec e = exp_iterated(ctx, neg_shared(y), cfg.exp_base,
                              cfg.inner_exp_iters);
    TripleShare tr = ctx.take_triple(x.size());
    ShareVec xe = mul(ctx, x, e, tr);
    ShareVec h = add_public(neg_shared(xe), codec.encode(1.0));
    ShareVec corr = poly_eval(ctx, h, series);
    y = sub_shared(y, corr);
  }
  return y;
}

// Shares of the real and imaginary parts of e^(ix).
struct ComplexShare {
  ShareVec re, im;
};

// e^(ix) as the d = 2 special case of the exponentiation recurrence over
// complex values: z <- z^2 with (a + bi)^2 = (a^2 - b^2) + 2ab i. The three
// constituent products are coalesced into a single exchange, so each
// squaring costs one round. Callers keep |x| <= 2*pi; range reduction of a
// secret argument would need comparisons, which this scheme does not have.
inline ComplexShare complex_exp(PartyCtx& ctx, const ShareVec& x,
                                const ApproxConfig& cfg) {
  cfg.validate();
  const FixedCodec& codec = ctx.codec();
  const int n = cfg.trig_iters;
  std::vector<double> ones(x.size(), 1.0);
  ShareVec re = constant_share(ctx, ones);
  ShareVec im = mul_public_real(x, std::ldexp(1.0, -n), codec);
  for (int k = 0; k < n; ++k) {
    TripleShare t1 = ctx.take_triple(x.size());
    TripleShare t2 = ctx.take_triple(x.size());
    TripleShare t3 = ctx.take_triple(x.size());
    PendingMul p1 = mul_begin(ctx, re, re, t1);
    PendingMul p2 = mul_begin(ctx, im, im, t2);
    PendingMul p3 = mul_begin(ctx, re, im, t3);
    ctx.flush();
    ShareVec a2 = mul_finish(ctx, p1);
    ShareVec b2 = mul_finish(ctx, p2);
    ShareVec ab = mul_finish(ctx, p3);
    re = sub_shared(a2, b2);
    im = mul_public(ab, 2);
  }
  return {re, im};
}

inline ShareVec sin(PartyCtx& ctx, const ShareVec& x,
                    const ApproxConfig& cfg) {
  return complex_exp(ctx, x, cfg).im;
}

inline ShareVec cos(PartyCtx& ctx, const ShareVec& x,
                    const ApproxConfig& cfg) {
  return complex_exp(ctx, x, cfg).re;
}

// sigmoid(x) = 1 / (1 + e^-x), composed from exp and reciprocal.
inline ShareVec sigmoid(PartyCtx& ctx, const ShareVec& x,
                        const ApproxConfig& cfg) {
  cfg.validate();
  ShareVec e = exp_iterated(ctx, neg_shared(x), cfg.exp_base,
                            cfg.inner_exp_iters);
  ShareVec den = add_public(e, ctx.codec().encode(1.0));
  return reciprocal(ctx, den, cfg);
}

// tanh(x) = 2 sigmoid(2x) - 1.
inline ShareVec tanh(PartyCtx& ctx, const ShareVec& x,
                     const ApproxConfig& cfg) {
  ShareVec s = sigmoid(ctx, mul_public(x, 2), cfg);
  return add_public(mul_public(s, 2), ctx.codec().encode(-1.0));
}

// Row-wise softmax over a row-major (rows x classes) batch. All rows'
// exponentials run in one vectorized schedule and the row sums share one
// vectorized reciprocal.
inline ShareVec softmax(PartyCtx& ctx, const ShareVec& x, std::size_t classes,
                        const ApproxConfig& cfg) {
  cfg.validate();
  if (classes == 0 || x.size() % classes != 0)
    throw ProtocolError("softmax: input is not rows x classes");
  const std::size_t rows = x.size() / classes;
  ShareVec e = exp_iterated(ctx, x, cfg.exp_base, cfg.inner_exp_iters);
  ShareVec sums{ctx.party(), 1, std::vector<u64>(rows, 0)};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < classes; ++c)
      sums.v[r] = ring_add(sums.v[r], e.v[r * classes + c]);
  ShareVec inv = reciprocal(ctx, sums, cfg);
  ShareVec spread{ctx.party(), 1, std::vector<u64>(x.size())};
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < classes; ++c)
      spread.v[r * classes + c] = inv.v[r];
  TripleShare t = ctx.take_triple(x.size());
  return mul(ctx, e, spread, t);
}

} // namespace nbeaver
