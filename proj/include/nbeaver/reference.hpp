#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nbeaver/approx_config.hpp"

// Plaintext double-precision mirrors of the protocol recurrences. These run
// the identical iteration schedules (same base, iteration counts, series
// order, initial guesses, quantized public constants) so that comparing
// against them isolates share-level noise from method error. Alongside each
// value they accumulate a first-order worst-case bound on the fixed-point
// noise the shared execution may add: every shared product injects one
// bounded local-truncation error, propagated through the remaining
// iterations by interval arithmetic. Wraparound failures are catastrophic
// and deliberately not covered by the bound, so they are detectable.
namespace nbeaver::reference {

struct NoiseModel {
  int frac_bits = 16;
  int n_parties = 3;
  bool exact = false; // pure recurrence, no fixed-point effects

  double unit() const { return exact ? 0.0 : std::ldexp(1.0, -frac_bits); }

  // Worst-case absolute error of one shared local truncation: half a unit
  // per party plus one unit of value-level rounding slack.
  double trunc_err() const { return (0.5 * n_parties + 1.0) * unit(); }

  // Nearest representable value at the canonical scale.
  double quantize(double v) const {
    return exact ? v
                 : std::ldexp(std::nearbyint(std::ldexp(v, frac_bits)),
                              -frac_bits);
  }

  // Public constants are encoded with two extra fixed-point factors.
  double quantize_const(double c) const {
    return exact ? c
                 : std::ldexp(std::nearbyint(std::ldexp(c, 2 * frac_bits)),
                              -2 * frac_bits);
  }

  static NoiseModel exact_model() { return NoiseModel{0, 0, true}; }
};

// A mirrored value and the accumulated worst-case noise bound around it.
struct Tracked {
  double v = 0.0;
  double err = 0.0;
};

inline Tracked t_const(double c) { return {c, 0.0}; }

inline Tracked t_add(Tracked a, Tracked b) { return {a.v + b.v, a.err + b.err}; }

inline Tracked t_sub(Tracked a, Tracked b) { return {a.v - b.v, a.err + b.err}; }

inline Tracked t_neg(Tracked a) { return {-a.v, a.err}; }

// add_public of an encodable constant: exact except the constant's own
// canonical-scale rounding, which the mirror reproduces.
inline Tracked t_add_const(Tracked a, double c, const NoiseModel& m) {
  return {a.v + m.quantize(c), a.err};
}

// mul_public by an integer: exact, no truncation.
inline Tracked t_scale_int(Tracked a, long long c) {
  return {a.v * double(c), std::fabs(double(c)) * a.err};
}

// mul_public_real: extended-precision constant then one local truncation.
inline Tracked t_scale_real(Tracked a, double c, const NoiseModel& m) {
  const double cq = m.quantize_const(c);
  return {m.quantize(a.v * cq), std::fabs(cq) * a.err + m.trunc_err()};
}

// Shared binary product: one truncation.
inline Tracked t_mul(Tracked a, Tracked b, const NoiseModel& m) {
  const double v = a.v * b.v;
  const double hi = (std::fabs(a.v) + a.err) * (std::fabs(b.v) + b.err);
  return {v, hi - std::fabs(v) + m.trunc_err()};
}

// Shared 3-ary product via one multivariate round: one truncation.
inline Tracked t_mul3(Tracked a, Tracked b, Tracked c, const NoiseModel& m) {
  const double v = a.v * b.v * c.v;
  const double hi = (std::fabs(a.v) + a.err) * (std::fabs(b.v) + b.err) *
                    (std::fabs(c.v) + c.err);
  return {v, hi - std::fabs(v) + m.trunc_err()};
}

// d-th power via one d-ary product: one truncation.
inline Tracked t_pow(Tracked a, int d, const NoiseModel& m) {
  const double v = std::pow(a.v, d);
  const double hi = std::pow(std::fabs(a.v) + a.err, d);
  return {v, hi - std::fabs(v) + m.trunc_err()};
}

inline Tracked exp_iterated_rec(Tracked x, int d, int iters,
                                const NoiseModel& m) {
  Tracked y = t_scale_real(x, std::pow(double(d), -iters), m);
  y = t_add_const(y, 1.0, m);
  for (int k = 0; k < iters; ++k) y = t_pow(y, d, m);
  return y;
}

inline Tracked exp_rec(double x, const ApproxConfig& cfg,
                       const NoiseModel& m) {
  return exp_iterated_rec({m.quantize(x), 0.0}, cfg.exp_base, cfg.exp_iters,
                          m);
}

// Mirror of poly_eval: base powers as single-truncation products, one
// truncation per coefficient block, binary products for the block update.
inline Tracked poly_rec(std::span<const double> coeffs, Tracked x,
                        int base_size, const NoiseModel& m) {
  const int deg = int(coeffs.size()) - 1;
  if (deg == 0) return t_const(m.quantize(coeffs[0]));
  if (deg == 1)
    return t_add_const(t_scale_real(x, coeffs[1], m), coeffs[0], m);

  const int msz = base_size;
  const int blocks = (deg + 1 + msz - 1) / msz;
  const int top = std::min(deg, msz - 1);

  std::vector<Tracked> g;
  g.push_back(t_const(1.0));
  g.push_back(x);
  for (int k = 2; k <= top; ++k) g.push_back(t_pow(x, k, m));
  Tracked stepper = blocks > 1 ? t_pow(x, msz, m) : t_const(0.0);

  Tracked total = t_const(0.0);
  for (int blk = 0; blk < blocks; ++blk) {
    const int s = blk * msz;
    const int e = std::min(deg, s + msz - 1);
    Tracked acc = t_const(0.0);
    for (int i = s; i <= e; ++i) {
      const double cq = m.quantize_const(coeffs[std::size_t(i)]);
      acc.v += cq * g[std::size_t(i - s)].v;
      acc.err += std::fabs(cq) * g[std::size_t(i - s)].err;
    }
    acc.err += m.trunc_err(); // one block rescale
    total = t_add(total, acc);
    if (blk + 1 < blocks)
      for (auto& gr : g) gr = t_mul(gr, stepper, m);
  }
  return total;
}

inline Tracked recip_rec_tracked(Tracked x, const ApproxConfig& cfg,
                                 const NoiseModel& m) {
  Tracked arg = t_add_const(t_neg(x), 0.5, m);
  Tracked y = t_scale_real(
      exp_iterated_rec(arg, cfg.exp_base, cfg.inner_exp_iters, m), 3.0, m);
  y = t_add_const(y, 0.003, m);
  for (int it = 0; it < cfg.recip_iters; ++it) {
    Tracked cube = t_mul3(x, y, y, m);
    y = t_sub(t_scale_int(y, 2), cube);
  }
  return y;
}

inline Tracked recip_rec(double x, const ApproxConfig& cfg,
                         const NoiseModel& m) {
  return recip_rec_tracked({m.quantize(x), 0.0}, cfg, m);
}

inline Tracked log_rec(double x, const ApproxConfig& cfg,
                       const NoiseModel& m) {
  Tracked xt{m.quantize(x), 0.0};
  Tracked arg = t_add_const(t_scale_int(xt, -2), -1.0, m);
  Tracked t = exp_iterated_rec(arg, cfg.exp_base, cfg.inner_exp_iters, m);
  Tracked y = t_add(t_scale_real(xt, 1.0 / 120.0, m),
                    t_scale_real(t, -20.0, m));
  y = t_add_const(y, 3.0, m);

  std::vector<double> series(std::size_t(cfg.log_order) + 1, 0.0);
  for (int k = 1; k <= cfg.log_order; ++k)
    series[std::size_t(k)] = 1.0 / double(k);

  for (int it = 0; it < cfg.log_iters; ++it) {
    Tracked e = exp_iterated_rec(t_neg(y), cfg.exp_base, cfg.inner_exp_iters,
                                 m);
    Tracked xe = t_mul(xt, e, m);
    Tracked h = t_sub(t_const(1.0), xe);
    Tracked corr = poly_rec(series, h, std::min(4, 4), m);
    y = t_sub(y, corr);
  }
  return y;
}

struct TrackedComplex {
  Tracked re, im;
};

inline TrackedComplex cexp_rec(double x, const ApproxConfig& cfg,
                               const NoiseModel& m) {
  const int n = cfg.trig_iters;
  Tracked re = t_const(1.0);
  Tracked im = t_scale_real({m.quantize(x), 0.0}, std::ldexp(1.0, -n), m);
  for (int k = 0; k < n; ++k) {
    Tracked a2 = t_mul(re, re, m);
    Tracked b2 = t_mul(im, im, m);
    Tracked ab = t_mul(re, im, m);
    re = t_sub(a2, b2);
    im = t_scale_int(ab, 2);
  }
  return {re, im};
}

inline Tracked sin_rec(double x, const ApproxConfig& cfg,
                       const NoiseModel& m) {
  return cexp_rec(x, cfg, m).im;
}

inline Tracked cos_rec(double x, const ApproxConfig& cfg,
                       const NoiseModel& m) {
  return cexp_rec(x, cfg, m).re;
}

inline Tracked sigmoid_rec_tracked(Tracked x, const ApproxConfig& cfg,
                                   const NoiseModel& m) {
  Tracked e = exp_iterated_rec(t_neg(x), cfg.exp_base, cfg.inner_exp_iters, m);
  Tracked den = t_add_const(e, 1.0, m);
  return recip_rec_tracked(den, cfg, m);
}

inline Tracked sigmoid_rec(double x, const ApproxConfig& cfg,
                           const NoiseModel& m) {
  return sigmoid_rec_tracked({m.quantize(x), 0.0}, cfg, m);
}

inline Tracked tanh_rec(double x, const ApproxConfig& cfg,
                        const NoiseModel& m) {
  Tracked s = sigmoid_rec_tracked(t_scale_int({m.quantize(x), 0.0}, 2), cfg, m);
  return t_add_const(t_scale_int(s, 2), -1.0, m);
}

inline std::vector<Tracked> softmax_rec(std::span<const double> logits,
                                        const ApproxConfig& cfg,
                                        const NoiseModel& m) {
  std::vector<Tracked> e;
  e.reserve(logits.size());
  Tracked sum = t_const(0.0);
  for (double v : logits) {
    e.push_back(exp_iterated_rec({m.quantize(v), 0.0}, cfg.exp_base,
                                 cfg.inner_exp_iters, m));
    sum = t_add(sum, e.back());
  }
  Tracked inv = recip_rec_tracked(sum, cfg, m);
  std::vector<Tracked> out;
  out.reserve(logits.size());
  for (const auto& ei : e) out.push_back(t_mul(ei, inv, m));
  return out;
}

inline double horner(std::span<const double> coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

} // namespace nbeaver::reference
