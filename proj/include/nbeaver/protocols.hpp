#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "nbeaver/engine.hpp"

namespace nbeaver {

inline ShareVec retag(ShareVec s, int scale) {
  s.scale = scale;
  return s;
}

// Local share-level rescaling: every party divides its own share (signed,
// round to nearest) by 2^(frac_bits * factors). Costs zero rounds. Error is
// bounded by about n_parties units of the output scale; values whose
// magnitude approaches 2^63 / 2^(frac_bits*factors) additionally risk a
// wraparound failure, which is why protocol inputs carry documented range
// contracts instead of runtime checks (shares cannot be range-checked
// without revealing them).
inline ShareVec truncate_shared(const ShareVec& x, int factors,
                                const FixedCodec& codec) {
  if (factors < 1)
    throw UsageError("truncate_shared: factors must be >= 1");
  if (x.scale < factors + 1)
    throw UsageError("truncate_shared: scale_exponent must be >= factors + 1");
  ShareVec out{x.owner, x.scale - factors, std::vector<u64>(x.size())};
  const int bits = codec.frac_bits * factors;
  for (std::size_t i = 0; i < x.size(); ++i)
    out.v[i] = trunc_round(x.v[i], bits);
  return out;
}

// Rescale an untruncated product down to one embedded fixed-point factor
// (or leave raw ring values untouched).
inline ShareVec rescale_product(const ShareVec& z, const FixedCodec& codec) {
  const int target = z.scale == 0 ? 0 : 1;
  if (z.scale > target) return truncate_shared(z, z.scale - target, codec);
  return z;
}

// Multiply by a public real constant, locally. The constant is encoded with
// 2*frac_bits fractional bits so its representation error is negligible,
// then the product is rescaled back. |value * c| must stay well below
// 2^(63 - 3*frac_bits) per the range contract.
inline ShareVec mul_public_real(const ShareVec& x, double c,
                                const FixedCodec& codec) {
  const int ext = 2 * codec.frac_bits;
  const double scaled = std::ldexp(c, ext);
  if (!(std::fabs(scaled) < std::ldexp(1.0, 62)))
    throw EncodingRangeError("mul_public_real: constant out of range");
  const u64 c_fix = from_signed(std::llround(scaled));
  ShareVec out = mul_public(x, c_fix);
  out.scale = x.scale + 2;
  return truncate_shared(out, 2, codec);
}

// Share a vector of reals known to `owner`: all parties draw a pseudorandom
// zero share and the owner adds the encoded values. Zero rounds.
inline ShareVec input_share(PartyCtx& ctx, int owner,
                            std::span<const double> xs) {
  ShareVec s = ctx.przs().next(xs.size(), 1);
  if (ctx.party() == owner)
    for (std::size_t i = 0; i < xs.size(); ++i)
      s.v[i] = ring_add(s.v[i], ctx.codec().encode(xs[i]));
  return s;
}

inline ShareVec input_share_raw(PartyCtx& ctx, int owner,
                                std::span<const u64> xs, int scale) {
  ShareVec s = ctx.przs().next(xs.size(), scale);
  if (ctx.party() == owner)
    for (std::size_t i = 0; i < xs.size(); ++i)
      s.v[i] = ring_add(s.v[i], xs[i]);
  return s;
}

// Shares of a public constant vector: zero shares plus the constant on
// party 0.
inline ShareVec constant_share(PartyCtx& ctx, std::span<const double> xs) {
  ShareVec s{ctx.party(), 1, std::vector<u64>(xs.size(), 0)};
  if (ctx.party() == 0)
    for (std::size_t i = 0; i < xs.size(); ++i)
      s.v[i] = ctx.codec().encode(xs[i]);
  return s;
}

inline std::vector<double> reveal_decoded(PartyCtx& ctx, const ShareVec& s) {
  auto sums = ctx.reveal(s);
  std::vector<double> out(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i)
    out[i] = ctx.codec().decode_scaled(sums[i], s.scale);
  return out;
}

namespace detail_proto {

inline void check_unspent(bool& spent, const char* what) {
  if (spent)
    throw ProtocolError(std::string(what) +
                        ": correlated randomness reused; masks are single-use");
  spent = true;
}

} // namespace detail_proto

// ---------------------------------------------------------------------------
// Binary Beaver multiplication: reveal eps = x - a and delta = y - b together
// in one round, then z = c + eps*b + a*delta + eps*delta.
// ---------------------------------------------------------------------------

struct PendingMul {
  RevealTicket eps, delta;
  ShareVec a, b, c;
  int out_scale = 2;
};

inline PendingMul mul_begin(PartyCtx& ctx, const ShareVec& x,
                            const ShareVec& y, TripleShare& t) {
  if (x.size() != y.size())
    throw ProtocolError("mul: operand length mismatch");
  if (t.a.size() != x.size())
    throw ProtocolError("mul: triple shape mismatch");
  detail_proto::check_unspent(t.spent, "mul");
  PendingMul p;
  p.a = retag(t.a, x.scale);
  p.b = retag(t.b, y.scale);
  p.c = retag(t.c, x.scale + y.scale);
  p.out_scale = x.scale + y.scale;
  p.eps = ctx.defer_reveal(sub_shared(x, p.a));
  p.delta = ctx.defer_reveal(sub_shared(y, p.b));
  return p;
}

inline ShareVec mul_finish(PartyCtx& ctx, const PendingMul& p) {
  const auto& eps = p.eps.value();
  const auto& delta = p.delta.value();
  ShareVec z{ctx.party(), p.out_scale, std::vector<u64>(eps.size())};
  for (std::size_t i = 0; i < eps.size(); ++i) {
    u64 acc = p.c.v[i];
    acc = ring_add(acc, ring_mul(eps[i], p.b.v[i]));
    acc = ring_add(acc, ring_mul(p.a.v[i], delta[i]));
    if (ctx.party() == 0) acc = ring_add(acc, ring_mul(eps[i], delta[i]));
    z.v[i] = acc;
  }
  return rescale_product(z, ctx.codec());
}

inline ShareVec mul(PartyCtx& ctx, const ShareVec& x, const ShareVec& y,
                    TripleShare& t) {
  PendingMul p = mul_begin(ctx, x, y, t);
  ctx.flush();
  return mul_finish(ctx, p);
}

// ---------------------------------------------------------------------------
// Multivariate Beaver multiplication: blind every input with a fresh mask,
// reveal all delta_i in one exchange, then assemble
//   prod_i x_i = prod delta_i
//              + sum over proper subsets T of (prod_{i in T} delta_i) * [aux
//                entry for the complement of T]
// where the empty T contributes the full mask product and the full T is the
// public delta product added by party 0.
// ---------------------------------------------------------------------------

struct PendingMulMulti {
  std::vector<RevealTicket> deltas;
  AuxShare aux; // owned copy of this party's aux view (marked spent at begin)
  int out_scale = 0;
  std::size_t len = 0;
};

inline PendingMulMulti mul_multi_begin(PartyCtx& ctx,
                                       std::span<const ShareVec> xs,
                                       AuxShare& aux) {
  const int n = int(xs.size());
  if (n < 2) throw ConfigError("mul_multi: arity must be >= 2");
  if (n > ctx.max_arity())
    throw ConfigError("mul_multi: arity " + std::to_string(n) +
                      " above configured max arity " +
                      std::to_string(ctx.max_arity()));
  if (aux.arity != n) throw ProtocolError("mul_multi: aux arity mismatch");
  detail_proto::check_unspent(aux.spent, "mul_multi");

  PendingMulMulti p;
  p.len = xs[0].size();
  p.out_scale = 0;
  for (const auto& x : xs) {
    if (x.size() != p.len)
      throw ProtocolError("mul_multi: operand length mismatch");
    p.out_scale += x.scale;
  }
  p.aux = aux;
  p.deltas.reserve(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    ShareVec mask = retag(p.aux.entry(1u << i), xs[std::size_t(i)].scale);
    p.deltas.push_back(ctx.defer_reveal(sub_shared(xs[std::size_t(i)], mask)));
  }
  return p;
}

inline ShareVec mul_multi_finish(PartyCtx& ctx, const PendingMulMulti& p) {
  const int n = p.aux.arity;
  const std::uint32_t full = (1u << n) - 1;
  ShareVec z{ctx.party(), p.out_scale, std::vector<u64>(p.len)};

  std::vector<u64> dp(std::size_t(full) + 1); // delta product per subset
  for (std::size_t j = 0; j < p.len; ++j) {
    dp[0] = 1;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const std::uint32_t low = mask & (~mask + 1);
      const int bit = std::countr_zero(low);
      dp[mask] =
          ring_mul(dp[mask ^ low], p.deltas[std::size_t(bit)].value()[j]);
    }
    u64 acc = 0;
    for (std::uint32_t t = 0; t < full; ++t) {
      const std::uint32_t comp = full ^ t;
      acc = ring_add(acc, ring_mul(dp[t], p.aux.entry(comp).v[j]));
    }
    if (ctx.party() == 0) acc = ring_add(acc, dp[full]);
    z.v[j] = acc;
  }
  return rescale_product(z, ctx.codec());
}

inline ShareVec mul_multi(PartyCtx& ctx, std::span<const ShareVec> xs,
                          AuxShare& aux) {
  PendingMulMulti p = mul_multi_begin(ctx, xs, aux);
  ctx.flush();
  return mul_multi_finish(ctx, p);
}

// n-ary product via chained binary Beaver multiplications: n-1 rounds.
inline ShareVec product_naive(PartyCtx& ctx, std::span<const ShareVec> xs) {
  if (xs.empty()) throw ConfigError("product_naive: empty input");
  ShareVec acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    TripleShare t = ctx.take_triple(acc.size());
    acc = mul(ctx, acc, xs[i], t);
  }
  return acc;
}

// n-ary product via one multivariate round. Arity 2 is served by the binary
// path: same single round, smaller aux payload.
inline ShareVec product_multivariate(PartyCtx& ctx,
                                     std::span<const ShareVec> xs) {
  if (xs.size() == 2) {
    TripleShare t = ctx.take_triple(xs[0].size());
    return mul(ctx, xs[0], xs[1], t);
  }
  AuxShare aux = ctx.take_aux(int(xs.size()), xs[0].size());
  return mul_multi(ctx, xs, aux);
}

// ---------------------------------------------------------------------------
// Matrix multiplication: Beaver lifted to matrices with a matrix triple.
// One round for any dimensions.
// ---------------------------------------------------------------------------

struct MatShare {
  std::size_t rows = 0, cols = 0;
  ShareVec flat; // row-major
};

struct PendingMatmul {
  RevealTicket e, d;
  MatTripleShare t;
  std::size_t rows = 0, inner = 0, cols = 0;
  int out_scale = 2;
};

inline PendingMatmul matmul_begin(PartyCtx& ctx, const MatShare& x,
                                  const MatShare& y, MatTripleShare& t) {
  if (x.cols != y.rows) throw ProtocolError("matmul: dimension mismatch");
  if (t.rows != x.rows || t.inner != x.cols || t.cols != y.cols)
    throw ProtocolError("matmul: triple dimension mismatch");
  detail_proto::check_unspent(t.spent, "matmul");
  PendingMatmul p;
  p.t = t;
  p.rows = x.rows;
  p.inner = x.cols;
  p.cols = y.cols;
  p.out_scale = x.flat.scale + y.flat.scale;
  p.e = ctx.defer_reveal(
      sub_shared(x.flat, retag(p.t.a, x.flat.scale)));
  p.d = ctx.defer_reveal(
      sub_shared(y.flat, retag(p.t.b, y.flat.scale)));
  return p;
}

inline MatShare matmul_finish(PartyCtx& ctx, const PendingMatmul& p) {
  const auto& e = p.e.value();
  const auto& d = p.d.value();
  auto eb = ring_matmul(e, p.t.b.v, p.rows, p.inner, p.cols);
  auto ad = ring_matmul(p.t.a.v, d, p.rows, p.inner, p.cols);
  ShareVec z{ctx.party(), p.out_scale, std::vector<u64>(p.rows * p.cols)};
  for (std::size_t i = 0; i < z.size(); ++i)
    z.v[i] = ring_add(p.t.c.v[i], ring_add(eb[i], ad[i]));
  if (ctx.party() == 0) {
    auto ed = ring_matmul(e, d, p.rows, p.inner, p.cols);
    for (std::size_t i = 0; i < z.size(); ++i)
      z.v[i] = ring_add(z.v[i], ed[i]);
  }
  return MatShare{p.rows, p.cols, rescale_product(z, ctx.codec())};
}

inline MatShare matmul(PartyCtx& ctx, const MatShare& x, const MatShare& y,
                       MatTripleShare& t) {
  PendingMatmul p = matmul_begin(ctx, x, y, t);
  ctx.flush();
  return matmul_finish(ctx, p);
}

// ---------------------------------------------------------------------------
// Univariate polynomial evaluation. Builds the base tuple
// g = (1, x, ..., x^{m-1}) with all powers in one parallel multivariate
// round, then per block accumulates the coefficient dot product and updates
// g <- x^m * g with one vectorized binary round.
// Online rounds: 0 for degree <= 1, otherwise ceil((deg+1)/m).
// ---------------------------------------------------------------------------

struct PolyPlan {
  std::vector<double> coeffs; // b_0 .. b_deg
  int base_size = 4;          // ||g||, must be <= max_arity
};

namespace detail_proto {

// Encode a constant against `scale` embedded fixed-point factors.
inline u64 encode_at(double c, int scale, const FixedCodec& codec) {
  const double scaled = std::ldexp(c, scale * codec.frac_bits);
  if (!(std::fabs(scaled) < std::ldexp(1.0, 62)))
    throw EncodingRangeError("poly coefficient out of range");
  return from_signed(std::llround(scaled));
}

} // namespace detail_proto

inline ShareVec poly_eval(PartyCtx& ctx, const ShareVec& x,
                          const PolyPlan& plan) {
  const FixedCodec& codec = ctx.codec();
  if (plan.coeffs.empty())
    throw ConfigError("poly_eval: need at least one coefficient");
  if (plan.base_size < 2 || plan.base_size > ctx.max_arity())
    throw ConfigError("poly_eval: base tuple size outside [2, max_arity]");
  if (x.scale != 1) throw ProtocolError("poly_eval: input must be scale 1");

  const int deg = int(plan.coeffs.size()) - 1;
  const std::size_t len = x.size();

  // Degenerate degrees need no communication at all.
  if (deg == 0) {
    std::vector<double> c(len, plan.coeffs[0]);
    return constant_share(ctx, c);
  }
  if (deg == 1) {
    ShareVec out = mul_public_real(x, plan.coeffs[1], codec);
    return add_public(out, detail_proto::encode_at(plan.coeffs[0], 1, codec));
  }

  const int m = plan.base_size;
  const int blocks = (deg + 1 + m - 1) / m;
  const int top_power = std::min(deg, m - 1);

  // Base round: x^2..x^top plus the block stepper x^m, all in parallel.
  std::vector<PendingMulMulti> pending;
  std::vector<AuxShare> auxes;
  auxes.reserve(std::size_t(top_power) + 1);
  std::vector<ShareVec> copies;
  for (int k = 2; k <= top_power; ++k) {
    copies.assign(std::size_t(k), x);
    auxes.push_back(ctx.take_aux(k, len));
    pending.push_back(mul_multi_begin(ctx, copies, auxes.back()));
  }
  const bool need_stepper = blocks > 1;
  if (need_stepper) {
    copies.assign(std::size_t(m), x);
    auxes.push_back(ctx.take_aux(m, len));
    pending.push_back(mul_multi_begin(ctx, copies, auxes.back()));
  }
  ctx.flush();

  std::vector<ShareVec> g; // g[r] = x^(current block start + r)
  {
    std::vector<double> ones(len, 1.0);
    g.push_back(constant_share(ctx, ones));
  }
  g.push_back(x);
  std::size_t pi = 0;
  for (int k = 2; k <= top_power; ++k)
    g.push_back(mul_multi_finish(ctx, pending[pi++]));
  ShareVec stepper;
  if (need_stepper) stepper = mul_multi_finish(ctx, pending[pi++]);

  // Coefficient terms are accumulated against constants carrying two extra
  // fixed-point factors, then rescaled once per block.
  ShareVec total{ctx.party(), 1, std::vector<u64>(len, 0)};
  for (int blk = 0; blk < blocks; ++blk) {
    const int s = blk * m;
    const int e = std::min(deg, s + m - 1);
    ShareVec acc{ctx.party(), 3, std::vector<u64>(len, 0)};
    for (int i = s; i <= e; ++i) {
      const u64 c_fix =
          detail_proto::encode_at(plan.coeffs[std::size_t(i)], 2, codec);
      const ShareVec& gi = g[std::size_t(i - s)];
      for (std::size_t j = 0; j < len; ++j)
        acc.v[j] = ring_add(acc.v[j], ring_mul(gi.v[j], c_fix));
    }
    total = add_shared(total, truncate_shared(acc, 2, codec));

    if (blk + 1 < blocks) {
      // g <- x^m * g, one vectorized binary round over the concatenation.
      ShareVec lhs{ctx.party(), 1, {}};
      ShareVec rhs{ctx.party(), 1, {}};
      lhs.v.reserve(std::size_t(m) * len);
      rhs.v.reserve(std::size_t(m) * len);
      for (int r = 0; r < m; ++r) {
        lhs.v.insert(lhs.v.end(), g[std::size_t(r)].v.begin(),
                     g[std::size_t(r)].v.end());
        rhs.v.insert(rhs.v.end(), stepper.v.begin(), stepper.v.end());
      }
      TripleShare t = ctx.take_triple(lhs.size());
      ShareVec prod = mul(ctx, lhs, rhs, t);
      for (int r = 0; r < m; ++r)
        g[std::size_t(r)].v.assign(prod.v.begin() + std::size_t(r) * len,
                                   prod.v.begin() + (std::size_t(r) + 1) * len);
    }
  }
  return total;
}

} // namespace nbeaver
