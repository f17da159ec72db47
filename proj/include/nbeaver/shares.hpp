#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nbeaver/ring.hpp"

namespace nbeaver {

// splitmix64, the standard seed-expansion mixer.
constexpr u64 splitmix64(u64 x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic stream of uniform ring elements. mt19937_64 output is fully
// specified by the standard, so streams are reproducible across platforms.
class Rng64 {
public:
  Rng64() : gen_(0) {}
  explicit Rng64(u64 seed) : gen_(splitmix64(seed)) {}

  u64 next() { return gen_(); }

  std::vector<u64> next_vec(std::size_t len) {
    std::vector<u64> out(len);
    for (auto& v : out) v = gen_();
    return out;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(double(gen_() >> 11), -53);
  }

private:
  std::mt19937_64 gen_;
};

// One party's additive share of a secret vector. `scale` counts the number
// of fixed-point 2^L factors currently embedded in the value (0 for raw ring
// integers, 1 for canonically encoded reals, >1 for untruncated products).
struct ShareVec {
  int owner = 0;
  int scale = 1;
  std::vector<u64> v;

  std::size_t size() const { return v.size(); }
};

inline void check_aligned(const ShareVec& a, const ShareVec& b,
                          const char* what) {
  if (a.v.size() != b.v.size())
    throw ProtocolError(std::string(what) + ": length mismatch");
  if (a.scale != b.scale)
    throw ProtocolError(std::string(what) + ": scale mismatch");
}

inline ShareVec add_shared(const ShareVec& a, const ShareVec& b) {
  check_aligned(a, b, "add_shared");
  ShareVec out{a.owner, a.scale, std::vector<u64>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = ring_add(a.v[i], b.v[i]);
  return out;
}

inline ShareVec sub_shared(const ShareVec& a, const ShareVec& b) {
  check_aligned(a, b, "sub_shared");
  ShareVec out{a.owner, a.scale, std::vector<u64>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = ring_sub(a.v[i], b.v[i]);
  return out;
}

inline ShareVec neg_shared(const ShareVec& a) {
  ShareVec out{a.owner, a.scale, std::vector<u64>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = ring_neg(a.v[i]);
  return out;
}

// Public-value addition is asymmetric: only party 0 adds the constant.
inline ShareVec add_public(const ShareVec& a, std::span<const u64> c) {
  if (c.size() != a.size() && c.size() != 1)
    throw ProtocolError("add_public: length mismatch");
  ShareVec out = a;
  if (a.owner == 0) {
    for (std::size_t i = 0; i < a.size(); ++i)
      out.v[i] = ring_add(out.v[i], c.size() == 1 ? c[0] : c[i]);
  }
  return out;
}

inline ShareVec add_public(const ShareVec& a, u64 c) {
  return add_public(a, std::span<const u64>(&c, 1));
}

// Multiply every share by a public integer factor. Scale is unchanged:
// non-integer public factors are handled at the protocol layer via
// encode-then-truncate.
inline ShareVec mul_public(const ShareVec& a, u64 c) {
  ShareVec out{a.owner, a.scale, std::vector<u64>(a.size())};
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = ring_mul(a.v[i], c);
  return out;
}

// Split a secret vector into n uniformly random additive shares.
inline std::vector<ShareVec> make_shares(std::span<const u64> secret, int n,
                                         Rng64& rng, int scale = 1) {
  if (n < 2) throw ConfigError("make_shares: need at least 2 parties");
  std::vector<ShareVec> shares(n);
  for (int p = 0; p < n; ++p) {
    shares[p].owner = p;
    shares[p].scale = scale;
    shares[p].v.assign(secret.size(), 0);
  }
  for (std::size_t i = 0; i < secret.size(); ++i) {
    u64 acc = 0;
    for (int p = 0; p + 1 < n; ++p) {
      u64 r = rng.next();
      shares[p].v[i] = r;
      acc = ring_add(acc, r);
    }
    shares[n - 1].v[i] = ring_sub(secret[i], acc);
  }
  return shares;
}

inline std::vector<u64> reconstruct(std::span<const ShareVec> shares) {
  if (shares.empty()) throw ProtocolError("reconstruct: no shares");
  const std::size_t len = shares[0].size();
  const int scale = shares[0].scale;
  std::vector<u64> out(len, 0);
  for (const auto& s : shares) {
    if (s.size() != len)
      throw ProtocolError("reconstruct: length mismatch");
    if (s.scale != scale)
      throw ProtocolError("reconstruct: scale mismatch");
    for (std::size_t i = 0; i < len; ++i) out[i] = ring_add(out[i], s.v[i]);
  }
  return out;
}

// Pseudorandom zero sharing. Every ordered party pair (p,q) owns a seeded
// stream; party p outputs sum over q != p of PRG(seed[p][q]) - PRG(seed[q][p])
// so the n outputs cancel exactly. All parties must derive the pairwise
// seeds from the same session master seed.
class ZeroShareGen {
public:
  ZeroShareGen(u64 master_seed, int n_parties, int party)
      : n_(n_parties), party_(party) {
    if (n_parties < 2) throw ConfigError("ZeroShareGen: need >= 2 parties");
    out_.resize(n_);
    in_.resize(n_);
    for (int q = 0; q < n_; ++q) {
      if (q == party_) continue;
      out_[q] = Rng64(pair_seed(master_seed, party_, q));
      in_[q] = Rng64(pair_seed(master_seed, q, party_));
    }
  }

  ShareVec next(std::size_t len, int scale = 1) {
    ShareVec out{party_, scale, std::vector<u64>(len, 0)};
    for (int q = 0; q < n_; ++q) {
      if (q == party_) continue;
      for (std::size_t i = 0; i < len; ++i)
        out.v[i] = ring_add(out.v[i], ring_sub(out_[q].next(), in_[q].next()));
    }
    return out;
  }

  static u64 pair_seed(u64 master, int from, int to) {
    return splitmix64(splitmix64(master ^ 0x5a5a5a5a00000000ull) ^
                      (u64(from) << 32) ^ u64(to));
  }

private:
  int n_;
  int party_;
  std::vector<Rng64> out_;
  std::vector<Rng64> in_;
};

} // namespace nbeaver
