#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nbeaver/ring.hpp"
#include "nbeaver/shares.hpp"
#include "nbeaver/wire.hpp"

namespace nbeaver {

// One party's view of a Beaver triple (a, b, ab). The spent flag enforces
// single use of the masks.
struct TripleShare {
  ShareVec a, b, c;
  u64 corr = 0;
  bool spent = false;
};

// One party's view of an n-ary auxiliary set: shares of every nonempty
// subset product of the n masks, keyed by subset bitmask. entry(mask) for a
// singleton mask {i} is the blinding mask a_i itself.
struct AuxShare {
  int arity = 0;
  u64 corr = 0;
  bool spent = false;
  std::vector<ShareVec> entries; // index mask-1, mask in [1, 2^arity)

  const ShareVec& entry(std::uint32_t mask) const {
    return entries.at(mask - 1);
  }
};

// One party's view of a matrix triple (A, B, C = A x B), row-major.
struct MatTripleShare {
  std::size_t rows = 0, inner = 0, cols = 0;
  ShareVec a, b, c;
  u64 corr = 0;
  bool spent = false;
};

// Row-major matrix product over the ring.
inline std::vector<u64> ring_matmul(std::span<const u64> a,
                                    std::span<const u64> b, std::size_t rows,
                                    std::size_t inner, std::size_t cols) {
  std::vector<u64> out(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      const u64 aik = a[i * inner + k];
      for (std::size_t j = 0; j < cols; ++j)
        out[i * cols + j] =
            ring_add(out[i * cols + j], ring_mul(aik, b[k * cols + j]));
    }
  return out;
}

// Trusted dealer. Generates correlated randomness from its own seed before
// the online phase and never takes part in online rounds. Offline traffic
// is metered in ring elements per party.
class Dealer {
public:
  Dealer(u64 seed, int n_parties, u64 session_id = 0)
      : rng_(splitmix64(seed ^ 0xdea1e4dea1e4ull)),
        n_(n_parties),
        session_(session_id) {
    if (n_parties < 2) throw ConfigError("Dealer: need >= 2 parties");
  }

  // Fresh (a, b, ab) with a, b uniform; elementwise over `len` slots.
  std::vector<TripleShare> gen_triple(std::size_t len) {
    const u64 corr = next_corr_++;
    std::vector<u64> a = rng_.next_vec(len);
    std::vector<u64> b = rng_.next_vec(len);
    std::vector<u64> c(len);
    for (std::size_t i = 0; i < len; ++i) c[i] = ring_mul(a[i], b[i]);

    auto as = make_shares(a, n_, rng_, 1);
    auto bs = make_shares(b, n_, rng_, 1);
    auto cs = make_shares(c, n_, rng_, 2);
    std::vector<TripleShare> out(n_);
    for (int p = 0; p < n_; ++p)
      out[p] = TripleShare{std::move(as[p]), std::move(bs[p]),
                           std::move(cs[p]), corr, false};
    account(3 * len);
    return out;
  }

  // All 2^arity - 1 subset products of `arity` fresh uniform masks.
  std::vector<AuxShare> gen_aux(int arity, std::size_t len) {
    if (arity < 2) throw ConfigError("gen_aux: arity must be >= 2");
    const u64 corr = next_corr_++;
    std::vector<std::vector<u64>> masks(arity);
    for (auto& m : masks) m = rng_.next_vec(len);

    const std::uint32_t nmask = (1u << arity) - 1;
    std::vector<AuxShare> out(n_);
    for (int p = 0; p < n_; ++p) {
      out[p].arity = arity;
      out[p].corr = corr;
      out[p].entries.resize(nmask);
    }
    for (std::uint32_t mask = 1; mask <= nmask; ++mask) {
      std::vector<u64> prod(len, 1);
      for (int i = 0; i < arity; ++i)
        if (mask & (1u << i))
          for (std::size_t j = 0; j < len; ++j)
            prod[j] = ring_mul(prod[j], masks[i][j]);
      auto shares = make_shares(prod, n_, rng_, 1);
      for (int p = 0; p < n_; ++p)
        out[p].entries[mask - 1] = std::move(shares[p]);
    }
    account((u64(1) << arity) - 1, len);
    return out;
  }

  // Matrix triple A (rows x inner), B (inner x cols), C = A x B.
  std::vector<MatTripleShare> gen_matmul(std::size_t rows, std::size_t inner,
                                         std::size_t cols) {
    const u64 corr = next_corr_++;
    std::vector<u64> a = rng_.next_vec(rows * inner);
    std::vector<u64> b = rng_.next_vec(inner * cols);
    std::vector<u64> c = ring_matmul(a, b, rows, inner, cols);

    auto as = make_shares(a, n_, rng_, 1);
    auto bs = make_shares(b, n_, rng_, 1);
    auto cs = make_shares(c, n_, rng_, 2);
    std::vector<MatTripleShare> out(n_);
    for (int p = 0; p < n_; ++p)
      out[p] = MatTripleShare{rows,        inner,
                              cols,        std::move(as[p]),
                              std::move(bs[p]), std::move(cs[p]),
                              corr,        false};
    account(rows * inner + inner * cols + rows * cols);
    return out;
  }

  // Correlated ring elements distributed to each party so far.
  u64 offline_elements_per_party() const { return offline_elems_; }
  u64 offline_bytes_per_party() const { return offline_elems_ * 8; }

  u64 session_id() const { return session_; }
  int n_parties() const { return n_; }

  // Serialize one party's view of a triple into offline frames.
  static void write_triple(std::vector<std::uint8_t>& buf,
                           const TripleShare& t, u64 session) {
    write_vec(buf, session, t.corr, kRoleA, t.a.v.size(), 1, t.a.v);
    write_vec(buf, session, t.corr, kRoleB, t.b.v.size(), 1, t.b.v);
    write_vec(buf, session, t.corr, kRoleC, t.c.v.size(), 1, t.c.v);
  }

  static void write_aux(std::vector<std::uint8_t>& buf, const AuxShare& s,
                        u64 session) {
    const std::uint32_t nmask = (1u << s.arity) - 1;
    for (std::uint32_t mask = 1; mask <= nmask; ++mask) {
      const auto& e = s.entry(mask);
      write_vec(buf, session, s.corr, mask, e.v.size(), 1, e.v);
    }
  }

  static void write_matmul(std::vector<std::uint8_t>& buf,
                           const MatTripleShare& t, u64 session) {
    write_vec(buf, session, t.corr, kRoleA, t.rows, t.inner, t.a.v);
    write_vec(buf, session, t.corr, kRoleB, t.inner, t.cols, t.b.v);
    write_vec(buf, session, t.corr, kRoleC, t.rows, t.cols, t.c.v);
  }

private:
  static void write_vec(std::vector<std::uint8_t>& buf, u64 session, u64 corr,
                        std::uint32_t tag, std::size_t rows, std::size_t cols,
                        const std::vector<u64>& elems) {
    OfflineFrame f;
    f.session = session;
    f.corr = corr;
    f.tag = tag;
    f.rows = std::uint32_t(rows);
    f.cols = std::uint32_t(cols);
    f.elems = elems;
    f.encode_to(buf);
  }

  void account(u64 elems_per_party) { offline_elems_ += elems_per_party; }
  void account(u64 entries, u64 len) { offline_elems_ += entries * len; }

  Rng64 rng_;
  int n_;
  u64 session_;
  u64 next_corr_ = 0;
  u64 offline_elems_ = 0;
};

} // namespace nbeaver
