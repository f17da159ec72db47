#include <gtest/gtest.h>

#include "nbeaver/shares.hpp"
#include "test_util.hpp"

using namespace nbeaver;

namespace {

std::vector<u64> random_secret(Rng64& rng, std::size_t len) {
  std::vector<u64> s(len);
  for (auto& v : s) v = rng.next();
  return s;
}

} // namespace

TEST(Sharing, ReconstructionExactness) {
  Rng64 rng(101);
  for (int n : {2, 3, 5, 8}) {
    const auto secret = random_secret(rng, 10000);
    auto shares = make_shares(secret, n, rng);
    EXPECT_EQ(reconstruct(shares), secret);
  }
}

TEST(Sharing, ZeroSecretTwoPartySharesAreNegatives) {
  Rng64 rng(102);
  std::vector<u64> zero{0};
  auto shares = make_shares(zero, 2, rng);
  EXPECT_EQ(shares[0].v[0], ring_neg(shares[1].v[0]));
}

TEST(Sharing, RoundtripThroughCodec) {
  Rng64 rng(103);
  FixedCodec codec{16};
  std::vector<u64> secret{codec.encode(2.5)};
  auto shares = make_shares(secret, 3, rng);
  EXPECT_DOUBLE_EQ(codec.decode(reconstruct(shares)[0]), 2.5);
}

TEST(Sharing, RejectsDegenerateConfigs) {
  Rng64 rng(104);
  std::vector<u64> secret{1};
  EXPECT_THROW(make_shares(secret, 1, rng), ConfigError);
}

TEST(Sharing, ReconstructRejectsMismatchedLengths) {
  Rng64 rng(105);
  auto shares = make_shares(random_secret(rng, 4), 3, rng);
  shares[1].v.pop_back();
  EXPECT_THROW(reconstruct(shares), ProtocolError);
}

TEST(Sharing, ShareZeroUniformityChiSquare) {
  // Empirical distribution of the first share on the mod-2^8 projection over
  // 10^4 fresh sharings of a fixed secret, alpha = 0.01.
  Rng64 rng(106);
  std::vector<u64> secret{12345};
  std::vector<u64> samples;
  samples.reserve(10000);
  for (int i = 0; i < 10000; ++i)
    samples.push_back(make_shares(secret, 3, rng)[0].v[0]);
  auto hist = testutil::low_byte_hist(samples);
  EXPECT_LT(testutil::chi_square_uniform(hist),
            testutil::chi_square_crit(255));
}

TEST(Sharing, MaskingDeltaUniformityChiSquare) {
  // delta = x - a over fresh uniform masks, fixed x: the revealed value in
  // the Beaver protocols. Its projection must be uniform.
  Rng64 rng(107);
  const u64 x = 0x1122334455667788ull;
  std::vector<u64> samples;
  samples.reserve(10000);
  for (int i = 0; i < 10000; ++i) samples.push_back(ring_sub(x, rng.next()));
  auto hist = testutil::low_byte_hist(samples);
  EXPECT_LT(testutil::chi_square_uniform(hist),
            testutil::chi_square_crit(255));
}

TEST(Homomorphism, AddSharedMatchesPlain) {
  Rng64 rng(108);
  for (int i = 0; i < 200; ++i) {
    auto a = random_secret(rng, 16);
    auto b = random_secret(rng, 16);
    auto as = make_shares(a, 3, rng);
    auto bs = make_shares(b, 3, rng);
    std::vector<ShareVec> sums;
    for (int p = 0; p < 3; ++p) sums.push_back(add_shared(as[p], bs[p]));
    auto got = reconstruct(sums);
    for (std::size_t j = 0; j < a.size(); ++j)
      EXPECT_EQ(got[j], ring_add(a[j], b[j]));
  }
}

TEST(Homomorphism, SmallIntegerExample) {
  Rng64 rng(109);
  std::vector<u64> three{3}, four{4};
  auto as = make_shares(three, 3, rng);
  auto bs = make_shares(four, 3, rng);
  std::vector<ShareVec> sums;
  for (int p = 0; p < 3; ++p) sums.push_back(add_shared(as[p], bs[p]));
  EXPECT_EQ(reconstruct(sums)[0], 7u);
}

TEST(Homomorphism, AddPublicOnlyOnPartyZero) {
  Rng64 rng(110);
  FixedCodec codec{16};
  std::vector<u64> one{codec.encode(1.0)};
  auto shares = make_shares(one, 3, rng);
  std::vector<ShareVec> bumped;
  for (int p = 0; p < 3; ++p)
    bumped.push_back(add_public(shares[p], codec.encode(2.0)));
  EXPECT_EQ(reconstruct(bumped)[0], codec.encode(3.0));
}

TEST(Homomorphism, MulPublicIntegerFactor) {
  Rng64 rng(111);
  FixedCodec codec{16};
  std::vector<u64> val{codec.encode(1.5)};
  auto shares = make_shares(val, 3, rng);
  std::vector<ShareVec> scaled;
  for (int p = 0; p < 3; ++p) scaled.push_back(mul_public(shares[p], 2));
  EXPECT_EQ(reconstruct(scaled)[0], codec.encode(3.0));
}

TEST(Homomorphism, ScaleMismatchIsProtocolError) {
  Rng64 rng(112);
  auto a = make_shares(random_secret(rng, 4), 2, rng);
  auto b = make_shares(random_secret(rng, 4), 2, rng);
  b[0].scale = 2;
  EXPECT_THROW(add_shared(a[0], b[0]), ProtocolError);
}

TEST(Przs, SumsToZeroAcrossParties) {
  for (int n : {2, 3, 5}) {
    std::vector<ZeroShareGen> gens;
    for (int p = 0; p < n; ++p) gens.emplace_back(909, n, p);
    for (int call = 0; call < 3; ++call) {
      std::vector<ShareVec> outs;
      for (auto& g : gens) outs.push_back(g.next(4));
      auto sum = reconstruct(outs);
      EXPECT_EQ(sum, std::vector<u64>(4, 0));
    }
  }
}

TEST(Przs, DeterministicAcrossGeneratorInstances) {
  ZeroShareGen g1(777, 3, 1);
  ZeroShareGen g2(777, 3, 1);
  for (int call = 0; call < 4; ++call) {
    auto a = g1.next(8);
    auto b = g2.next(8);
    EXPECT_EQ(a.v, b.v);
  }
}

TEST(Przs, TwoPartyOutputsAreNegatives) {
  ZeroShareGen g0(555, 2, 0);
  ZeroShareGen g1(555, 2, 1);
  auto a = g0.next(6);
  auto b = g1.next(6);
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_EQ(a.v[i], ring_neg(b.v[i]));
}
