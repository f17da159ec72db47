#include <gtest/gtest.h>

#include "nbeaver/ring.hpp"
#include "nbeaver/shares.hpp"

using namespace nbeaver;

TEST(Ring, WraparoundExamples) {
  EXPECT_EQ(ring_add(~u64(0), 1), 0u);
  EXPECT_EQ(ring_mul(2, 3), 6u);
  EXPECT_EQ(ring_mul(u64(1) << 63, 2), 0u);
  EXPECT_EQ(ring_sub(0, 1), ~u64(0));
}

TEST(Ring, AxiomsOnRandomValues) {
  Rng64 rng(7);
  for (int i = 0; i < 20000; ++i) {
    const u64 a = rng.next(), b = rng.next(), c = rng.next();
    EXPECT_EQ(ring_add(a, b), ring_add(b, a));
    EXPECT_EQ(ring_mul(a, b), ring_mul(b, a));
    EXPECT_EQ(ring_add(ring_add(a, b), c), ring_add(a, ring_add(b, c)));
    EXPECT_EQ(ring_mul(ring_mul(a, b), c), ring_mul(a, ring_mul(b, c)));
    EXPECT_EQ(ring_mul(a, ring_add(b, c)),
              ring_add(ring_mul(a, b), ring_mul(a, c)));
    EXPECT_EQ(ring_add(a, ring_neg(a)), 0u);
  }
}

TEST(Codec, EncodeExamples) {
  FixedCodec c{16};
  EXPECT_EQ(c.encode(1.0), u64(65536));
  EXPECT_EQ(c.encode(0.0), u64(0));
  EXPECT_EQ(c.encode(-0.5), u64(0) - 32768); // Q - B/2
}

TEST(Codec, DecodeExamples) {
  FixedCodec c{16};
  EXPECT_DOUBLE_EQ(c.decode(65536), 1.0);
  EXPECT_DOUBLE_EQ(c.decode(u64(0) - 32768), -0.5);
  EXPECT_NEAR(c.decode(c.encode(3.14159)), 3.14159, std::ldexp(1.0, -17));
}

TEST(Codec, RoundtripBoundOnRandomReals) {
  FixedCodec c{16};
  Rng64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    const double x = rng.uniform(-1e4, 1e4);
    EXPECT_NEAR(c.decode(c.encode(x)), x, std::ldexp(1.0, -17));
  }
}

TEST(Codec, EncodeRejectsOutOfRange) {
  FixedCodec c{16};
  EXPECT_THROW(c.encode(std::ldexp(1.0, 46)), EncodingRangeError);
  EXPECT_THROW(c.encode(-std::ldexp(1.0, 47)), EncodingRangeError);
  EXPECT_NO_THROW(c.encode(std::ldexp(1.0, 45)));
}

TEST(Codec, EncodeInjectiveAtResolution) {
  FixedCodec c{16};
  // consecutive representable reals map to distinct residues
  u64 prev = c.encode(-2.0);
  for (int k = 1; k <= 4096; ++k) {
    const u64 cur = c.encode(-2.0 + k * std::ldexp(1.0, -16));
    EXPECT_EQ(ring_sub(cur, prev), 1u);
    prev = cur;
  }
}

TEST(Codec, HomomorphicAdditionWithinRange) {
  FixedCodec c{16};
  Rng64 rng(13);
  for (int i = 0; i < 5000; ++i) {
    const double a = rng.uniform(-100.0, 100.0);
    const double b = rng.uniform(-100.0, 100.0);
    EXPECT_NEAR(c.decode(ring_add(c.encode(a), c.encode(b))), a + b,
                std::ldexp(1.0, -16));
  }
}

TEST(Trunc, FloorShiftExamples) {
  FixedCodec c{16};
  // encode(6.0) carrying one extra scale factor, shifted back down
  const u64 once_more = ring_mul(c.encode(6.0), c.unit());
  EXPECT_EQ(trunc_floor(once_more, 16), c.encode(6.0));
  EXPECT_EQ(trunc_floor(0, 16), 0u);
}

// Signed-shift oracle in 128-bit arithmetic, frozen expectation for the
// negative case.
TEST(Trunc, SignedShiftMatchesWideOracle) {
  FixedCodec c{16};
  const u64 x = ring_mul(c.encode(-2.0), c.unit()); // -2.0 at scale 2
  __int128 wide = static_cast<i64>(x);
  wide >>= 16;
  EXPECT_EQ(trunc_floor(x, 16), static_cast<u64>(static_cast<i64>(wide)));
  EXPECT_EQ(trunc_floor(x, 16), c.encode(-2.0));

  Rng64 rng(17);
  for (int i = 0; i < 20000; ++i) {
    const u64 v = rng.next();
    const int bits = 1 + int(rng.next() % 48);
    __int128 w = static_cast<i64>(v);
    w >>= bits;
    EXPECT_EQ(trunc_floor(v, bits), static_cast<u64>(static_cast<i64>(w)));
  }
}

TEST(Trunc, RoundNearestStaysWithinHalfUnit) {
  Rng64 rng(19);
  for (int i = 0; i < 20000; ++i) {
    const i64 v = to_signed(rng.next()) >> 8; // keep headroom for the bias add
    const int bits = 1 + int(rng.next() % 40);
    const i64 got = to_signed(trunc_round(from_signed(v), bits));
    // |got * 2^bits - v| <= 2^(bits-1), checked in exact integer arithmetic
    const __int128 diff = (__int128(got) << bits) - __int128(v);
    const __int128 half = __int128(1) << (bits - 1);
    EXPECT_TRUE(diff <= half && diff >= -half);
  }
}
