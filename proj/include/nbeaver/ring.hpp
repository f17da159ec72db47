#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nbeaver {

using u64 = std::uint64_t;
using i64 = std::int64_t;

// Ring element arithmetic over Z/2^64: native unsigned wraparound is the
// modular reduction.
constexpr u64 ring_add(u64 a, u64 b) { return a + b; }
constexpr u64 ring_sub(u64 a, u64 b) { return a - b; }
constexpr u64 ring_mul(u64 a, u64 b) { return a * b; }
constexpr u64 ring_neg(u64 a) { return 0 - a; }

// Signed view of a residue: [0, 2^63) positive, [2^63, 2^64) negative.
constexpr i64 to_signed(u64 a) { return static_cast<i64>(a); }
constexpr u64 from_signed(i64 a) { return static_cast<u64>(a); }

// Arithmetic right shift of the signed interpretation, re-embedded as a
// residue. C++20 guarantees >> on signed types is arithmetic.
constexpr u64 trunc_floor(u64 x, int bits) {
  return from_signed(to_signed(x) >> bits);
}

// Round-to-nearest variant: add half the divisor before shifting.
constexpr u64 trunc_round(u64 x, int bits) {
  if (bits == 0) return x;
  return from_signed(to_signed(x + (u64(1) << (bits - 1))) >> bits);
}

class MpcError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public MpcError {
  using MpcError::MpcError;
};

class ProtocolError : public MpcError {
  using MpcError::MpcError;
};

// Parties disagreed on the shape of an exchange; the session is unusable.
class DesyncError : public ProtocolError {
  using ProtocolError::ProtocolError;
};

class SessionTimeout : public MpcError {
  using MpcError::MpcError;
};

class UsageError : public MpcError {
  using MpcError::MpcError;
};

class EncodingRangeError : public MpcError {
  using MpcError::MpcError;
};

// Fixed-point codec: reals are represented as round(x * 2^frac_bits),
// negatives via the two's-complement residue.
struct FixedCodec {
  int frac_bits = 16;

  constexpr u64 unit() const { return u64(1) << frac_bits; }
  constexpr double resolution() const { return 1.0 / double(unit()); }

  u64 encode(double x) const {
    const double limit = std::ldexp(1.0, 62 - frac_bits);
    if (!(std::fabs(x) < limit)) {
      throw EncodingRangeError("fixed-point encode overflow: |" +
                               std::to_string(x) + "| >= 2^" +
                               std::to_string(62 - frac_bits));
    }
    return from_signed(std::llround(std::ldexp(x, frac_bits)));
  }

  double decode(u64 x) const {
    return std::ldexp(double(to_signed(x)), -frac_bits);
  }

  // Decode a value carrying `scale` embedded 2^frac_bits factors.
  double decode_scaled(u64 x, int scale) const {
    return std::ldexp(double(to_signed(x)), -frac_bits * scale);
  }

  // Quantize a real to the nearest representable value at this precision.
  double quantize(double x) const {
    return std::ldexp(std::nearbyint(std::ldexp(x, frac_bits)), -frac_bits);
  }
};

} // namespace nbeaver
