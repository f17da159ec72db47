#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "nbeaver/ring.hpp"

namespace nbeaver {

// All multi-byte fields on the wire are little-endian.
inline void put_u32(std::vector<std::uint8_t>& buf, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(x >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& buf, u64 x) {
  for (int i = 0; i < 8; ++i) buf.push_back(std::uint8_t(x >> (8 * i)));
}

class WireReader {
public:
  explicit WireReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= std::uint32_t(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return x;
  }

  u64 u64v() {
    need(8);
    u64 x = 0;
    for (int i = 0; i < 8; ++i) x |= u64(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return x;
  }

  std::vector<u64> u64_vec(std::size_t count) {
    std::vector<u64> out(count);
    for (auto& v : out) v = u64v();
    return out;
  }

  bool eof() const { return pos_ == data_.size(); }

private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size())
      throw ProtocolError("wire: truncated frame");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// Offline-phase frame carrying one correlated tensor from the dealer:
//   session id, correlation id, tag (subset bitmask or triple role),
//   shape (rows, cols), then rows*cols ring elements.
struct OfflineFrame {
  u64 session = 0;
  u64 corr = 0;
  std::uint32_t tag = 0;
  std::uint32_t rows = 0;
  std::uint32_t cols = 1;
  std::vector<u64> elems;

  void encode_to(std::vector<std::uint8_t>& buf) const {
    put_u64(buf, session);
    put_u64(buf, corr);
    put_u32(buf, tag);
    put_u32(buf, rows);
    put_u32(buf, cols);
    for (u64 e : elems) put_u64(buf, e);
  }

  static OfflineFrame decode_from(WireReader& r) {
    OfflineFrame f;
    f.session = r.u64v();
    f.corr = r.u64v();
    f.tag = r.u32();
    f.rows = r.u32();
    f.cols = r.u32();
    f.elems = r.u64_vec(std::size_t(f.rows) * f.cols);
    return f;
  }
};

// Triple roles used as frame tags.
enum TripleRole : std::uint32_t { kRoleA = 1, kRoleB = 2, kRoleC = 3 };

// Online-phase frame: one party's contribution to a synchronized round.
//   round index, sender, correlation id, payload length, payload elements.
struct MessageFrame {
  std::uint32_t round = 0;
  std::uint32_t sender = 0;
  u64 corr = 0;
  std::vector<u64> payload;

  std::vector<std::uint8_t> encode() const {
    std::vector<std::uint8_t> buf;
    buf.reserve(24 + payload.size() * 8);
    put_u32(buf, round);
    put_u32(buf, sender);
    put_u64(buf, corr);
    put_u64(buf, u64(payload.size()));
    for (u64 e : payload) put_u64(buf, e);
    return buf;
  }

  static MessageFrame decode(std::span<const std::uint8_t> data) {
    WireReader r(data);
    MessageFrame f;
    f.round = r.u32();
    f.sender = r.u32();
    f.corr = r.u64v();
    f.payload = r.u64_vec(r.u64v());
    if (!r.eof()) throw ProtocolError("wire: trailing bytes in message frame");
    return f;
  }
};

} // namespace nbeaver
