#include <gtest/gtest.h>

#include "nbeaver/dealer.hpp"
#include "nbeaver/shares.hpp"
#include "nbeaver/wire.hpp"

using namespace nbeaver;

TEST(Wire, LittleEndianByteLayoutIsPinned) {
  std::vector<std::uint8_t> buf;
  put_u64(buf, 0x1122334455667788ull);
  const std::vector<std::uint8_t> expect{0x88, 0x77, 0x66, 0x55,
                                         0x44, 0x33, 0x22, 0x11};
  EXPECT_EQ(buf, expect);
  put_u32(buf, 0xa1b2c3d4u);
  EXPECT_EQ(buf[8], 0xd4);
  EXPECT_EQ(buf[11], 0xa1);
}

TEST(Wire, OfflineFrameRoundtrip) {
  Rng64 rng(21);
  for (int i = 0; i < 200; ++i) {
    OfflineFrame f;
    f.session = rng.next();
    f.corr = rng.next();
    f.tag = std::uint32_t(rng.next() & 0xf) + 1;
    f.rows = std::uint32_t(rng.next() % 7);
    f.cols = std::uint32_t(rng.next() % 5) + 1;
    f.elems = rng.next_vec(std::size_t(f.rows) * f.cols);
    std::vector<std::uint8_t> buf;
    f.encode_to(buf);
    WireReader r(buf);
    OfflineFrame g = OfflineFrame::decode_from(r);
    EXPECT_TRUE(r.eof());
    EXPECT_EQ(g.session, f.session);
    EXPECT_EQ(g.corr, f.corr);
    EXPECT_EQ(g.tag, f.tag);
    EXPECT_EQ(g.rows, f.rows);
    EXPECT_EQ(g.cols, f.cols);
    EXPECT_EQ(g.elems, f.elems);
  }
}

TEST(Wire, MessageFrameRoundtrip) {
  Rng64 rng(22);
  for (int i = 0; i < 200; ++i) {
    MessageFrame f;
    f.round = std::uint32_t(rng.next());
    f.sender = std::uint32_t(rng.next() % 8);
    f.corr = rng.next();
    f.payload = rng.next_vec(rng.next() % 33);
    auto bytes = f.encode();
    MessageFrame g = MessageFrame::decode(bytes);
    EXPECT_EQ(g.round, f.round);
    EXPECT_EQ(g.sender, f.sender);
    EXPECT_EQ(g.corr, f.corr);
    EXPECT_EQ(g.payload, f.payload);
  }
}

TEST(Wire, MessageFrameHeaderLayout) {
  MessageFrame f;
  f.round = 7;
  f.sender = 2;
  f.corr = 0x0102030405060708ull;
  f.payload = {0xaabbccddeeff0011ull};
  auto bytes = f.encode();
  // round u32 | sender u32 | corr u64 | payload length u64 | elements
  ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u + 8u);
  EXPECT_EQ(bytes[0], 7);
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(bytes[8], 0x08);
  EXPECT_EQ(bytes[15], 0x01);
  EXPECT_EQ(bytes[16], 1); // one element
  EXPECT_EQ(bytes[24], 0x11);
}

TEST(Wire, TruncatedFrameIsRejected) {
  MessageFrame f;
  f.payload = {1, 2, 3};
  auto bytes = f.encode();
  bytes.pop_back();
  EXPECT_THROW(MessageFrame::decode(bytes), ProtocolError);
}

TEST(Wire, DealerTripleTapeRoundtrip) {
  Dealer dealer(404, 3, /*session=*/9);
  auto triple = dealer.gen_triple(5);
  std::vector<std::uint8_t> buf;
  Dealer::write_triple(buf, triple[1], 9);
  WireReader r(buf);
  auto fa = OfflineFrame::decode_from(r);
  auto fb = OfflineFrame::decode_from(r);
  auto fc = OfflineFrame::decode_from(r);
  EXPECT_TRUE(r.eof());
  EXPECT_EQ(fa.tag, u64(kRoleA));
  EXPECT_EQ(fb.tag, u64(kRoleB));
  EXPECT_EQ(fc.tag, u64(kRoleC));
  EXPECT_EQ(fa.session, 9u);
  EXPECT_EQ(fa.corr, fb.corr);
  EXPECT_EQ(fa.elems, triple[1].a.v);
  EXPECT_EQ(fc.elems, triple[1].c.v);
}

TEST(Wire, DealerAuxTapeCarriesSubsetBitmasks) {
  Dealer dealer(405, 2, 3);
  auto aux = dealer.gen_aux(3, 2);
  std::vector<std::uint8_t> buf;
  Dealer::write_aux(buf, aux[0], 3);
  WireReader r(buf);
  for (std::uint32_t mask = 1; mask <= 7; ++mask) {
    auto f = OfflineFrame::decode_from(r);
    EXPECT_EQ(f.tag, mask);
    EXPECT_EQ(f.elems, aux[0].entry(mask).v);
  }
  EXPECT_TRUE(r.eof());
}
