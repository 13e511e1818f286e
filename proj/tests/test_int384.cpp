#include <gtest/gtest.h>

#include "montdsp/field.hpp"
#include "montdsp/random.hpp"

using montdsp::Int384;

TEST(Int384, HexRoundTripIsFixedWidthLowercase) {
  const Int384 x = Int384::from_hex("0xABCdef0123");
  EXPECT_EQ(x.to_hex().size(), 96U);
  EXPECT_EQ(x.to_hex().substr(86), "abcdef0123");
  EXPECT_EQ(Int384::from_hex(x.to_hex()), x);
}

TEST(Int384, RejectsOversizedAndMalformedHex) {
  EXPECT_THROW(Int384::from_hex("1" + std::string(96, '0')), std::invalid_argument);
  EXPECT_NO_THROW(Int384::from_hex("0" + std::string(96, 'f')));
  EXPECT_THROW(Int384::from_hex("12g4"), std::invalid_argument);
  EXPECT_THROW(Int384::from_hex(""), std::invalid_argument);
}

TEST(Int384, ByteEncodingIsLittleEndian) {
  const Int384 x{0x0102};
  const auto bytes = x.to_bytes_le();
  EXPECT_EQ(bytes[0], 0x02);
  EXPECT_EQ(bytes[1], 0x01);
  EXPECT_EQ(Int384::from_bytes_le(bytes), x);
  std::array<std::uint8_t, 49> wide{};
  wide[48] = 1;
  EXPECT_THROW(Int384::from_bytes_le(wide), std::invalid_argument);
}

TEST(Int384, AddSubWrapWithCarry) {
  Int384 r;
  EXPECT_TRUE(montdsp::add_into(r, Int384::max(), Int384{1}));
  EXPECT_TRUE(r.is_zero());
  EXPECT_TRUE(montdsp::sub_into(r, Int384{0}, Int384{1}));
  EXPECT_EQ(r, Int384::max());
}

TEST(Int384, BitFieldAccess) {
  Int384 x;
  x.set_bits(60, 10, 0x3FF);
  EXPECT_EQ(x.bits(60, 10), 0x3FFU);
  EXPECT_EQ(x.bits(59, 12), 0x7FEU);
  EXPECT_EQ(x.bit_length(), 70U);
}

TEST(SplitJoin, ZeroAndSingleBitLayouts) {
  EXPECT_TRUE(montdsp::split_words<24>(Int384{0}).is_zero());
  Int384 x;
  x.set_bit(24);
  const auto limbs = montdsp::split_words<24>(x);
  EXPECT_EQ(limbs[0], 0U);
  EXPECT_EQ(limbs[1], 1U);
  for (unsigned i = 2; i < 16; ++i) EXPECT_EQ(limbs[i], 0U);
  Int384 y;
  y.set_bit(64);
  EXPECT_EQ(montdsp::split_words<64>(y)[1], 1U);
}

TEST(SplitJoin, RejectsOverwideLimb) {
  montdsp::FieldElement<32> fe;
  fe[3] = std::uint64_t{1} << 32;
  EXPECT_THROW(montdsp::join_words(fe), std::invalid_argument);
}

TEST(SplitJoin, RoundTripPropertyAllWidths) {
  montdsp::Int384Sampler rng(7);
  for (int n = 0; n < 2000; ++n) {
    const Int384 x = rng.raw(384);
    EXPECT_EQ(montdsp::join_words(montdsp::split_words<24>(x)), x);
    EXPECT_EQ(montdsp::join_words(montdsp::split_words<32>(x)), x);
    EXPECT_EQ(montdsp::join_words(montdsp::split_words<64>(x)), x);
    EXPECT_TRUE(montdsp::split_words<24>(x).well_formed());
  }
}
