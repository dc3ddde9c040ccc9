#include "polsdf/common.hpp"
#include "polsdf/pten.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

using namespace polsdf;

namespace {

Tensor random_tensor(std::vector<uint32_t> dims, uint64_t seed) {
    Tensor t(std::move(dims));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-10.0f, 10.0f);
    for (auto &v : t.data) v = u(rng);
    return t;
}

}  // namespace

TEST(Pten, RoundTripIsBitExact) {
    polsdf::testing::TempDir dir("pten");
    const Tensor t = random_tensor({3, 4, 2}, 7);
    save_map(dir / "t.pten", t);
    const Tensor back = load_map(dir / "t.pten");
    ASSERT_EQ(back.dims, t.dims);
    ASSERT_EQ(back.data.size(), t.data.size());
    EXPECT_EQ(std::memcmp(back.data.data(), t.data.data(), t.data.size() * sizeof(float)), 0);
}

TEST(Pten, EncodingLayout) {
    Tensor t({2u, 1u});
    t.data = {1.0f, -2.5f};
    const auto bytes = encode_pten(t);
    ASSERT_EQ(bytes.size(), 4u + 4u + 8u + 8u);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PTEN");
    EXPECT_EQ(bytes[4], 2);  // rank, little-endian
    EXPECT_EQ(bytes[8], 2);
    EXPECT_EQ(bytes[12], 1);
    float f;
    std::memcpy(&f, bytes.data() + 20, 4);
    EXPECT_EQ(f, -2.5f);
}

TEST(Pten, RejectsWrongMagic) {
    auto bytes = encode_pten(random_tensor({2, 2}, 1));
    bytes[0] = 'X';
    EXPECT_THROW(decode_pten(bytes), DataError);
}

TEST(Pten, RejectsTruncatedPayload) {
    auto bytes = encode_pten(random_tensor({2, 3}, 2));
    bytes.resize(bytes.size() - 3);
    EXPECT_THROW(decode_pten(bytes), DataError);
}

TEST(Pten, RejectsTruncatedHeader) {
    auto bytes = encode_pten(random_tensor({2, 3}, 2));
    bytes.resize(10);
    EXPECT_THROW(decode_pten(bytes), DataError);
}

TEST(Pten, RejectsTrailingBytes) {
    auto bytes = encode_pten(random_tensor({2, 3}, 2));
    bytes.push_back(0);
    EXPECT_THROW(decode_pten(bytes), DataError);
}

TEST(Pten, DimensionMismatchOnLoad) {
    polsdf::testing::TempDir dir("pten");
    save_map(dir / "t.pten", random_tensor({3, 4}, 3));
    const uint32_t want[2] = {4, 3};
    EXPECT_THROW(load_map(dir / "t.pten", want), DataError);
    const uint32_t ok[2] = {3, 4};
    EXPECT_NO_THROW(load_map(dir / "t.pten", ok));
}

TEST(Pten, MissingFileIsDataError) { EXPECT_THROW(load_map("/nonexistent/x.pten"), DataError); }
