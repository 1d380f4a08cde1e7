#include <set>

#include "doctest.h"
#include "linpred/random.hpp"

using namespace linpred;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using B = Philox4x32::Block;
  CHECK(Philox4x32::encrypt(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox4x32 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint32_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a());
    vb.push_back(b());
    vc.push_back(c());
    vd.push_back(d());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
  // The first block of stream s at seed k is the cipher of counter (0, 0, s).
  const auto first = Philox4x32::encrypt({0, 0, 7, 0}, {42, 0});
  CHECK(std::vector<std::uint32_t>(first.begin(), first.end()) == std::vector<std::uint32_t>(va.begin(), va.begin() + 4));
}

TEST_CASE("distribution moments") {
  Philox4x32 eng(1, 0);
  const int n = 200000;
  double s = 0, s2 = 0, u = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(eng);
    s += z;
    s2 += z * z;
    const double v = uniform01(eng);
    CHECK_FALSE((v < 0.0 || v >= 1.0));
    u += v;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(u / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("Haar orthogonal matrices") {
  Philox4x32 eng(3, 1);
  double mean00 = 0.0;
  for (int t = 0; t < 2000; ++t) {
    const Matrix q = haar_orthogonal(eng, 4);
    CHECK((q.transpose() * q - Matrix::Identity(4, 4)).norm() <= 1e-12);
    mean00 += q(0, 0);
  }
  // Each entry is symmetric about zero under the Haar law; sd of q00 is 1/2.
  CHECK(std::abs(mean00 / 2000.0) < 5.0 * 0.5 / std::sqrt(2000.0));
}
