#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ssimwm/complexity_model.hpp"
#include "ssimwm/error.hpp"

namespace ssimwm {
namespace {

TEST(WindowCounts, CifValues) {
  EXPECT_EQ(aNonOverlapped(360, 288), 6480);
  EXPECT_EQ(aOverlapped(360, 288, 4), 101745);
  EXPECT_EQ(aGaussianPadded(360, 288), 103680);
  EXPECT_EQ(aSemi(360, 288), 6319);
}

TEST(WindowCounts, SmallCases) {
  EXPECT_EQ(aNonOverlapped(24, 24), 36);
  EXPECT_EQ(aOverlapped(360, 288, 8), 353 * 281);
  EXPECT_EQ(aOverlapped(4, 4, 4), 1);
  EXPECT_EQ(aOverlapped(11, 11, 11), 1);
  EXPECT_EQ(aGaussianPadded(1, 1), 1);
  EXPECT_EQ(aGaussianPadded(24, 24), 576);
  EXPECT_EQ(aSemi(8, 8), 1);
  EXPECT_EQ(aSemi(24, 24), 25);
}

TEST(WindowCounts, Rejections) {
  EXPECT_THROW(aOverlapped(360, 288, 3), Error);
  EXPECT_THROW(aOverlapped(360, 288, 289), Error);
  EXPECT_THROW(aNonOverlapped(30, 24), Error);
  EXPECT_THROW(aSemi(24, 30), Error);
}

TEST(WindowCounts, SemiIsAboutSixteenTimesFewer) {
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<int> dim(16, 200);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 4 * dim(rng), h = 4 * dim(rng);
    const double ratio = static_cast<double>(aOverlapped(w, h, 4)) / aSemi(w, h);
    EXPECT_GE(ratio, 15.0) << w << "x" << h;
    EXPECT_LE(ratio, 17.0) << w << "x" << h;
  }
}

TEST(ClosedFormB, Values) {
  EXPECT_DOUBLE_EQ(bOverlappedFormula(4), 313.0);
  EXPECT_DOUBLE_EQ(bOverlappedFormula(8),
                   (std::exp2(16) + 6 * std::exp2(20) + 9 * std::exp2(25)) / 16);
  EXPECT_NEAR(bOverlappedFormula(8), 1.928e7, 0.001e7);
  EXPECT_THROW(bOverlappedFormula(6), Error);
  EXPECT_THROW(bOverlappedFormula(2), Error);
}

TEST(BlocksCovered, Examples) {
  EXPECT_EQ(blocksCovered(0, 0, 4), 1);
  EXPECT_EQ(blocksCovered(0, 2, 4), 2);
  EXPECT_EQ(blocksCovered(2, 2, 4), 4);
  EXPECT_EQ(blocksCovered(0, 0, 8), 4);
  EXPECT_EQ(blocksCovered(-5, -5, 11), 16);
}

TEST(BlocksCovered, StaysWithinBounds) {
  // Per axis an n-sample span meets between ceil(n/4) and ceil((n-1)/4) + 1
  // blocks, and both ends are reached.
  for (int n = 1; n <= 13; ++n) {
    const int lo = (n + 3) / 4;
    const int hi = (n + 2) / 4 + 1;
    int seen_lo = 1 << 20, seen_hi = 0;
    for (int top = -8; top < 8; ++top) {
      for (int left = -8; left < 8; ++left) {
        const int b = blocksCovered(top, left, n);
        EXPECT_GE(b, lo * lo);
        EXPECT_LE(b, hi * hi);
        seen_lo = std::min(seen_lo, b);
        seen_hi = std::max(seen_hi, b);
      }
    }
    EXPECT_EQ(seen_lo, lo * lo) << n;
    EXPECT_EQ(seen_hi, hi * hi) << n;
  }
}

TEST(MeasuredB, Examples) {
  EXPECT_EQ(measuredB(360, 288, WindowMode::nonOverlapped()), 2.0);
  EXPECT_EQ(measuredB(360, 288, WindowMode::semiOverlapped()), 16.0);
  EXPECT_EQ(measuredB(8, 8, WindowMode::semiOverlapped()), 16.0);
  // Offset classes of a 4×4 window on an unbounded grid: 1 aligned (one
  // block), 6 straddling one boundary (two blocks), 9 straddling both (four).
  const double interior = (1 * 2 + 6 * 4 + 9 * 16) / 16.0;
  EXPECT_DOUBLE_EQ(interior, 10.625);
  EXPECT_NEAR(measuredB(4000, 4000, WindowMode::overlapped(4)), interior, 0.01);
  EXPECT_EQ(measuredB(4, 4, WindowMode::overlapped(4)), 2.0);
}

TEST(MeasuredB, MatchesDirectEnumeration) {
  std::mt19937_64 rng(82);
  std::uniform_int_distribution<int> dim(2, 12);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 4 * dim(rng), h = 4 * dim(rng);
    double sum = 0.0;
    for (int top = 0; top + 4 <= h; ++top) {
      for (int left = 0; left + 4 <= w; ++left) sum += std::exp2(blocksCovered(top, left, 4));
    }
    EXPECT_NEAR(measuredB(w, h, WindowMode::overlapped(4)), sum / aOverlapped(w, h, 4), 1e-9);
  }
}

TEST(ComplexityReport, CifTable) {
  const auto report = complexityReport(360, 288);
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].optimizations, 6480);
  EXPECT_EQ(report.rows[1].optimizations, 101745);
  EXPECT_EQ(report.rows[2].optimizations, 103680);
  EXPECT_EQ(report.rows[3].optimizations, 6319);
  EXPECT_NEAR(report.rows[3].normalized_measured, 7.80, 0.005);
  EXPECT_NEAR(report.rows[3].normalized_measured, 6319.0 * 16 / (6480.0 * 2), 1e-12);
  ASSERT_TRUE(report.rows[1].normalized_reference);
  // 101745 * 8.40 / 12960 = 65.9458; the published figure is truncated.
  EXPECT_NEAR(*report.rows[1].normalized_reference, 65.94, 0.01);
  EXPECT_NE(report.rows[1].normalized_measured, *report.rows[1].normalized_reference);
  EXPECT_EQ(*report.rows[1].ops_closed_form, 313.0);
  EXPECT_EQ(*report.rows[1].ops_reference, 8.40);
  EXPECT_EQ(*report.rows[2].ops_reference, 4871.0);
  EXPECT_FALSE(report.rows[2].ops_closed_form);
  EXPECT_EQ(report.rows[0].normalized_measured, 1.0);
}

TEST(ComplexityReport, SmallImages) {
  EXPECT_EQ(complexityReport(8, 8).rows[3].optimizations, 1);
  EXPECT_EQ(complexityReport(24, 24).rows[0].optimizations, 36);
  EXPECT_THROW(complexityReport(10, 8), Error);
}

TEST(ComplexityReport, TableListsEveryMode) {
  const auto text = formatTable(complexityReport(360, 288));
  for (const char* token : {"non", "over4", "gauss", "semi", "101745", "7.80", "65.95"}) {
    EXPECT_NE(text.find(token), std::string::npos) << token;
  }
}

}  // namespace
}  // namespace ssimwm
