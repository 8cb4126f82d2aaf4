#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ftdtw/alignment.hpp"
#include "ftdtw/error.hpp"
#include "ftdtw/rng.hpp"
#include "oracles.hpp"

using namespace ftdtw;

namespace {

FeatureSequence one_d(std::vector<double> v, std::string id = "s") {
  std::vector<Frame> frames;
  for (double x : v) frames.push_back({x});
  return FeatureSequence(std::move(id), std::move(frames));
}

std::vector<PathCell> cells(std::initializer_list<std::pair<std::size_t, std::size_t>> one_based) {
  std::vector<PathCell> out;
  for (auto [p, q] : one_based) out.push_back({p - 1, q - 1});
  return out;
}

}  // namespace

TEST(FrameDistance, Euclidean345) {
  const std::vector<double> a{0, 0}, b{3, 4};
  EXPECT_DOUBLE_EQ(frame_distance(a, b, DistanceKind::Euclidean), 5.0);
  EXPECT_DOUBLE_EQ(frame_distance(a, b, DistanceKind::Manhattan), 7.0);
}

TEST(FrameDistance, IdentityIsZero) {
  const std::vector<double> a{2.5, -1};
  EXPECT_EQ(frame_distance(a, a, DistanceKind::Euclidean), 0.0);
  EXPECT_EQ(frame_distance(a, a, DistanceKind::Manhattan), 0.0);
}

TEST(FrameDistance, DimensionMismatch) {
  const std::vector<double> a{1, 2}, b{1};
  EXPECT_THROW(frame_distance(a, b, DistanceKind::Euclidean), Error);
}

TEST(DtwAlign, IdentityIsDiagonal) {
  std::uint64_t state = 3;
  const auto x = ftdtw::testing::random_sequence(state, 6, 3, -5, 5);
  const auto r = dtw_align(x, x);
  EXPECT_EQ(r.normalised, 0.0);
  EXPECT_EQ(r.path_length, 6u);
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(r.path[t], (PathCell{t, t}));
}

TEST(DtwAlign, TwoByOne) {
  const auto x = one_d({0, 0}), y = one_d({1});
  const auto oracle = oracle_align(x, y, DistanceKind::Euclidean);
  const auto r = dtw_align(x, y);
  EXPECT_EQ(oracle.cost, 2.0);
  EXPECT_EQ(r.cost, 2.0);
  EXPECT_EQ(r.path, cells({{1, 1}, {2, 1}}));
  EXPECT_EQ(r.path_length, 2u);
  EXPECT_EQ(r.normalised, 1.0);
}

TEST(DtwAlign, TwoByThree) {
  const auto x = one_d({0, 3}), y = one_d({0, 1, 3});
  const auto oracle = oracle_align(x, y, DistanceKind::Euclidean);
  const auto r = dtw_align(x, y);
  EXPECT_EQ(oracle.cost, 1.0);
  EXPECT_EQ(oracle.path, cells({{1, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(r.cost, 1.0);
  EXPECT_EQ(r.path, cells({{1, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(r.path_length, 3u);
  EXPECT_DOUBLE_EQ(r.normalised, 1.0 / 3.0);
  EXPECT_EQ(r.cumulative, (std::vector<double>{0, 1, 1}));
}

TEST(DtwSimilarity, SymmetricOnWorkedPair) {
  const auto x = one_d({0, 3}), y = one_d({0, 1, 3});
  EXPECT_DOUBLE_EQ(dtw_similarity(x, y), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(dtw_similarity(y, x), 1.0 / 3.0);
  EXPECT_EQ(dtw_similarity(one_d({0, 0}), one_d({1})), 1.0);
}

TEST(DtwAlign, SingleFrameAgainstMany) {
  const auto x = one_d({1}), y = one_d({0, 2, 5});
  const auto r = dtw_align(x, y);
  EXPECT_EQ(r.cost, 1 + 1 + 4);
  EXPECT_EQ(r.path_length, 3u);
}

TEST(DtwAlign, ErrorsOnBadInput) {
  EXPECT_THROW(dtw_align(one_d({}), one_d({1})), Error);
  const FeatureSequence two_d("t", {{1, 2}});
  try {
    dtw_align(one_d({1}), two_d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(DtwScore, MatchesFullAlignmentIncludingK) {
  std::uint64_t state = 100;
  PortableRng lens(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = 1 + lens.below(3);
    // Integer-valued inputs produce plenty of ties in the DP.
    auto x = ftdtw::testing::random_sequence(state, 1 + lens.below(9), m, -2, 2);
    auto y = ftdtw::testing::random_sequence(state, 1 + lens.below(9), m, -2, 2);
    if (trial % 2 == 0) {
      std::vector<Frame> fx = x.frames(), fy = y.frames();
      for (auto& f : fx) for (auto& v : f) v = std::round(v);
      for (auto& f : fy) for (auto& v : f) v = std::round(v);
      x = FeatureSequence("x", fx);
      y = FeatureSequence("y", fy);
    }
    for (auto kind : {DistanceKind::Euclidean, DistanceKind::Manhattan}) {
      const auto full = dtw_align(x, y, kind);
      const auto score = dtw_score(x, y, kind);
      ASSERT_EQ(full.cost, score.cost);
      ASSERT_EQ(full.path_length, score.path_length);
      ASSERT_TRUE(is_valid_path(full, x.length(), y.length()));
    }
  }
}

TEST(DtwAlign, OracleEquivalenceSweep) {
  std::uint64_t state = 900;
  PortableRng lens(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tx = 1 + lens.below(6), ty = 1 + lens.below(6);
    const auto x = ftdtw::testing::random_sequence(state, tx, 1, -5, 5);
    const auto y = ftdtw::testing::random_sequence(state, ty, 1, -5, 5);
    const auto oracle = oracle_align(x, y, DistanceKind::Euclidean);
    const auto r = dtw_align(x, y);
    ASSERT_NEAR(r.cost, oracle.cost, 1e-9);
    ASSERT_TRUE(is_valid_path(oracle, tx, ty));
  }
}

TEST(OracleAlign, SingleCell) {
  const FeatureSequence x("x", {{0, 0}}), y("y", {{3, 4}});
  const auto r = oracle_align(x, y, DistanceKind::Euclidean);
  EXPECT_EQ(r.path, cells({{1, 1}}));
  EXPECT_EQ(r.cost, 5.0);
}

TEST(OracleAlign, RejectsLargeInstances) {
  std::vector<double> v(8, 0.0);
  try {
    oracle_align(one_d(v), one_d({0, 0, 0, 0, 0, 0, 0}), DistanceKind::Euclidean);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InstanceTooLarge);
  }
}

TEST(Band, ConstrainsPath) {
  const auto x = one_d({0, 5, 0, 0}), y = one_d({0, 0, 5, 0});
  const auto free = dtw_align(x, y);
  const auto banded = dtw_align(x, y, DistanceKind::Euclidean, {.band = 0});
  EXPECT_EQ(free.cost, 0.0);
  EXPECT_EQ(banded.cost, 10.0);
  for (const auto& c : banded.path) EXPECT_EQ(c.p, c.q);
  EXPECT_EQ(dtw_score(x, y, DistanceKind::Euclidean, {.band = 0}).cost, 10.0);
  const auto one = dtw_align(x, y, DistanceKind::Euclidean, {.band = 1});
  for (const auto& c : one.path) EXPECT_LE(c.p > c.q ? c.p - c.q : c.q - c.p, 1u);
  EXPECT_EQ(one.cost, 0.0);
  EXPECT_EQ(one.cost, dtw_score(x, y, DistanceKind::Euclidean, {.band = 1}).cost);
}

TEST(Band, UnreachableEndErrors) {
  try {
    dtw_align(one_d({0, 1, 2, 3}), one_d({0}), DistanceKind::Euclidean, {.band = 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BandInfeasible);
  }
  EXPECT_THROW(ftdtw_similarity(one_d({0, 1, 2, 3}), one_d({0}), {.band = 1}), Error);
}

TEST(Band, WideBandEqualsUnconstrained) {
  std::uint64_t state = 5;
  for (int trial = 0; trial < 30; ++trial) {
    const auto x = ftdtw::testing::random_sequence(state, 7, 2, -1, 1);
    const auto y = ftdtw::testing::random_sequence(state, 4, 2, -1, 1);
    EXPECT_EQ(dtw_score(x, y).cost, dtw_score(x, y, DistanceKind::Euclidean, {.band = 7}).cost);
  }
}

TEST(Ftdtw, IdentityIsZero) {
  std::uint64_t state = 9;
  const auto x = ftdtw::testing::random_sequence(state, 5, 4, -5, 5);
  EXPECT_EQ(ftdtw_similarity(x, x), 0.0);
}

TEST(Ftdtw, OneDimensionMatchesClassical) {
  const auto x = one_d({0, 0}), y = one_d({1});
  EXPECT_EQ(ftdtw_similarity(x, y), 1.0);
  EXPECT_EQ(ftdtw_similarity(x, y), dtw_similarity(x, y, DistanceKind::Manhattan));
}

TEST(Ftdtw, TwoDimensionalWorkedExample) {
  const FeatureSequence x("x", {{0, 3}, {3, 0}});
  const FeatureSequence y("y", {{0, 0}, {1, 3}, {3, 0}});
  // Per-trajectory costs and lengths from the exhaustive oracle.
  const auto o1 = oracle_align(one_d({0, 3}), one_d({0, 1, 3}), DistanceKind::Euclidean);
  const auto o2 = oracle_align(one_d({3, 0}), one_d({0, 3, 0}), DistanceKind::Euclidean);
  EXPECT_EQ(o1.cost, 1.0);
  EXPECT_EQ(o1.path_length, 3u);
  EXPECT_EQ(o2.cost, 3.0);
  EXPECT_EQ(o2.path_length, 3u);
  const double expected = (o1.cost + o2.cost) /
                          std::sqrt(double(o1.path_length * o1.path_length + o2.path_length * o2.path_length));
  EXPECT_DOUBLE_EQ(expected, 4.0 / std::sqrt(18.0));

  const auto r = ftdtw_align(x, y);
  EXPECT_EQ(r.costs, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(r.path_lengths, (std::vector<std::size_t>{3, 3}));
  EXPECT_DOUBLE_EQ(r.value, expected);
  EXPECT_DOUBLE_EQ(ftdtw_similarity(y, x), expected);
}

TEST(Ftdtw, DecomposesIntoTrajectoryCosts) {
  std::uint64_t state = 4242;
  PortableRng lens(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = 1 + lens.below(5);
    const auto x = ftdtw::testing::random_sequence(state, 1 + lens.below(12), m, -5, 5);
    const auto y = ftdtw::testing::random_sequence(state, 1 + lens.below(12), m, -5, 5);
    const auto r = ftdtw_align(x, y);
    long double sum = 0;
    for (std::size_t l = 0; l < m; ++l) {
      sum += ftdtw::testing::reference_1d_cost(trajectory(x, l).values, trajectory(y, l).values);
    }
    ASSERT_NEAR(r.value * r.beta, static_cast<double>(sum), 1e-9);
  }
}

TEST(Properties, SymmetryIdentityNonNegativity) {
  std::uint64_t state = 77;
  PortableRng lens(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = 1 + lens.below(4);
    const auto x = ftdtw::testing::random_sequence(state, 1 + lens.below(15), m, -5, 5);
    const auto y = ftdtw::testing::random_sequence(state, 1 + lens.below(15), m, -5, 5);
    for (auto kind : {DistanceKind::Euclidean, DistanceKind::Manhattan}) {
      const double a = dtw_similarity(x, y, kind), b = dtw_similarity(y, x, kind);
      ASSERT_GE(a, 0.0);
      ASSERT_NEAR(a, b, 1e-12);
      ASSERT_EQ(dtw_similarity(x, x, kind), 0.0);
    }
    const double f = ftdtw_similarity(x, y), g = ftdtw_similarity(y, x);
    ASSERT_GE(f, 0.0);
    ASSERT_NEAR(f, g, 1e-12);
  }
}

TEST(PathDump, Format) {
  const auto r = dtw_align(one_d({0, 3}), one_d({0, 1, 3}));
  std::ostringstream os;
  write_path_dump(os, r);
  EXPECT_EQ(os.str(),
            "# K=3 cost=1 normalised=0.3333333333333333\n"
            "1\t1\t0\n"
            "1\t2\t1\n"
            "2\t3\t1\n");
}

TEST(DistanceKindNames, ParseAndPrint) {
  EXPECT_EQ(parse_distance_kind("manhattan"), DistanceKind::Manhattan);
  EXPECT_EQ(to_string(DistanceKind::Euclidean), "euclidean");
  EXPECT_THROW(parse_distance_kind("cosine"), Error);
}
