/*
 * Copyright 2026 The assim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "assim/checks.hpp"
#include "assim/errors.hpp"
#include "assim/path_io.hpp"
#include "assim/rng.hpp"
#include "assim/roughpath.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace {

using assim::SampledPath;
using assim::Tag;
using assim::TimeGrid;

SampledPath scalar_path(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) {
    m(0, i++) = x;
  }
  return {TimeGrid(1.0, static_cast<int>(v.size()) - 1), m};
}

SampledPath time_path(const TimeGrid &g) {
  return SampledPath::from_function(g, 1, [](double t) { return Eigen::VectorXd::Constant(1, t); });
}

// ---------------------------------------------------------------------------
// p-variation

TEST(PVariation, ConstantPathIsZero) {
  EXPECT_EQ(assim::p_variation(scalar_path({1, 1, 1, 1}), 2.0), 0.0);
}

TEST(PVariation, MonotoneOneVariationIsRange) {
  EXPECT_DOUBLE_EQ(assim::p_variation(scalar_path({0, 1, 2, 3}), 1.0), 3.0);
}

TEST(PVariation, ZigZagTwoVariation) {
  EXPECT_DOUBLE_EQ(assim::p_variation(scalar_path({0, 1, 0, 1}), 2.0), std::sqrt(3.0));
}

TEST(PVariation, RejectsPBelowOne) {
  EXPECT_THROW(assim::p_variation(scalar_path({0, 1}), 0.5), assim::InvalidParameter);
}

TEST(PVariation, RejectsGridAboveCap) {
  const SampledPath w = assim::sample_wiener(TimeGrid(1.0, 64), 1, 3);
  EXPECT_THROW(assim::p_variation(w, 2.0, 32), assim::InvalidParameter);
}

TEST(PVariation, MatchesRecursiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 4 + static_cast<int>(seed % 9); // 4..12 steps
    const int dim = seed % 2 == 0 ? 1 : 3;
    const SampledPath path = assim::sample_wiener(TimeGrid(1.0, n), dim, seed, 11);
    for (double p : {1.0, 1.5, 2.0, 2.7}) {
      const double brute = oracle::p_variation_brute(path.values(), p);
      EXPECT_NEAR(assim::p_variation(path, p), brute, 1e-13 * (1.0 + brute))
          << "seed " << seed << " p " << p;
    }
  }
}

TEST(PVariation, ExhaustiveHelperAgreesWithRecursion) {
  const SampledPath path = assim::random_walk(TimeGrid(2.0, 9), 2, 5, 0, 3.0);
  EXPECT_NEAR(assim::p_variation_exhaustive(path, 1.7),
              oracle::p_variation_brute(path.values(), 1.7), 1e-12);
  EXPECT_THROW(assim::p_variation_exhaustive(assim::random_walk(TimeGrid(1.0, 21), 1, 5, 0), 2.0),
               assim::InvalidParameter);
}

TEST(PVariation, PiecewiseLinearBoundedByTotalVariation) {
  const TimeGrid g(1.0, 40);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SampledPath y = assim::random_walk(g, 2, seed, 4);
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
      length += (y.at(i + 1) - y.at(i)).norm();
    }
    for (double p : {1.0, 1.3, 2.0, 3.5}) {
      EXPECT_LE(assim::p_variation(y, p), length * (1.0 + 1e-12));
    }
  }
}

TEST(PVariation, MatrixPathsUseFrobeniusNorm) {
  const TimeGrid g(1.0, 1);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 2);
  v.col(1) << 1.0, 2.0, 2.0, 4.0;
  const SampledPath m(g, v, 2, 2);
  EXPECT_DOUBLE_EQ(assim::p_variation(m, 2.0), 5.0);
}

// ---------------------------------------------------------------------------
// Young integral

TEST(YoungIntegral, ConstantIntegrandTelescopes) {
  const TimeGrid g(1.5, 37);
  const SampledPath y = assim::sample_wiener(g, 2, 8);
  Eigen::MatrixXd c(3, 2);
  c << 1, 2, -1, 0.5, 0, 3;
  const SampledPath x = SampledPath::constant(g, c.reshaped());
  const SampledPath xm(g, x.values(), 3, 2);
  const Eigen::VectorXd expect = c * (y.at(g.nodes() - 1) - y.at(0));
  for (Tag tag : {Tag::left, Tag::right, Tag::midpoint}) {
    EXPECT_LT((assim::young_integral(xm, y, tag) - expect).norm(), 1e-12);
  }
}

TEST(YoungIntegral, IdentityAgainstIdentity) {
  const TimeGrid g(1.0, 1024);
  const SampledPath t = time_path(g);
  EXPECT_NEAR(assim::young_integral(t, t, Tag::left)(0), 0.5, 1e-3);
  EXPECT_NEAR(assim::young_integral(t, t, Tag::midpoint)(0), 0.5, 1e-14);
}

TEST(YoungIntegral, RunningPathEndsAtTotal) {
  const TimeGrid g(1.0, 50);
  const SampledPath x = assim::sample_wiener(g, 1, 1, 0);
  const SampledPath y = assim::sample_wiener(g, 1, 1, 1);
  const SampledPath run = assim::young_integral_path(x, y);
  EXPECT_EQ(run.at(0)(0), 0.0);
  EXPECT_NEAR(run.at(g.nodes() - 1)(0), assim::young_integral(x, y)(0), 1e-14);
}

TEST(YoungIntegral, GridMismatchThrows) {
  const SampledPath a = SampledPath::zeros(TimeGrid(1.0, 10), 1);
  const SampledPath b = SampledPath::zeros(TimeGrid(1.0, 11), 1);
  EXPECT_THROW(assim::young_integral(a, b), assim::GridMismatch);
}

TEST(YoungIntegral, TagGapShrinksUnderRefinement) {
  const TimeGrid fine(1.0, 2048);
  const SampledPath w = assim::sample_wiener(fine, 1, 2024);
  const auto gap = [&](int n) {
    const TimeGrid g(1.0, n);
    Eigen::MatrixXd v(1, n + 1);
    for (int i = 0; i <= n; ++i) {
      v(0, i) = w.values()(0, i * (2048 / n));
    }
    const SampledPath y(g, v);
    const SampledPath x = SampledPath::from_function(
        g, 1, [](double t) { return Eigen::VectorXd::Constant(1, std::sin(t)); });
    return std::abs(assim::young_integral(x, y, Tag::left)(0) -
                    assim::young_integral(x, y, Tag::midpoint)(0));
  };
  EXPECT_LT(gap(1024), gap(512));
  EXPECT_LT(gap(2048), gap(1024));
}

TEST(YoungIntegral, IntegrationByParts) {
  const TimeGrid g(1.0, 300);
  const SampledPath x = assim::random_walk(g, 1, 3, 0);
  const SampledPath y = assim::random_walk(g, 1, 3, 1);
  const double boundary = x.at(g.nodes() - 1)(0) * y.at(g.nodes() - 1)(0) - x.at(0)(0) * y.at(0)(0);
  // Midpoint sums telescope exactly; left sums miss sum dx dy.
  EXPECT_NEAR(assim::young_integral(x, y, Tag::midpoint)(0) +
                  assim::young_integral(y, x, Tag::midpoint)(0),
              boundary, 1e-12);
  double cross = 0.0;
  for (std::size_t i = 0; i + 1 < g.nodes(); ++i) {
    cross += (x.at(i + 1)(0) - x.at(i)(0)) * (y.at(i + 1)(0) - y.at(i)(0));
  }
  EXPECT_NEAR(assim::young_integral(x, y)(0) + assim::young_integral(y, x)(0) + cross, boundary,
              1e-12);
}

// ---------------------------------------------------------------------------
// Young-Loeve bound

TEST(YoungBound, ConstantIntegrandHasZeroLhs) {
  const TimeGrid g(1.0, 20);
  const auto b = assim::young_bound_check(SampledPath::constant(g, Eigen::VectorXd::Constant(1, 2.0)),
                                          assim::sample_wiener(g, 1, 4), 1.5, 1.5);
  EXPECT_EQ(b.lhs, 0.0);
  EXPECT_TRUE(b.holds());
}

TEST(YoungBound, HandEvaluatedIdentityCase) {
  const TimeGrid g(1.0, 1);
  const SampledPath t = time_path(g);
  const auto b = assim::young_bound_check(t, t, 1.0, 1.0);
  // Left sum on one interval: x(0) dy = 0, so lhs = |0 - 0|.
  EXPECT_DOUBLE_EQ(b.lhs, 0.0);
  EXPECT_DOUBLE_EQ(b.rhs, 2.0);
  const TimeGrid fine(1.0, 4096);
  const auto bf = assim::young_bound_check(time_path(fine), time_path(fine), 1.0, 1.0);
  EXPECT_NEAR(bf.lhs, 0.5, 1e-3);
  EXPECT_DOUBLE_EQ(bf.rhs, 2.0);
}

TEST(YoungBound, RandomPiecewiseLinearPairs) {
  const TimeGrid g(1.0, 60);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SampledPath x = assim::random_walk(g, 1, seed, 20);
    const SampledPath y = assim::random_walk(g, 1, seed, 21);
    const auto b = assim::young_bound_check(x, y, 1.5, 1.5);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < g.nodes(); ++i) {
      sum += x.at(i)(0) * (y.at(i + 1)(0) - y.at(i)(0));
    }
    const double lhs = std::abs(sum - x.at(0)(0) * (y.at(g.nodes() - 1)(0) - y.at(0)(0)));
    const double theta = 2.0 / 1.5;
    const double rhs = assim::p_variation(x, 1.5) * assim::p_variation(y, 1.5) /
                       (1.0 - std::pow(2.0, 1.0 - theta));
    EXPECT_NEAR(b.lhs, lhs, 1e-12);
    EXPECT_NEAR(b.rhs, rhs, 1e-12 * rhs);
    EXPECT_LE(b.lhs, b.rhs);
  }
}

TEST(YoungBound, RejectsThetaAtMostOne) {
  const SampledPath t = time_path(TimeGrid(1.0, 4));
  EXPECT_THROW(assim::young_bound_check(t, t, 2.0, 2.0), assim::InvalidParameter);
}

// ---------------------------------------------------------------------------
// Wiener sampling and observations

TEST(Wiener, StartsAtOriginAndIsDeterministic) {
  const TimeGrid g(2.0, 100);
  const SampledPath a = assim::sample_wiener(g, 3, 77);
  const SampledPath b = assim::sample_wiener(g, 3, 77);
  EXPECT_TRUE(a.at(0).isZero(0.0));
  EXPECT_EQ(a.values(), b.values());
  EXPECT_NE(a.values(), assim::sample_wiener(g, 3, 78).values());
}

TEST(Wiener, TerminalVarianceNearHorizon) {
  const TimeGrid g(1.0, 8);
  double sum = 0.0, sum2 = 0.0;
  const int reps = 10000;
  for (int k = 0; k < reps; ++k) {
    const double w = assim::sample_wiener(g, 1, 5, static_cast<std::uint64_t>(k)).at(8)(0);
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / reps;
  const double var = (sum2 - reps * mean * mean) / (reps - 1);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Wiener, RoughnessDichotomyOnOneSeed) {
  const SampledPath w = assim::sample_wiener(TimeGrid(1.0, 4096), 1, 9);
  Eigen::MatrixXd cv(1, 257);
  for (int i = 0; i <= 256; ++i) {
    cv(0, i) = w.values()(0, 16 * i);
  }
  const SampledPath coarse(TimeGrid(1.0, 256), cv);
  const double stable = assim::p_variation(w, 2.5) / assim::p_variation(coarse, 2.5);
  EXPECT_GE(stable, 0.8);
  EXPECT_LE(stable, 1.25);
  EXPECT_GT(assim::p_variation(w, 1.5) / assim::p_variation(coarse, 1.5), 1.3);
}

TEST(Observation, ZeroNoiseReturnsZeta) {
  const TimeGrid g(1.0, 30);
  const SampledPath zeta = assim::random_walk(g, 2, 1, 0);
  EXPECT_EQ(assim::build_observation(zeta, 0.0, 4).path.values(), zeta.values());
}

TEST(Observation, PureNoiseIsWiener) {
  const TimeGrid g(1.0, 30);
  const auto eta = assim::build_observation(SampledPath::zeros(g, 2), 1.0, 4);
  EXPECT_EQ(eta.path.values(), assim::sample_wiener(g, 2, 4).values());
}

TEST(Observation, LinearInNoiseScale) {
  const TimeGrid g(1.0, 30);
  const SampledPath zeta = assim::random_walk(g, 1, 2, 0);
  const auto e1 = assim::build_observation(zeta, 1.0, 6);
  const auto e2 = assim::build_observation(zeta, 2.0, 6);
  EXPECT_LT(((e2.path.values() - zeta.values()) - 2.0 * (e1.path.values() - zeta.values()))
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
}

TEST(Observation, NegativeScaleThrows) {
  EXPECT_THROW(assim::build_observation(SampledPath::zeros(TimeGrid(1.0, 3), 1), -0.1, 0),
               assim::InvalidParameter);
}

// ---------------------------------------------------------------------------
// Counter RNG

TEST(CounterRng, SplitStreamsAreDistinctAndStable) {
  const assim::CounterRng r(42);
  EXPECT_EQ(r.word(7), assim::CounterRng(42).word(7));
  EXPECT_NE(r.split(1).word(0), r.split(2).word(0));
  for (std::uint64_t c = 0; c < 1000; ++c) {
    const double u = r.uniform(c);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

// ---------------------------------------------------------------------------
// CSV files

TEST(PathCsv, RoundTripIsBitExact) {
  const SampledPath w = assim::sample_wiener(TimeGrid(0.7, 33), 2, 12);
  std::stringstream ss;
  assim::write_path_csv(ss, w);
  const SampledPath back = assim::read_path_csv(ss);
  EXPECT_EQ(back.grid(), w.grid());
  EXPECT_EQ(back.values(), w.values());
}

TEST(PathCsv, RejectsNonUniformSpacing) {
  std::stringstream ss("t,v0\n0,1\n0.5,2\n0.7,3\n");
  EXPECT_THROW(assim::read_path_csv(ss), assim::InvalidParameter);
}

TEST(PathCsv, RejectsBadHeader) {
  std::stringstream ss("time,v0\n0,1\n1,2\n");
  EXPECT_THROW(assim::read_path_csv(ss), assim::InvalidParameter);
}

} // namespace
