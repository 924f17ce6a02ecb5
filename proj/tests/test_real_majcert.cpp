// Copyright 2026 The majcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "majcert/real_majcert.hpp"
#include "test_util.hpp"

namespace majcert {
namespace {

using testing::random_pconcept;

/// Worst error recomputed slot by slot without any caching.
double naive_worst_error(const PConceptClass& s, const RealDecomposition& d) {
  const std::size_t domain = s.domain().size();
  double worst = 0.0;
  for (Input z = 0; z < domain; ++z) {
    double hi = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < d.m; ++i) {
      double h = -1.0, l = 2.0;
      for (const auto& g : s) {
        bool close = true;
        for (Input x : d.points[i]) close = close && std::fabs(g(x) - d.funcs[i](x)) <= d.alpha;
        if (!close) continue;
        h = std::max(h, g(z));
        l = std::min(l, g(z));
      }
      if (h < 0.0) return INFINITY;
      hi += h;
      lo += l;
    }
    hi /= static_cast<double>(d.m);
    lo /= static_cast<double>(d.m);
    worst = std::max({worst, std::fabs(d.target(z) - hi), std::fabs(d.target(z) - lo)});
  }
  return worst;
}

class RealDecompositionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Rng rng(80);
    cls_ = new PConceptClass(random_pconcept(3, 40, rng));
    dec_ = new RealDecomposition(real_majority_certificates(*cls_, (*cls_)[0], 0.25, 11));
  }
  static void TearDownTestSuite() {
    delete dec_;
    delete cls_;
  }
  static PConceptClass* cls_;
  static RealDecomposition* dec_;
};

PConceptClass* RealDecompositionTest::cls_ = nullptr;
RealDecomposition* RealDecompositionTest::dec_ = nullptr;

TEST_F(RealDecompositionTest, Verifies) {
  const auto& d = *dec_;
  EXPECT_TRUE(verify_real_decomposition(*cls_, d));
  EXPECT_LE(naive_worst_error(*cls_, d), 0.25);
  EXPECT_NEAR(real_decomposition_worst_error(*cls_, d), naive_worst_error(*cls_, d), 1e-15);
}

TEST_F(RealDecompositionTest, ParametersFollowTheirRules) {
  const auto& d = *dec_;
  EXPECT_DOUBLE_EQ(d.beta, 0.25 / 48.0);
  EXPECT_GE(d.t, 1.0);
  EXPECT_DOUBLE_EQ(d.alpha, 0.4 * d.beta / d.t);
  EXPECT_EQ(d.m, 960u);  // ceil(20 * 3 / 0.25^2)
  EXPECT_EQ(d.funcs.size(), d.m);
  EXPECT_EQ(d.points.size(), d.m);
  EXPECT_LE(d.game_penalty, 0.125 + 1e-12);
  for (std::size_t i = 0; i < d.m; ++i) EXPECT_EQ((*cls_)[d.indices[i]], d.funcs[i]);
}

TEST_F(RealDecompositionTest, InflatedToleranceStaysBelowEpsWhenEverythingIsPinned) {
  // every slot pins the whole domain, so any admissible g is within 100 alpha < eps of f*
  auto d = *dec_;
  for (const auto& x : d.points) ASSERT_EQ(x.size(), 8u);
  d.alpha *= 100.0;
  EXPECT_LE(real_decomposition_worst_error(*cls_, d), d.alpha + 1e-12);
  EXPECT_LT(d.alpha, d.eps);
}

/// Five slots over random members with small random pin sets.
RealDecomposition partial_decomposition(const PConceptClass& s, double alpha, Rng& rng) {
  RealDecomposition d;
  d.target = s[0];
  d.m = 5;
  d.alpha = alpha;
  d.eps = 1.0;
  for (std::size_t i = 0; i < d.m; ++i) {
    const std::size_t j = rng.below(s.size());
    d.funcs.push_back(s[j]);
    d.indices.push_back(j);
    InputSet x;
    for (Input z = 0; z < s.domain().size(); ++z)
      if (rng.below(3) == 0) x.push_back(z);
    d.points.push_back(x);
  }
  return d;
}

TEST(RealDecomposition, InflatedToleranceAdmitsAnExplicitViolation) {
  Rng rng(89);
  const auto s = random_pconcept(3, 40, rng);
  RealDecomposition d;
  d.target = s[0];
  d.funcs = {s[0]};
  d.indices = {0};
  d.points = {InputSet{0, 1}};
  d.m = 1;
  double gap = 1.0;
  for (std::size_t j = 1; j < s.size(); ++j) gap = std::min(gap, testing::naive_sup(s[j], s[0], d.points[0]));
  d.alpha = gap / 2.0;
  d.eps = 0.1;
  EXPECT_TRUE(verify_real_decomposition(s, d));
  d.alpha *= 100.0;
  // some admissible g is more than eps from f* somewhere
  bool violation = false;
  for (const auto& g : s)
    if (testing::naive_sup(g, s[0], d.points[0]) <= d.alpha && testing::naive_sup(g, s[0]) > d.eps) violation = true;
  ASSERT_TRUE(violation);
  EXPECT_FALSE(verify_real_decomposition(s, d));
}

TEST(RealDecomposition, RandomAdmissibleTuplesNeverBeatTheExtremes) {
  Rng rng(90);
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = random_pconcept(3, 30, rng);
    const auto d = partial_decomposition(s, 0.3, rng);
    const double worst = real_decomposition_worst_error(s, d);
    EXPECT_NEAR(worst, naive_worst_error(s, d), 1e-15);
    std::vector<std::vector<std::size_t>> admissible(d.m);
    for (std::size_t i = 0; i < d.m; ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (testing::naive_sup(s[j], d.funcs[i], d.points[i]) <= d.alpha) admissible[i].push_back(j);
    const auto e = real_decomposition_extremes(s, d);
    for (int draw = 0; draw < 2000; ++draw) {
      std::vector<double> avg(8, 0.0);
      for (std::size_t i = 0; i < d.m; ++i) {
        const auto& g = s[admissible[i][rng.below(admissible[i].size())]];
        for (Input z = 0; z < 8; ++z) avg[z] += g(z) / static_cast<double>(d.m);
      }
      for (Input z = 0; z < 8; ++z) {
        EXPECT_LE(avg[z], e.hi[z] + 1e-12);
        EXPECT_GE(avg[z], e.lo[z] - 1e-12);
        EXPECT_LE(std::fabs(avg[z] - d.target(z)), worst + 1e-12);
      }
    }
  }
}

TEST(RealDecomposition, SingletonClass) {
  Rng rng(82);
  const auto s = random_pconcept(3, 1, rng);
  const auto d = real_majority_certificates(s, s[0], 0.25, 1);
  EXPECT_EQ(d.m, 1u);
  EXPECT_TRUE(d.points[0].empty());
  EXPECT_TRUE(verify_real_decomposition(s, d));
  EXPECT_EQ(real_decomposition_worst_error(s, d), 0.0);
}

TEST(RealDecomposition, PinningEverythingIsExact) {
  Rng rng(83);
  const auto s = random_pconcept(2, 10, rng);
  RealDecomposition d;
  d.target = s[0];
  d.funcs = {s[0]};
  d.points = {testing::all_inputs(2)};
  d.indices = {0};
  d.m = 1;
  d.alpha = 1e-9;
  d.eps = 1e-9;
  EXPECT_TRUE(verify_real_decomposition(s, d));
  d.points = {InputSet{}};
  EXPECT_FALSE(verify_real_decomposition(s, d));
}

TEST(RealDecomposition, EmptySlotIsInfinite) {
  const InputDomain dom(1);
  const PConceptClass s({RealFunction(dom, {0.0, 0.0}), RealFunction(dom, {1.0, 1.0})});
  RealDecomposition d;
  d.target = s[0];
  d.funcs = {RealFunction(dom, {0.5, 0.5})};  // not a member; nothing is near it
  d.points = {InputSet{0}};
  d.m = 1;
  d.alpha = 0.1;
  d.eps = 1.0;
  EXPECT_TRUE(std::isinf(real_decomposition_worst_error(s, d)));
  EXPECT_FALSE(verify_real_decomposition(s, d));
}

TEST(RealDecomposition, RejectsBadArguments) {
  Rng rng(84);
  const auto s = random_pconcept(2, 4, rng);
  EXPECT_THROW(real_majority_certificates(s, s[0], 0.0, 1), RejectedInput);
  EXPECT_THROW(real_majority_certificates(s, s[0], 1.0, 1), RejectedInput);
  EXPECT_THROW(real_majority_certificates(s, random_pconcept(2, 1, rng)[0], 0.25, 1), RejectedInput);
}

TEST(RealDecomposition, SeveralSeedsVerify) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng(seed + 100);
    const auto s = random_pconcept(2, 20, rng);
    const auto d = real_majority_certificates(s, s[seed % s.size()], 0.3, seed);
    EXPECT_LE(naive_worst_error(s, d), 0.3);
  }
}

// ---------------------------------------------------------------------------
// Sample sizes

TEST(Occam, EmptySampleHoldsIffEveryMemberIsClose) {
  const InputDomain dom(2);
  const auto u = Distribution::uniform(dom);
  const PConceptClass near({RealFunction::constant(dom, 0.5), RealFunction::constant(dom, 0.6)});
  EXPECT_EQ(occam_check(near, near[0], u, 0.01, 0, 20, 1).pass_rate(), 1.0);
  const PConceptClass far({RealFunction::constant(dom, 0.0), RealFunction::constant(dom, 1.0)});
  EXPECT_EQ(occam_check(far, far[0], u, 0.01, 0, 20, 1).pass_rate(), 0.0);
}

TEST(Occam, PointMassNeedsOneDraw) {
  Rng rng(85);
  const auto s = random_pconcept(3, 20, rng);
  const auto d = Distribution::point_mass(s.domain(), 5);
  EXPECT_EQ(occam_check(s, s[0], d, 0.01, 1, 50, 2).pass_rate(), 1.0);
}

TEST(Occam, ImplicationMatchesDefinition) {
  Rng rng(86);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = random_pconcept(3, 10, rng);
    const auto dist = Distribution::uniform(s.domain());
    InputSet x;
    for (Input z = 0; z < 8; ++z)
      if (rng.coin()) x.push_back(z);
    const double eps = 0.02 + 0.1 * rng.uniform();
    bool expect = true;
    for (const auto& h : s) {
      double mean = 0.0;
      for (Input z = 0; z < 8; ++z) mean += std::fabs(h(z) - s[0](z)) / 8.0;
      if (testing::naive_sup(h, s[0], x) <= eps && mean > 11.0 * eps) expect = false;
    }
    EXPECT_EQ(occam_implication(s, s[0], dist, x, eps), expect);
  }
}

TEST(Occam, InitialSize) {
  EXPECT_EQ(occam_initial_size(0, 0.5), 8u);
  EXPECT_EQ(occam_initial_size(2, 0.25), 4u * 2u * 4u + 8u);
  EXPECT_EQ(occam_initial_size(1, 0.1), 4u * 12u + 8u);  // log2(10)^2 = 11.03
}

TEST(Occam, ScheduleEndsWithTheProperty) {
  Rng rng(87);
  const auto s = random_pconcept(3, 20, rng);
  const auto d = Distribution::uniform(s.domain());
  const auto sched = occam_schedule(s, s[0], d, 0.01, 4, rng);
  EXPECT_TRUE(occam_implication(s, s[0], d, sched.y, 0.01));
  EXPECT_GE(sched.draws, 4u);
  EXPECT_GE(sched.tries, 1u);
}

TEST(Occam, SampleInputsAreSortedAndInDomain) {
  Rng rng(88);
  const auto d = Distribution::uniform(InputDomain(4));
  const auto xs = sample_inputs(d, 40, rng);
  EXPECT_TRUE(std::is_sorted(xs.begin(), xs.end()));
  EXPECT_TRUE(std::adjacent_find(xs.begin(), xs.end()) == xs.end());
  for (Input x : xs) EXPECT_LT(x, 16u);
  EXPECT_TRUE(sample_inputs(d, 0, rng).empty());
}

}  // namespace
}  // namespace majcert
