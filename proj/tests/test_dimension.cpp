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
#include <set>

#include "majcert/dimension.hpp"
#include "test_util.hpp"

namespace majcert {
namespace {

ConceptClass all_functions(int n) {
  const InputDomain d(n);
  std::vector<BooleanFunction> fs;
  for (std::uint64_t t = 0; t < (std::uint64_t{1} << d.size()); ++t)
    fs.push_back(BooleanFunction::from_predicate(d, [t](Input x) { return (t >> x) & 1U; }));
  return ConceptClass(fs);
}

/// VC dimension by checking every subset and every labeling.
int brute_vc(const ConceptClass& s) {
  const std::size_t domain = s.domain().size();
  int best = 0;
  for (std::uint32_t mask = 1; mask < (1U << domain); ++mask) {
    std::set<std::uint32_t> patterns;
    for (const auto& f : s) {
      std::uint32_t p = 0;
      for (Input x = 0; x < domain; ++x)
        if ((mask >> x) & 1U) p = (p << 1) | (f(x) ? 1U : 0U);
      patterns.insert(p);
    }
    const int k = std::popcount(mask);
    if (patterns.size() == (std::size_t{1} << k)) best = std::max(best, k);
  }
  return best;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

TEST(VcDim, SingletonIsZero) {
  const auto s = testing::point_class(3, {});
  EXPECT_EQ(vc_dim(s).value, 0);
  EXPECT_EQ(fat_shattering_dim(as_pconcept(s), 0.1).value, 0);
}

TEST(VcDim, TwoConstantsShatterOnePoint) {
  const InputDomain d(3);
  const ConceptClass s({BooleanFunction::constant(d, false), BooleanFunction::constant(d, true)});
  EXPECT_EQ(vc_dim(s).value, 1);
}

TEST(VcDim, AllFunctionsOnTwoBits) {
  const auto r = vc_dim(all_functions(2));
  EXPECT_EQ(r.value, 4);
  EXPECT_TRUE(r.exact());
}

TEST(VcDim, PointFunctions) {
  EXPECT_EQ(vc_dim(testing::full_point_class(4)).value, 1);
}

TEST(VcDim, CapStopsTheSearch) {
  const auto r = vc_dim(all_functions(3), 2);
  EXPECT_EQ(r.value, 2);
  EXPECT_TRUE(r.at_least_cap);
}

TEST(VcDim, MatchesBruteForceAndSauer) {
  Rng rng(60);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(2));
    const auto s = testing::random_class(n, 1 + rng.below(24), rng);
    const int d = vc_dim(s).value;
    ASSERT_EQ(d, brute_vc(s));
    double sauer = 0.0;
    for (int i = 0; i <= d; ++i) sauer += binomial(static_cast<int>(s.domain().size()), i);
    EXPECT_LE(static_cast<double>(s.size()), sauer);
  }
}

TEST(FatShattering, EqualsVcOnBooleanClasses) {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = testing::random_class(3, 2 + rng.below(20), rng);
    const int vc = vc_dim(s).value;
    const auto p = as_pconcept(s);
    for (double g : {0.05, 0.25, 0.5}) EXPECT_EQ(fat_shattering_dim(p, g).value, vc) << "gamma " << g;
    EXPECT_EQ(fat_shattering_dim(p, 0.51).value, 0);
  }
}

TEST(FatShattering, ConstantsShatterOnePoint) {
  std::vector<RealFunction> fs;
  for (int i = 0; i <= 10; ++i) fs.push_back(RealFunction::constant(InputDomain(3), i / 10.0));
  const PConceptClass s(fs);
  EXPECT_EQ(fat_shattering_dim(s, 0.1).value, 1);
  EXPECT_EQ(fat_shattering_dim(s, 0.5).value, 1);
  EXPECT_EQ(fat_shattering_dim(s, 0.6).value, 0);
}

TEST(FatShattering, MatchesBruteForceOnGridClasses) {
  Rng rng(62);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<RealFunction> fs;
    const std::size_t m = 2 + rng.below(9);
    for (std::size_t i = 0; i < m; ++i)
      fs.push_back(RealFunction::from_fn(InputDomain(2), [&](Input) { return static_cast<double>(rng.below(9)) / 8.0; }));
    const PConceptClass s(fs);
    for (double g : {0.125, 0.25, 0.375}) ASSERT_EQ(fat_shattering_dim(s, g).value, testing::brute_fat(s, g)) << "gamma " << g;
  }
}

TEST(FatShattering, IsAntitoneInGamma) {
  Rng rng(63);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = testing::random_pconcept(3, 30, rng);
    int prev = 1 << 20;
    for (double g : {0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
      const int v = fat_shattering_dim(s, g).value;
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(FatShattering, RejectsBadArguments) {
  const auto s = as_pconcept(testing::full_point_class(2));
  EXPECT_THROW(fat_shattering_dim(s, 0.0), RejectedInput);
  EXPECT_THROW(fat_shattering_dim(s, 0.1, 0), RejectedInput);
}

}  // namespace
}  // namespace majcert
