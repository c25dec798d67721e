// Copyright 2026 The qstpinn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "qstpinn/errors.hpp"
#include "qstpinn/stats.hpp"

namespace qst {
namespace {

// Reference values below come from scipy.stats (ttest_rel, t.ppf, t.sf, linregress).

const std::vector<double> kA = {0.91, 0.88, 0.95, 0.90, 0.93};
const std::vector<double> kB = {0.89, 0.87, 0.92, 0.91, 0.90};

TEST(StudentT, CriticalValues) {
  EXPECT_NEAR(student_t_critical(0.05, 10), 2.2281388519649385, 1e-9);
  EXPECT_NEAR(student_t_critical(0.05, 2), 4.302652729696142, 1e-9);
  EXPECT_NEAR(student_t_two_sided_p(1.5, 7), 0.17729848698997003, 1e-10);
  EXPECT_NEAR(student_t_two_sided_p(0.0, 5), 1.0, 1e-14);
  EXPECT_NEAR(student_t_two_sided_p(2.2281388519649385, 10), 0.05, 1e-10);
}

TEST(IncompleteBeta, IntegerParametersMatchBinomialSum) {
  // I_x(a, b) = P(Binomial(a + b - 1, x) >= a) for integer a, b.
  for (int a = 1; a <= 4; ++a) {
    for (int b = 1; b <= 4; ++b) {
      for (double x : {0.1, 0.4, 0.75}) {
        const int n = a + b - 1;
        double want = 0.0;
        for (int j = a; j <= n; ++j) {
          want += std::tgamma(n + 1) / (std::tgamma(j + 1) * std::tgamma(n - j + 1)) * std::pow(x, j) *
                  std::pow(1.0 - x, n - j);
        }
        EXPECT_NEAR(incomplete_beta(a, b, x), want, 1e-12) << a << " " << b << " " << x;
      }
    }
  }
  EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
  EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
}

TEST(PairedTTest, MatchesReference) {
  const auto r = paired_t_test(kA, kB);
  EXPECT_NEAR(r.t, 2.138089935299395, 1e-10);
  EXPECT_NEAR(r.p_value, 0.09930068321372677, 1e-10);
  EXPECT_EQ(r.dof, 4.0);
  EXPECT_NEAR(r.mean_diff, 0.016, 1e-15);
  const auto same = paired_t_test(kA, kA);
  EXPECT_EQ(same.p_value, 1.0);
  EXPECT_EQ(same.mean_diff, 0.0);
  EXPECT_THROW(paired_t_test(kA, std::vector<double>{1.0}), ShapeError);
  EXPECT_THROW(paired_t_test(std::vector<double>{1.0}, std::vector<double>{1.0}), DomainError);
}

TEST(MeanCi, MatchesReference) {
  std::vector<double> d;
  for (std::size_t i = 0; i < kA.size(); ++i) d.push_back(kA[i] - kB[i]);
  const auto ci = mean_ci95(d);
  EXPECT_NEAR(ci.lo, -0.004777012673671387, 1e-10);
  EXPECT_NEAR(ci.hi, 0.03677701267367137, 1e-10);
  const std::vector<double> one = {0.3};
  const auto single = mean_ci95(one);
  EXPECT_EQ(single.lo, 0.3);
  EXPECT_EQ(single.hi, 0.3);
}

TEST(Ols, MatchesReference) {
  const std::vector<double> x = {0.02, 0.05, 0.1, 0.15, 0.19};
  const std::vector<double> y = {0.99, 0.985, 0.98, 0.97, 0.968};
  const auto fit = ols(x, y);
  EXPECT_NEAR(fit.slope, -0.1342915811088297, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.9922977412731006, 1e-12);
  EXPECT_NEAR(fit.slope_se, 0.011621765422765357, 1e-12);
  const std::vector<double> flat = {0.1, 0.1, 0.1};
  EXPECT_THROW(ols(flat, flat), DomainError);
}

}  // namespace
}  // namespace qst
