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


#pragma once

#include <span>

namespace qst {

struct MeanCi {
  double mean = 0.0;
  double std = 0.0;  ///< sample standard deviation
  double lo = 0.0;   ///< 95% Student-t interval
  double hi = 0.0;
};

MeanCi mean_ci95(std::span<const double> x);

struct PairedTTest {
  double mean_diff = 0.0;
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;  ///< two-sided
};

/// Paired two-sided Student t-test on a - b. Identical samples give p = 1.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Needs two distinct x values.
LinearFit ols(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// P(|T| > |t|) for Student t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);
/// Two-sided critical value: P(|T| > q) = alpha.
double student_t_critical(double alpha, double dof);

}  // namespace qst
