// Copyright 2026 The Migrant Authors
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

#ifndef MIGRANT_DISTRIBUTIONS_HPP
#define MIGRANT_DISTRIBUTIONS_HPP

#include <span>

namespace migrant::dist {

// Regularized incomplete beta I_x(a, b), evaluated with a modified Lentz
// continued fraction.
double incomplete_beta(double x, double a, double b);

double normal_cdf(double z);
double normal_pdf(double z);

// Two-tailed P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_tailed(double t, double df);

// Upper tail P(F' >= f) for the F distribution with (df1, df2).
double f_upper_tail(double f, double df1, double df2);

// CDF of the range of k independent standard normals.
double normal_range_cdf(double w, int k);

// CDF of the studentized range Q(k, df) at q. The outer integral over the
// scaled chi distribution and the inner integral over the normal range both
// use composite Gauss-Legendre quadrature. df <= 0 means infinite df.
double studentized_range_cdf(double q, int k, double df);

// Upper tail of the studentized range, the Tukey HSD p-value.
double studentized_range_upper(double q, int k, double df);

// Composite Gauss-Legendre on [lo, hi] split into equal panels.
template <typename F>
double integrate(F&& f, double lo, double hi, int panels);

namespace detail {
struct GaussLegendre16 {
  double nodes[16];
  double weights[16];
};
const GaussLegendre16& gauss_legendre16();
}  // namespace detail

template <typename F>
double integrate(F&& f, double lo, double hi, int panels) {
  const auto& gl = detail::gauss_legendre16();
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    const double half = width / 2.0;
    const double mid = a + half;
    double sum = 0.0;
    for (int i = 0; i < 16; ++i) sum += gl.weights[i] * f(mid + half * gl.nodes[i]);
    total += sum * half;
  }
  return total;
}

}  // namespace migrant::dist

#endif  // MIGRANT_DISTRIBUTIONS_HPP
