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

#include "migrant/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace migrant::dist {
namespace detail {

const GaussLegendre16& gauss_legendre16() {
  static const GaussLegendre16 table = [] {
    GaussLegendre16 t{};
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      // Newton iteration on P_n from the Chebyshev-like initial guess.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      t.nodes[i] = x;
      t.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return t;
  }();
  return table;
}

}  // namespace detail

namespace {

double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double student_t_two_tailed(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(x, df / 2.0, 0.5), 0.0, 1.0);
}

double f_upper_tail(double f, double df1, double df2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = df2 / (df2 + df1 * f);
  return std::clamp(incomplete_beta(x, df2 / 2.0, df1 / 2.0), 0.0, 1.0);
}

double normal_range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  // k * integral phi(z) [Phi(z) - Phi(z - w)]^(k-1) dz; phi vanishes past 9.
  constexpr double kReach = 9.0;
  const int panels = std::max(24, static_cast<int>(std::ceil(2.0 * kReach)));
  const double inner = integrate(
      [&](double z) {
        const double band = normal_cdf(z) - normal_cdf(z - w);
        return normal_pdf(z) * std::pow(std::max(band, 0.0), k - 1);
      },
      -kReach, kReach, panels);
  return std::clamp(k * inner, 0.0, 1.0);
}

double studentized_range_cdf(double q, int k, double df) {
  if (q <= 0.0) return 0.0;
  if (df <= 0.0 || df > 25000.0) return normal_range_cdf(q, k);

  // S = sqrt(chi2_df / df) has density
  //   2 (df/2)^(df/2) / Gamma(df/2) * s^(df-1) * exp(-df s^2 / 2).
  const double log_norm = std::log(2.0) + (df / 2.0) * std::log(df / 2.0) -
                          std::lgamma(df / 2.0);
  const double spread = 9.0 / std::sqrt(df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 4.0 ? 4.0 : 0.0);
  const double outer = integrate(
      [&](double s) {
        if (s <= 0.0) return 0.0;
        const double log_density =
            log_norm + (df - 1.0) * std::log(s) - df * s * s / 2.0;
        return std::exp(log_density) * normal_range_cdf(q * s, k);
      },
      lo, hi, 40);
  return std::clamp(outer, 0.0, 1.0);
}

double studentized_range_upper(double q, int k, double df) {
  return std::clamp(1.0 - studentized_range_cdf(q, k, df), 0.0, 1.0);
}

}  // namespace migrant::dist
