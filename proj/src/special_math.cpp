// Copyright 2026 The eiei Authors. All Rights Reserved.
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

#include "eiei/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eiei {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Gauss-Legendre nodes/weights on [-1,1], half tables (symmetric pairs are
// expanded in the quadrature loop). Orders 6 / 12 / 20 as published for the
// bivariate normal scheme.
constexpr double kGlX6[3] = {-0.9324695142031522, -0.6612093864662645, -0.2386191860831969};
constexpr double kGlW6[3] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910};
constexpr double kGlX12[6] = {-0.9815606342467192, -0.9041172563704749, -0.7699026741943047,
                              -0.5873179542866175, -0.3678314989981802, -0.1252334085114689};
constexpr double kGlW12[6] = {0.04717533638651183, 0.1069393259953184, 0.1600783285433462,
                              0.2031674267230659,  0.2334925365383548, 0.2491470458134028};
constexpr double kGlX20[10] = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                               -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                               -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
                               -0.07652652113349733};
constexpr double kGlW20[10] = {0.01761400713915212, 0.04060142980038694, 0.06267204833410906,
                               0.08327674157670475, 0.1019301198172404,  0.1181945319615184,
                               0.1316886384491766,  0.1420961093183820,  0.1491729864726037,
                               0.1527533871307258};

// P(X <= min(h,k)) / the perfectly anti-correlated limit.
double bvn_corr_one(double h, double k) { return std_normal_cdf(std::min(h, k)); }
double bvn_corr_minus_one(double h, double k) {
  return std::max(0.0, std_normal_cdf(h) + std_normal_cdf(k) - 1.0);
}

// Genz's BVND: P(X > dh, Y > dk) for standard bivariate normal, |r| < 1.
double bvn_upper(double dh, double dk, double r) {
  const double* x;
  const double* w;
  int lg;
  const double ar = std::fabs(r);
  if (ar < 0.3) {
    x = kGlX6, w = kGlW6, lg = 3;
  } else if (ar < 0.75) {
    x = kGlX12, w = kGlW12, lg = 6;
  } else {
    x = kGlX20, w = kGlW20, lg = 10;
  }

  double h = dh;
  double k = dk;
  double hk = h * k;
  double bvn = 0.0;

  if (ar < 0.925) {
    if (ar > 0.0) {
      const double hs = (h * h + k * k) / 2.0;
      const double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double sn = std::sin(asr * (is * x[i] + 1.0) / 2.0);
          bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn = bvn * asr / (2.0 * kTwoPi);
    }
    return bvn + std_normal_cdf(-h) * std_normal_cdf(-k);
  }

  // High-correlation branch: integrate the complement and expand the
  // near-singular part analytically.
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  const double as0 = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as0);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 16.0;
  double asr = -(bs / as0 + hk) / 2.0;
  if (asr > -100.0) {
    bvn = a * std::exp(asr) * (1.0 - c * (bs - as0) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as0 * as0 / 5.0);
  }
  if (-hk < 100.0) {
    const double b = std::sqrt(bs);
    bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * std_normal_cdf(-b / a) * b *
           (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  a /= 2.0;
  for (int i = 0; i < lg; ++i) {
    for (int is = -1; is <= 1; is += 2) {
      const double xs = a * (is * x[i] + 1.0) * a * (is * x[i] + 1.0);
      const double rs = std::sqrt(1.0 - xs);
      asr = -(bs / xs + hk) / 2.0;
      if (asr > -100.0) {
        bvn += a * w[i] * std::exp(asr) *
               (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
      }
    }
  }
  bvn = -bvn / kTwoPi;
  if (r > 0.0) {
    return bvn + std_normal_cdf(-std::max(h, k));
  }
  bvn = -bvn;
  if (k > h) {
    bvn += std_normal_cdf(k) - std_normal_cdf(h);
  }
  return bvn;
}

}  // namespace

Correlation::Correlation(double rho) : rho_(rho) {
  if (!(std::fabs(rho) <= 1.0)) {  // also rejects NaN
    throw std::invalid_argument("Correlation: |rho| must be <= 1");
  }
}

MaternSmoothness::MaternSmoothness(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw std::invalid_argument("MaternSmoothness: nu must be positive and finite");
  }
}

bool MaternSmoothness::is_half_integer() const {
  const double p = nu_ - 0.5;
  return p >= 0.0 && p == std::floor(p) && p <= 512.0;
}

int MaternSmoothness::half_integer_p() const { return static_cast<int>(nu_ - 0.5); }

double std_normal_pdf(double z) {
  if (!std::isfinite(z)) {
    throw std::domain_error("std_normal_pdf: non-finite input");
  }
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double z) {
  if (std::isnan(z)) {
    throw std::domain_error("std_normal_cdf: NaN input");
  }
  return 0.5 * std::erfc(-z * kInvSqrt2);
}

double bvn_cdf(double h, double k, Correlation rho) {
  if (std::isnan(h) || std::isnan(k)) {
    throw std::domain_error("bvn_cdf: NaN input");
  }
  if (h == -std::numeric_limits<double>::infinity() || k == -std::numeric_limits<double>::infinity()) {
    return 0.0;
  }
  if (h == std::numeric_limits<double>::infinity()) {
    return std_normal_cdf(k);
  }
  if (k == std::numeric_limits<double>::infinity()) {
    return std_normal_cdf(h);
  }
  const double r = rho.value();
  if (r >= 1.0 - 1e-12) {
    return bvn_corr_one(h, k);
  }
  if (r <= -1.0 + 1e-12) {
    return bvn_corr_minus_one(h, k);
  }
  const double p = bvn_upper(-h, -k, r);
  return std::min(1.0, std::max(0.0, p));
}

HalfIntegerMatern::HalfIntegerMatern(int p) : coeff_(static_cast<std::size_t>(p) + 1) {
  if (p < 0) {
    throw std::invalid_argument("HalfIntegerMatern: p must be >= 0");
  }
  // c_i = (p+i)!/(i!(p-i)!), scaled overall by p!/(2p)!.
  double scale = 1.0;
  for (int i = p + 1; i <= 2 * p; ++i) {
    scale /= static_cast<double>(i);
  }
  double c = 1.0;
  coeff_[0] = c * scale;
  for (int i = 0; i < p; ++i) {
    c *= static_cast<double>(p + i + 1) * static_cast<double>(p - i) / static_cast<double>(i + 1);
    coeff_[static_cast<std::size_t>(i) + 1] = c * scale;
  }
}

double HalfIntegerMatern::at_scaled(double z) const {
  if (z <= 0.0) {
    return 1.0;
  }
  const double u = 2.0 * z;
  // sum_i c_i u^{p-i}, descending powers (Horner).
  double acc = coeff_[0];
  for (std::size_t i = 1; i < coeff_.size(); ++i) {
    acc = acc * u + coeff_[i];
  }
  return std::min(1.0, std::exp(-z) * acc);
}

double matern_correlation(double h, MaternSmoothness nu) {
  if (!(h >= 0.0) || !std::isfinite(h)) {
    throw std::domain_error("matern_correlation: h must be finite and >= 0");
  }
  if (h == 0.0) {
    return 1.0;
  }
  const double n = nu.value();
  const double z = 2.0 * std::sqrt(n) * h;
  if (nu.is_half_integer()) {
    return HalfIntegerMatern(nu.half_integer_p()).at_scaled(z);
  }
  // General order: r = z^nu K_nu(z) / (2^(nu-1) Gamma(nu)).
  const double bk = std::cyl_bessel_k(n, z);
  if (bk == 0.0) {
    return 0.0;
  }
  const double log_r = n * std::log(z) + std::log(bk) - (n - 1.0) * std::log(2.0) - std::lgamma(n);
  return std::min(1.0, std::exp(log_r));
}

}  // namespace eiei
