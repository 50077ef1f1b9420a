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

#ifndef EIEI_SPECIAL_MATH_HPP
#define EIEI_SPECIAL_MATH_HPP

#include <vector>

namespace eiei {

// Correlation parameter of the standard bivariate normal, |rho| <= 1.
class Correlation {
 public:
  explicit Correlation(double rho);
  double value() const { return rho_; }

 private:
  double rho_;
};

// Smoothness order nu > 0 of the Matern correlation family.
class MaternSmoothness {
 public:
  explicit MaternSmoothness(double nu);
  double value() const { return nu_; }
  // True when nu = p + 1/2 for an integer p >= 0 (up to representation).
  bool is_half_integer() const;
  // The integer p for a half-integer order; undefined otherwise.
  int half_integer_p() const;

 private:
  double nu_;
};

/// Standard normal density (2*pi)^(-1/2) exp(-z^2/2).
double std_normal_pdf(double z);

/// Standard normal CDF. Accepts +/-infinity; NaN raises std::domain_error.
double std_normal_cdf(double z);

/// CDF of the standard bivariate normal: P(Z1 <= h, Z2 <= k) under
/// correlation rho. Fixed-order Gauss-Legendre quadrature over the
/// correlation parameter (Drezner-Wesolowsky as refined by Genz), with a
/// separate expansion for |rho| > 0.925. Absolute accuracy ~1e-14.
/// |rho| within 1e-12 of +/-1 is routed to the analytic degenerate limit.
double bvn_cdf(double h, double k, Correlation rho);

/// Isotropic Matern correlation
///   r_nu(h) = (2 sqrt(nu) h)^nu K_nu(2 sqrt(nu) h) / (2^(nu-1) Gamma(nu)),
/// r_nu(0) = 1. Half-integer orders use the exact exp-times-polynomial
/// form; other orders fall back to the cylindrical Bessel function.
double matern_correlation(double h, MaternSmoothness nu);

// Precomputed polynomial coefficients for a half-integer order, so the
// per-evaluation cost in hot loops is one exp plus a Horner pass.
class HalfIntegerMatern {
 public:
  explicit HalfIntegerMatern(int p);
  // Correlation as a function of the scaled argument z = 2 sqrt(nu) h.
  double at_scaled(double z) const;

 private:
  std::vector<double> coeff_;  // c_i = (p+i)!/(i!(p-i)!) * p!/(2p)!, i = 0..p
};

}  // namespace eiei

#endif  // EIEI_SPECIAL_MATH_HPP
