/**
 * @file poly.hpp
 * @brief Complex polynomials (ascending coefficients) and a certified
 *        Aberth–Ehrlich root finder.
 */
#pragma once

#include <vector>

#include "bctk/core.hpp"

namespace bctk {

struct Poly {
  std::vector<Complex> c;  ///< c[k] multiplies z^k

  Poly() = default;
  explicit Poly(std::vector<Complex> coeffs) : c(std::move(coeffs)) {}

  /// Index of the last nonzero coefficient, -1 for the zero polynomial.
  int degree() const;
  Complex operator()(Complex z) const;
  /// p(z) and p'(z) in one Horner pass.
  void eval2(Complex z, Complex& p, Complex& dp) const;
  /// sum |c_k| r^k, the scale used for backward-error residuals.
  double magnitude(double r) const;
  Poly derivative() const;
  /// Drops high coefficients below rel * max|c_k|.
  Poly trimmed(double rel = 0.0) const;
  /// z^n p(1/z) padded to length n + 1.
  Poly reversed(int n) const;
};

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(Complex s, const Poly& a);
/// p(q(z)).
Poly compose(const Poly& p, const Poly& q);

struct Root {
  Complex z;
  int multiplicity = 1;
};

struct RootOptions {
  double residual_tol = 1e-12;  ///< backward error |p(z)| / sum|c_k||z|^k
  int max_iterations = 2000;
  int restarts = 6;
  std::uint64_t seed = 0;
};

/// All roots repeated by multiplicity, certified by backward residual.
/// Throws NumericError when certification fails after the restarts.
std::vector<Complex> aberth_roots(const Poly& p, const RootOptions& opt = {});

/// Roots grouped into clusters; a cluster of size m is accepted as an
/// m-fold root only if p, ..., p^(m-1) vanish there to working precision.
std::vector<Root> clustered_roots(const Poly& p, const RootOptions& opt = {});

}  // namespace bctk
