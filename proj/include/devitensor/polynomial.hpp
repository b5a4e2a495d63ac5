#pragma once

// Roots of complex polynomials: Laguerre's method with deflation, seeded
// random restarts and a guarded Newton polish on the undeflated polynomial.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "devitensor/error.hpp"

namespace devitensor {

using Complex = std::complex<double>;

struct RootSet {
  std::vector<Complex> finite;
  int infinite = 0;  // roots at infinity from vanishing leading coefficients

  std::size_t size() const noexcept { return finite.size() + static_cast<std::size_t>(infinite); }
};

/// Horner evaluation; coefficients in ascending powers.
inline Complex evaluate(std::span<const Complex> coeffs, Complex x) {
  Complex b = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) b = b * x + coeffs[k];
  return b;
}

namespace detail {

/// One Laguerre root search from `x`. Returns false after the iteration cap.
inline bool laguerre(std::span<const Complex> a, Complex& x) {
  constexpr int kMr = 8, kMt = 10, kMaxIt = kMt * kMr;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  static constexpr double kFrac[kMr + 1] = {0.0, 0.5, 0.25, 0.75, 0.13, 0.38, 0.62, 0.88, 1.0};
  const int m = static_cast<int>(a.size()) - 1;
  for (int iter = 1; iter <= kMaxIt; ++iter) {
    Complex b = a[m], d = 0.0, f = 0.0;
    double err = std::abs(b);
    const double abx = std::abs(x);
    for (int j = m - 1; j >= 0; --j) {
      f = x * f + d;
      d = x * d + b;
      b = x * b + a[j];
      err = std::abs(b) + abx * err;
    }
    err *= kEps;
    if (std::abs(b) <= err) return true;
    const Complex g = d / b;
    const Complex g2 = g * g;
    const Complex h = g2 - 2.0 * f / b;
    const Complex sq = std::sqrt(static_cast<double>(m - 1) * (static_cast<double>(m) * h - g2));
    Complex gp = g + sq;
    const Complex gm = g - sq;
    const double abp = std::abs(gp), abm = std::abs(gm);
    if (abp < abm) gp = gm;
    const Complex dx = std::max(abp, abm) > 0.0 ? static_cast<double>(m) / gp
                                                 : std::polar(1.0 + abx, static_cast<double>(iter));
    const Complex x1 = x - dx;
    if (x == x1) return true;
    if (iter % kMt != 0)
      x = x1;
    else
      x -= kFrac[iter / kMt] * dx;
  }
  return false;
}

inline Complex newton_polish(std::span<const Complex> a, Complex x) {
  std::vector<Complex> da(a.size() > 1 ? a.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) da[k - 1] = static_cast<double>(k) * a[k];
  double best = std::abs(evaluate(a, x));
  for (int it = 0; it < 8 && best > 0.0; ++it) {
    const Complex dp = evaluate(da, x);
    if (dp == Complex(0.0)) break;
    const Complex xn = x - evaluate(a, x) / dp;
    const double r = std::abs(evaluate(a, xn));
    if (!(r < best)) break;
    best = r;
    x = xn;
  }
  return x;
}

}  // namespace detail

/// All roots of Σ c_k x^k. Leading coefficients below `zero_rel`·max|c| are
/// dropped and counted as roots at infinity.
inline RootSet find_roots(std::span<const Complex> coeffs, std::uint64_t seed = 0, double zero_rel = 1e-12) {
  double cmax = 0.0;
  for (const Complex& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (coeffs.empty() || cmax == 0.0) throw Error(ErrorCode::ZeroPolynomial, "all coefficients vanish");

  std::size_t deg = coeffs.size() - 1;
  RootSet out;
  while (deg > 0 && std::abs(coeffs[deg]) <= zero_rel * cmax) {
    --deg;
    ++out.infinite;
  }
  std::vector<Complex> poly(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(deg + 1));
  std::vector<Complex> work = poly;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (std::size_t j = deg; j >= 1; --j) {
    std::span<const Complex> cur(work.data(), j + 1);
    Complex x = 0.0;
    bool ok = detail::laguerre(cur, x);
    for (int restart = 0; !ok && restart < 16; ++restart) {
      x = Complex(unit(rng), unit(rng)) * (1.0 + restart);
      ok = detail::laguerre(cur, x);
    }
    if (!ok)
      throw Error(ErrorCode::NoConvergence,
                  "Laguerre iteration did not converge for degree " + std::to_string(j) + " factor");
    out.finite.push_back(x);
    // Synthetic division by (x - root).
    Complex b = work[j];
    for (std::size_t k = j; k-- > 0;) {
      const Complex c = work[k];
      work[k] = b;
      b = x * b + c;
    }
  }
  for (Complex& r : out.finite) r = detail::newton_polish(poly, r);
  return out;
}

}  // namespace devitensor
