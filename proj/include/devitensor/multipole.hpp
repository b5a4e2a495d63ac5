#pragma once

// Maxwell multipoles of order-2 and order-4 deviators, D = a ⌊n1 ⊗ ... ⊗ nq⌋,
// from the roots of the degree-2q complex polynomial built on the deviator's
// coefficients a_{q,r}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "devitensor/polynomial.hpp"
#include "devitensor/tensor.hpp"

namespace devitensor {

struct DeviatorPolynomial {
  int order = 0;                      // q
  std::vector<Complex> source;        // a_{q,r}, r = 0..q
  std::vector<Complex> coefficients;  // ascending powers of x, after multiplying by x^q
  double scale = 0.0;                 // ‖D‖
};

/// c_r = sqrt(q! q! / ((q+r)! (q-r)!)).
inline double pole_weight(int q, int r) {
  return std::sqrt(static_cast<double>(factorial(q)) * factorial(q) /
                   (static_cast<double>(factorial(q + r)) * factorial(q - r)));
}

inline DeviatorPolynomial deviator_poly_coeffs(const Deviator& dev) {
  const DenseTensor& d = dev.tensor();
  const int q = dev.order();
  using namespace std::complex_literals;
  DeviatorPolynomial p;
  p.order = q;
  p.scale = dev.norm();
  if (q == 2) {
    p.source = {-std::sqrt(1.5) * (d(0, 0) + d(1, 1)), d(0, 2) - 1i * d(1, 2),
                0.5 * (d(0, 0) - d(1, 1)) - 1i * d(0, 1)};
  } else if (q == 4) {
    const double d1111 = d(0, 0, 0, 0), d2222 = d(1, 1, 1, 1), d1122 = d(0, 0, 1, 1);
    const double d2213 = d(1, 1, 0, 2), d1113 = d(0, 0, 0, 2), d2223 = d(1, 1, 1, 2), d1123 = d(0, 0, 1, 2);
    const double d2212 = d(1, 1, 0, 1), d1112 = d(0, 0, 0, 1);
    p.source = {
        std::sqrt(35.0 / 8.0) * (d1111 + d2222 + 2.0 * d1122),
        std::sqrt(3.5) * (-d2213 - d1113 + 1i * (d2223 + d1123)),
        std::sqrt(7.0) / 2.0 * (d2222 - d1111 + 2i * (d2212 + d1112)),
        1.0 / std::sqrt(2.0) * (d1113 - 3.0 * d2213 - 1i * (3.0 * d1123 - d2223)),
        0.25 * d1111 + 0.25 * d2222 - 1.5 * d1122 + 1i * (d2212 - d1112),
    };
  } else {
    throw Error(ErrorCode::UnsupportedOrder, "multipole polynomial defined for orders 2 and 4, got " +
                                                 std::to_string(q));
  }
  p.coefficients.assign(static_cast<std::size_t>(2 * q + 1), 0.0);
  p.coefficients[q] = p.source[0];
  for (int r = 1; r <= q; ++r) {
    const double c = pole_weight(q, r);
    p.coefficients[q + r] = c * std::conj(p.source[r]);
    p.coefficients[q - r] = (r % 2 ? -c : c) * p.source[r];
  }
  return p;
}

/// 2q roots with multiplicity; leading coefficients below 1e-12 max|c| count
/// as roots at infinity.
inline RootSet solve_roots(const DeviatorPolynomial& p, std::uint64_t seed = 0) {
  double cmax = 0.0;
  for (const Complex& c : p.coefficients) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0 || cmax <= 1e-14 * p.scale)
    throw Error(ErrorCode::ZeroPolynomial, "isotropic deviator has no multipoles");
  return find_roots(p.coefficients, seed, 1e-12);
}

/// Unit direction of a root: n = e3 cos θ + (e1 cos φ + e2 sin φ) sin θ with
/// tan(θ/2) = |x|. With the a_{q,r} tables above the roots sit at conj(x(n)),
/// so φ = -arg(x). x = 0 gives e3, x = ∞ gives -e3.
inline Vec3 root_direction(Complex x) {
  const double t2 = std::norm(x);
  if (t2 <= 1.0) return {2.0 * x.real() / (1.0 + t2), -2.0 * x.imag() / (1.0 + t2), (1.0 - t2) / (1.0 + t2)};
  const Complex u = 1.0 / x;
  const double u2 = std::norm(u);
  return {2.0 * u.real() / (1.0 + u2), 2.0 * u.imag() / (1.0 + u2), (u2 - 1.0) / (u2 + 1.0)};
}

/// Inverse of root_direction for finite roots (n != -e3).
inline Complex direction_root(const Vec3& n) {
  const double denom = 1.0 + n[2];
  return Complex(n[0] / denom, -n[1] / denom);
}

inline std::vector<Vec3> root_directions(const RootSet& roots) {
  std::vector<Vec3> pts;
  for (const Complex& x : roots.finite) pts.push_back(root_direction(x));
  for (int k = 0; k < roots.infinite; ++k) pts.push_back({0.0, 0.0, -1.0});
  return pts;
}

/// Largest distance from a root's antipodal partner -1/conj(x) to the
/// nearest root, measured on the unit sphere (handles roots at infinity).
inline double antipodal_closure_residual(const RootSet& roots) {
  const auto pts = root_directions(roots);
  double worst = 0.0;
  for (const Vec3& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& o : pts) best = std::min(best, norm(p + o));
    worst = std::max(worst, best);
  }
  return worst;
}

struct MultipoleForm {
  int order = 0;
  double amplitude = 0.0;           // a >= 0
  std::vector<Vec3> directions;     // q unit vectors, empty when a = 0

  bool is_zero() const noexcept { return directions.empty() || amplitude == 0.0; }

  DenseTensor reconstruct() const {
    if (is_zero()) return DenseTensor(order);
    return amplitude * traceless_outer(directions).tensor();
  }
};

namespace detail {

// Perfect matching of 2q sphere points into antipodal pairs minimizing the
// summed score |p_i + p_j|. Brute force: at most 105 matchings for q = 4.
inline void best_matching(const std::vector<Vec3>& pts, std::vector<int>& mate, std::vector<int>& best,
                          double cost, double& best_cost) {
  if (cost >= best_cost) return;
  const auto first = std::find(mate.begin(), mate.end(), -1);
  if (first == mate.end()) {
    best_cost = cost;
    best = mate;
    return;
  }
  const int i = static_cast<int>(first - mate.begin());
  for (int j = i + 1; j < static_cast<int>(pts.size()); ++j) {
    if (mate[j] != -1) continue;
    mate[i] = j;
    mate[j] = i;
    best_matching(pts, mate, best, cost + norm(pts[i] + pts[j]), best_cost);
    mate[i] = mate[j] = -1;
  }
}

struct Fit {
  std::vector<Vec3> dirs;
  double amplitude = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

inline Fit fit_amplitude(const DenseTensor& d, std::vector<Vec3> dirs) {
  Fit f;
  const DenseTensor m = traceless_outer(dirs).tensor();
  const double mm = inner(m, m);
  if (mm <= 0.0) return f;
  f.amplitude = inner(d, m) / mm;
  f.residual = (f.amplitude * m - d).norm();
  f.dirs = std::move(dirs);
  return f;
}

// Replace near-identical lines (angle below `radius`) by their sign-aligned mean.
inline std::vector<Vec3> merge_close_lines(const std::vector<Vec3>& dirs, double radius) {
  const std::size_t n = dirs.size();
  std::vector<int> group(n, -1);
  std::vector<Vec3> out = dirs;
  for (std::size_t i = 0; i < n; ++i) {
    if (group[i] != -1) continue;
    group[i] = static_cast<int>(i);
    Vec3 sum = dirs[i];
    std::vector<std::size_t> members{i};
    for (std::size_t j = i + 1; j < n; ++j)
      if (group[j] == -1 && line_angle(dirs[i], dirs[j]) < radius) {
        group[j] = static_cast<int>(i);
        sum = sum + (dot(dirs[i], dirs[j]) < 0 ? -dirs[j] : dirs[j]);
        members.push_back(j);
      }
    const Vec3 mean = normalized(sum);
    for (std::size_t j : members) out[j] = dot(mean, dirs[j]) < 0 ? -mean : mean;
  }
  return out;
}

inline std::vector<Complex> derivative(std::span<const Complex> a, int times) {
  std::vector<Complex> d(a.begin(), a.end());
  for (int t = 0; t < times && d.size() > 1; ++t) {
    for (std::size_t k = 1; k < d.size(); ++k) d[k - 1] = static_cast<double>(k) * d[k];
    d.pop_back();
  }
  return d;
}

// An m-fold root of p is a simple root of p^(m-1); Newton there is well
// conditioned where Newton on p only reaches eps^(1/m).
inline Complex cluster_center(std::span<const Complex> a, Complex x, int m) {
  const auto f = derivative(a, m - 1);
  const auto df = derivative(f, 1);
  for (int it = 0; it < 60; ++it) {
    const Complex den = evaluate(df, x);
    if (std::abs(den) == 0.0) break;
    const Complex step = evaluate(f, x) / den;
    x -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

// Collapse clusters of finite roots (directions closer than `radius`) onto the
// multiple root they approximate.
inline RootSet refine_root_clusters(const std::vector<Complex>& coeffs, RootSet roots, double radius) {
  const std::size_t n = roots.finite.size();
  std::vector<Vec3> dirs;
  for (const Complex& x : roots.finite) dirs.push_back(root_direction(x));
  std::vector<Complex> reversed(coeffs.rbegin(), coeffs.rend());
  std::vector<bool> done(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::vector<std::size_t> members{i};
    for (std::size_t j = i + 1; j < n; ++j)
      if (!done[j] && norm(dirs[i] - dirs[j]) < radius) members.push_back(j);
    for (std::size_t j : members) done[j] = true;
    if (members.size() < 2) continue;
    const bool upper = dirs[i][2] >= 0.0;
    if (!upper && roots.infinite > 0 && norm(dirs[i] - Vec3{0, 0, -1}) < radius) continue;
    Complex mean = 0.0;
    for (std::size_t j : members) mean += upper ? roots.finite[j] : 1.0 / roots.finite[j];
    mean /= static_cast<double>(members.size());
    const int m = static_cast<int>(members.size());
    const Complex c = upper ? cluster_center(coeffs, mean, m) : 1.0 / cluster_center(reversed, mean, m);
    for (std::size_t j : members) roots.finite[j] = c;
  }
  return roots;
}

}  // namespace detail

/// Keep one root per antipodal pair, map to directions, fit the amplitude by
/// least squares and repair its sign by flipping one direction.
inline MultipoleForm roots_to_multipoles(const RootSet& roots, const Deviator& dev, const Tolerances& tol = {}) {
  const int q = dev.order();
  const auto pts = root_directions(roots);
  if (pts.size() != static_cast<std::size_t>(2 * q))
    throw Error(ErrorCode::PairingFailure, "expected " + std::to_string(2 * q) + " roots, got " +
                                               std::to_string(pts.size()));

  std::vector<int> mate(pts.size(), -1), best;
  double best_cost = std::numeric_limits<double>::infinity();
  detail::best_matching(pts, mate, best, 0.0, best_cost);
  std::vector<Vec3> dirs;
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
    const int j = best[i];
    if (j < i) continue;
    worst = std::max(worst, norm(pts[i] + pts[j]));
    dirs.push_back(normalized(pts[i] - pts[j]));
  }
  if (worst > tol.pair)
    throw Error(ErrorCode::PairingFailure, "no antipodal root pairing within tolerance (worst " +
                                               std::to_string(worst) + ")");

  const DenseTensor& d = dev.tensor();
  detail::Fit raw = detail::fit_amplitude(d, dirs);
  detail::Fit merged = detail::fit_amplitude(d, detail::merge_close_lines(dirs, 1e-3));
  const detail::Fit& fit =
      merged.residual <= std::max(10.0 * raw.residual, 1e-13 * dev.norm()) ? merged : raw;

  MultipoleForm out;
  out.order = q;
  out.amplitude = fit.amplitude;
  for (const Vec3& n : fit.dirs) out.directions.push_back(canonical_sign(n));
  // A single flip negates ⌊n1 ⊗ ... ⊗ nq⌋.
  const double sign = inner(d, traceless_outer(out.directions).tensor()) < 0 ? -1.0 : 1.0;
  out.amplitude = std::abs(out.amplitude);
  if (sign < 0) out.directions.front() = -out.directions.front();

  const double rec = (out.reconstruct() - d).norm();
  const double limit = (q == 2 ? tol.rec2 : tol.rec4) * std::max(dev.norm(), out.amplitude);
  if (!(rec <= limit))
    throw Error(ErrorCode::ReconstructionFailure,
                "multipole reconstruction residual " + std::to_string(rec) + " exceeds " + std::to_string(limit));
  return out;
}

/// Multipoles of an order-2 or order-4 deviator. The zero deviator yields
/// amplitude 0 and no directions.
inline MultipoleForm multipoles(const Deviator& dev, std::uint64_t seed = 0, const Tolerances& tol = {}) {
  const int q = dev.order();
  if (q != 2 && q != 4)
    throw Error(ErrorCode::UnsupportedOrder, "multipoles implemented for orders 2 and 4, got " + std::to_string(q));
  if (dev.norm() == 0.0) return MultipoleForm{q, 0.0, {}};
  const DeviatorPolynomial p = deviator_poly_coeffs(dev);
  RootSet roots;
  try {
    roots = solve_roots(p, seed);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ZeroPolynomial) return MultipoleForm{q, 0.0, {}};
    throw;
  }
  std::optional<MultipoleForm> plain, refined;
  std::optional<Error> failure;
  try {
    plain = roots_to_multipoles(roots, dev, tol);
  } catch (const Error& e) {
    failure = e;
  }
  try {
    refined = roots_to_multipoles(detail::refine_root_clusters(p.coefficients, roots, 1e-2), dev, tol);
  } catch (const Error&) {
  }
  if (plain && refined) {
    const double rp = (plain->reconstruct() - dev.tensor()).norm();
    const double rr = (refined->reconstruct() - dev.tensor()).norm();
    return rr < rp ? *refined : *plain;
  }
  if (refined) return *refined;
  if (plain) return *plain;
  throw *failure;
}

/// Unordered comparison of two direction lists up to sign of each entry.
inline bool same_lines(const std::vector<Vec3>& a, const std::vector<Vec3>& b, double angle_tol) {
  if (a.size() != b.size()) return false;
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t k = 0; k < a.size() && ok; ++k) ok = line_angle(a[k], b[perm[k]]) <= angle_tol;
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace devitensor
