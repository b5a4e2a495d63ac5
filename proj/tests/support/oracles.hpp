#pragma once

// Test-side reference implementations. Nothing here calls the library's
// algorithms; only the DenseTensor container and small vector helpers are
// shared.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "devitensor/tensor.hpp"

namespace oracle {

using devitensor::DenseTensor;
using devitensor::Vec3;
using devitensor::operator+;
using devitensor::operator*;

using Mat6 = std::array<std::array<double, 6>, 6>;

// Voigt pair table, written out independently of the library.
inline constexpr int kPair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};

inline int voigt_of(int i, int j) {
  for (int m = 0; m < 6; ++m)
    if ((kPair[m][0] == i && kPair[m][1] == j) || (kPair[m][0] == j && kPair[m][1] == i)) return m;
  return -1;
}

inline DenseTensor from_voigt(const Mat6& v) {
  DenseTensor c(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) c(i, j, k, l) = v[voigt_of(i, j)][voigt_of(k, l)];
  return c;
}

inline Mat6 kelvin_matrix(const DenseTensor& c) {
  Mat6 k{};
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      const double w = (m >= 3 ? std::sqrt(2.0) : 1.0) * (n >= 3 ? std::sqrt(2.0) : 1.0);
      k[m][n] = w * c(kPair[m][0], kPair[m][1], kPair[n][0], kPair[n][1]);
    }
  return k;
}

inline double kronecker(int a, int b) { return a == b ? 1.0 : 0.0; }

inline DenseTensor isotropic(double lambda, double mu) {
  DenseTensor c(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          c(i, j, k, l) = lambda * kronecker(i, j) * kronecker(k, l) +
                          mu * (kronecker(i, k) * kronecker(j, l) + kronecker(i, l) * kronecker(j, k));
  return c;
}

// ---------------------------------------------------------------------------
// Random inputs

inline double gauss(std::mt19937_64& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline DenseTensor random_tensor(int order, std::mt19937_64& rng) {
  DenseTensor t(order);
  for (double& x : t.coeffs()) x = gauss(rng);
  return t;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

/// Uniform rotation from a normalized Gaussian quaternion.
inline DenseTensor random_rotation(std::mt19937_64& rng) {
  double w = gauss(rng), x = gauss(rng), y = gauss(rng), z = gauss(rng);
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  DenseTensor q(2);
  q(0, 0) = 1 - 2 * (y * y + z * z), q(0, 1) = 2 * (x * y - z * w), q(0, 2) = 2 * (x * z + y * w);
  q(1, 0) = 2 * (x * y + z * w), q(1, 1) = 1 - 2 * (x * x + z * z), q(1, 2) = 2 * (y * z - x * w);
  q(2, 0) = 2 * (x * z - y * w), q(2, 1) = 2 * (y * z + x * w), q(2, 2) = 1 - 2 * (x * x + y * y);
  return q;
}

inline Mat6 random_symmetric6(std::mt19937_64& rng) {
  Mat6 v{};
  for (int m = 0; m < 6; ++m)
    for (int n = m; n < 6; ++n) v[m][n] = v[n][m] = gauss(rng);
  return v;
}

/// Minor + major symmetric, not necessarily positive definite.
inline DenseTensor random_stiffness(std::mt19937_64& rng) { return from_voigt(random_symmetric6(rng)); }

/// Positive definite Voigt matrix A Aᵀ + I.
inline DenseTensor random_spd_stiffness(std::mt19937_64& rng) {
  Mat6 a = random_symmetric6(rng), v{};
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      for (int k = 0; k < 6; ++k) v[m][n] += a[m][k] * a[n][k];
      v[m][n] += kronecker(m, n);
    }
  return from_voigt(v);
}

inline DenseTensor random_symmetric2(std::mt19937_64& rng) {
  DenseTensor t(2);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) t(i, j) = t(j, i) = gauss(rng);
  return t;
}

// ---------------------------------------------------------------------------
// Index-loop reference operations

inline int ipow3(int k) { return k == 0 ? 1 : 3 * ipow3(k - 1); }

/// Applies Q to one slot: T'_{..a..} = Q_ab T_{..b..}.
inline DenseTensor apply_to_slot(const DenseTensor& t, const DenseTensor& q, int slot) {
  const int order = t.order();
  const int stride = ipow3(order - 1 - slot);
  DenseTensor out(order);
  for (int flat = 0; flat < static_cast<int>(t.size()); ++flat) {
    const int a = (flat / stride) % 3;
    const int base = flat - a * stride;
    double s = 0.0;
    for (int b = 0; b < 3; ++b) s += q(a, b) * t.coeffs()[base + b * stride];
    out.coeffs()[flat] = s;
  }
  return out;
}

inline DenseTensor rotate(const DenseTensor& t, const DenseTensor& q) {
  DenseTensor out = t;
  for (int s = 0; s < t.order(); ++s) out = apply_to_slot(out, q, s);
  return out;
}

inline DenseTensor reflection(const Vec3& n) {
  DenseTensor r(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = kronecker(i, j) - 2.0 * n[i] * n[j];
  return r;
}

/// Average over all index permutations via std::next_permutation.
inline DenseTensor symmetrize(const DenseTensor& t) {
  const int q = t.order();
  if (q < 2) return t;
  DenseTensor out(q);
  std::vector<int> perm(q);
  int count = 0;
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> idx(q), src(q);
  do {
    ++count;
    for (int flat = 0; flat < static_cast<int>(t.size()); ++flat) {
      int rem = flat;
      for (int s = q - 1; s >= 0; --s) {
        idx[s] = rem % 3;
        rem /= 3;
      }
      int from = 0;
      for (int s = 0; s < q; ++s) from = 3 * from + idx[perm[s]];
      out.coeffs()[flat] += t.coeffs()[from];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (double& x : out.coeffs()) x /= count;
  return out;
}

inline double inner(const DenseTensor& a, const DenseTensor& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.coeffs()[k] * b.coeffs()[k];
  return s;
}

// ---------------------------------------------------------------------------
// Closed-form symmetric 3x3 eigenvalues (trigonometric method), descending.

inline std::array<double, 3> eigenvalues_sym3(const DenseTensor& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double tr = a(0, 0) + a(1, 1) + a(2, 2);
  const double qm = tr / 3.0;
  const double p2 = (a(0, 0) - qm) * (a(0, 0) - qm) + (a(1, 1) - qm) * (a(1, 1) - qm) +
                    (a(2, 2) - qm) * (a(2, 2) - qm) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {qm, qm, qm};
  DenseTensor b(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - qm * kronecker(i, j)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = qm + 2.0 * p * std::cos(phi);
  const double e3 = qm + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {e1, tr - e1 - e3, e3};
}

/// Eigenvector of a simple eigenvalue: the largest cross product of two rows
/// of A - λI.
inline Vec3 eigenvector_sym3(const DenseTensor& a, double lambda) {
  Vec3 r[3];
  for (int i = 0; i < 3; ++i) r[i] = {a(i, 0) - lambda * kronecker(i, 0), a(i, 1) - lambda * kronecker(i, 1),
                                      a(i, 2) - lambda * kronecker(i, 2)};
  Vec3 best{};
  double bn = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Vec3 c = devitensor::cross(r[i], r[j]);
      const double n = devitensor::norm(c);
      if (n > bn) {
        bn = n;
        best = c;
      }
    }
  return devitensor::normalized(best);
}

// ---------------------------------------------------------------------------
// Canonical fixtures (Voigt, stiffness form), one per symmetry class.

struct Fixture {
  std::string label;
  DenseTensor c{4};
  int planes = 0;  // -1 for infinite families
};

inline Mat6 voigt_pattern(double c11, double c22, double c33, double c12, double c13, double c23, double c44,
                          double c55, double c66) {
  Mat6 v{};
  v[0][0] = c11, v[1][1] = c22, v[2][2] = c33;
  v[0][1] = v[1][0] = c12;
  v[0][2] = v[2][0] = c13;
  v[1][2] = v[2][1] = c23;
  v[3][3] = c44, v[4][4] = c55, v[5][5] = c66;
  return v;
}

inline std::vector<Fixture> fixtures() {
  std::vector<Fixture> out;
  out.push_back({"isotropic", isotropic(2.0, 1.0), -1});
  // C66 = (C11 - C12)/2 for transverse isotropy about e3.
  out.push_back({"transversely_isotropic", from_voigt(voigt_pattern(10, 10, 8, 4, 3, 3, 2, 2, 3)), -1});
  out.push_back({"cubic", from_voigt(voigt_pattern(4, 4, 4, 2, 2, 2, 1.5, 1.5, 1.5)), 9});
  out.push_back({"tetragonal", from_voigt(voigt_pattern(10, 10, 8, 5, 3, 3, 2, 2, 3.5)), 5});
  {
    Mat6 v = voigt_pattern(10, 10, 8, 4, 3, 3, 2, 2, 3);
    v[0][3] = v[3][0] = 1.0;
    v[1][3] = v[3][1] = -1.0;
    v[4][5] = v[5][4] = 1.0;
    out.push_back({"trigonal", from_voigt(v), 3});
  }
  out.push_back({"orthotropic", from_voigt(voigt_pattern(12, 10, 8, 4, 3, 2.5, 2, 1.7, 1.3)), 3});
  {
    Mat6 v = voigt_pattern(12, 10, 8, 4, 3, 2.5, 2, 1.7, 1.3);
    v[0][5] = v[5][0] = 0.7;
    v[1][5] = v[5][1] = -0.4;
    v[2][5] = v[5][2] = 0.3;
    v[3][4] = v[4][3] = 0.25;
    out.push_back({"monoclinic", from_voigt(v), 1});
  }
  {
    std::mt19937_64 rng(20240601);
    out.push_back({"triclinic", random_spd_stiffness(rng), 0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force mirror-plane search: dense grid of normals, mirror residual of
// the anisotropic part, Gauss-Newton refinement of promising grid points.

struct BruteForceResult {
  std::string label;
  std::vector<Vec3> normals;
  bool infinite = false;
};

/// Projection onto span{δδ, δδ+δδ} with the two isotropic projectors.
inline DenseTensor isotropic_projection(const DenseTensor& c) {
  DenseTensor j(4), k(4);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          j(a, b, p, q) = kronecker(a, b) * kronecker(p, q) / 3.0;
          k(a, b, p, q) = 0.5 * (kronecker(a, p) * kronecker(b, q) + kronecker(a, q) * kronecker(b, p)) - j(a, b, p, q);
        }
  return oracle::inner(c, j) * j + (oracle::inner(c, k) / 5.0) * k;
}

inline DenseTensor mirror_defect(const DenseTensor& c, const Vec3& n) { return oracle::rotate(c, reflection(n)) - c; }

inline Vec3 normalize(const Vec3& v) { return devitensor::normalized(v); }

inline Vec3 refine_normal(const DenseTensor& c, Vec3 n) {
  for (int it = 0; it < 40; ++it) {
    const Vec3 t1 = normalize(devitensor::cross(n, std::abs(n[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0}));
    const Vec3 t2 = devitensor::cross(n, t1);
    const DenseTensor r0 = mirror_defect(c, n);
    const double h = 1e-7;
    const DenseTensor g1 = (mirror_defect(c, normalize(n + h * t1)) - r0) / h;
    const DenseTensor g2 = (mirror_defect(c, normalize(n + h * t2)) - r0) / h;
    const double a11 = oracle::inner(g1, g1), a12 = oracle::inner(g1, g2), a22 = oracle::inner(g2, g2);
    const double b1 = -oracle::inner(g1, r0), b2 = -oracle::inner(g2, r0);
    const double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 0.0)) break;
    const double u = (b1 * a22 - b2 * a12) / det, v = (a11 * b2 - a12 * b1) / det;
    const Vec3 next = normalize(n + u * t1 + v * t2);
    if (mirror_defect(c, next).norm() >= r0.norm()) break;
    n = next;
    if (std::hypot(u, v) < 1e-14) break;
  }
  return n;
}

inline double line_gap(const Vec3& a, const Vec3& b) {
  return std::acos(std::min(1.0, std::abs(devitensor::dot(a, b))));
}

/// Fibonacci points on the upper hemisphere of a full-sphere lattice with
/// `count` points (average spacing sqrt(4π/count) rad; 10^4 gives ~2°).
inline std::vector<Vec3> hemisphere_grid(int count) {
  std::vector<Vec3> out;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    if (z < 0.0) break;
    const double r = std::sqrt(1.0 - z * z);
    out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
  }
  return out;
}

inline BruteForceResult brute_force_planes(const DenseTensor& c, int grid = 10000) {
  BruteForceResult res;
  const DenseTensor aniso = c - isotropic_projection(c);
  const double scale = aniso.norm();
  if (scale <= 1e-10 * c.norm()) {
    res.label = "isotropic";
    res.infinite = true;
    return res;
  }
  std::vector<std::pair<double, Vec3>> scored;
  for (const Vec3& n : hemisphere_grid(grid)) scored.push_back({mirror_defect(aniso, n).norm() / scale, n});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<Vec3> seeds;
  const double cluster = 5.0 * M_PI / 180.0;
  for (std::size_t k = 0; k < scored.size() && k < 400; ++k) {
    if (scored[k].first > 0.5) break;
    const Vec3& n = scored[k].second;
    if (std::none_of(seeds.begin(), seeds.end(), [&](const Vec3& s) { return line_gap(s, n) < cluster; }))
      seeds.push_back(n);
  }
  for (const Vec3& s : seeds) {
    const Vec3 n = refine_normal(aniso, s);
    if (mirror_defect(aniso, n).norm() / scale > 1e-7) continue;
    if (std::none_of(res.normals.begin(), res.normals.end(), [&](const Vec3& m) { return line_gap(m, n) < 1e-4; }))
      res.normals.push_back(n);
  }

  const auto& p = res.normals;
  const auto perp = [](const Vec3& a, const Vec3& b) { return std::abs(devitensor::dot(a, b)) < 1e-6; };
  if (p.size() > 9) {
    res.label = "transversely_isotropic";
    res.infinite = true;
  } else if (p.empty()) {
    res.label = "triclinic";
  } else if (p.size() == 1) {
    res.label = "monoclinic";
  } else if (p.size() == 3) {
    res.label = perp(p[0], p[1]) && perp(p[0], p[2]) && perp(p[1], p[2]) ? "orthotropic" : "trigonal";
  } else if (p.size() == 5) {
    res.label = "tetragonal";
  } else if (p.size() == 9) {
    res.label = "cubic";
  } else {
    res.label = "unrecognised(" + std::to_string(p.size()) + ")";
  }
  return res;
}

}  // namespace oracle
