#pragma once

// Symmetric eigenproblems: 3x3 tensors directly, minor+major symmetric
// fourth-order tensors through the Kelvin (Mandel) 6x6 representation.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "devitensor/tensor.hpp"

namespace devitensor {

template <int N>
using SquareMatrix = std::array<std::array<double, N>, N>;

template <int N>
struct SymmetricEigen {
  std::array<double, N> values{};
  SquareMatrix<N> vectors{};  // column k is the k-th eigenvector
};

/// Cyclic Jacobi rotations. Stops when the off-diagonal norm drops below
/// 1e-14 ‖A‖_F or after 50 sweeps. Output order is unspecified.
template <int N>
SymmetricEigen<N> jacobi_eigen(SquareMatrix<N> a) {
  SymmetricEigen<N> out;
  auto& v = out.vectors;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) v[i][j] = i == j ? 1.0 : 0.0;

  double total = 0.0;
  for (const auto& row : a)
    for (double x : row) total += x * x;
  const double limit = 1e-14 * std::sqrt(total);

  for (int sweep = 0; sweep < 50; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < N; ++p)
      for (int q = p + 1; q < N; ++q) off += 2.0 * a[p][q] * a[p][q];
    if (std::sqrt(off) <= limit) break;

    for (int p = 0; p < N; ++p) {
      for (int q = p + 1; q < N; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < N; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < N; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < N; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  for (int i = 0; i < N; ++i) out.values[i] = a[i][i];
  return out;
}

// ---------------------------------------------------------------------------
// 3x3

struct EigenSystem3 {
  Vec3 values{};                   // sorted by descending |λ|
  std::array<Vec3, 3> vectors{};   // orthonormal, right-handed

  DenseTensor reconstruct() const {
    DenseTensor t(2);
    for (int k = 0; k < 3; ++k) t += values[k] * outer_product(vectors[k], vectors[k]);
    return t;
  }
};

namespace detail {

inline int largest_component(const Vec3& v) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[k]) + 1e-12) k = i;
  return k;
}

inline Vec3 gram_schmidt(const Vec3& v, const Vec3& against) { return normalized(v - dot(v, against) * against); }

}  // namespace detail

/// Spectral decomposition T = Σ λ_i v_i ⊗ v_i of a symmetric 3x3 tensor.
///
/// Ordering: descending |λ|, equal magnitudes put the positive value first.
/// Within a cluster (gap < tol.gap ‖T‖) vectors are ordered by the index of
/// their largest component. Signs: largest component of v1, v2 positive,
/// v3 = v1 × v2.
inline EigenSystem3 eigen_sym3(const DenseTensor& t, const Tolerances& tol = {}) {
  if (t.order() != 2) throw Error(ErrorCode::DimensionError, "eigen_sym3 needs order 2");
  const double scale = t.norm();
  const double asym = (t - transpose(t)).max_abs();
  if (asym > tol.sym * std::max(scale, 1e-300) && scale > 0)
    throw Error(ErrorCode::NotSymmetric, "symmetry residual " + std::to_string(asym));

  SquareMatrix<3> a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (t(i, j) + t(j, i));
  const auto eig = jacobi_eigen<3>(a);

  std::array<int, 3> order{0, 1, 2};
  std::array<Vec3, 3> vecs{};
  for (int k = 0; k < 3; ++k) vecs[k] = {eig.vectors[0][k], eig.vectors[1][k], eig.vectors[2][k]};
  const double gap = tol.gap * std::max(scale, 1e-300);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const double lx = eig.values[x], ly = eig.values[y];
    if (std::abs(lx) != std::abs(ly)) return std::abs(lx) > std::abs(ly);
    return lx > ly;
  });
  // |λ| ties within the gap: positive first; equal values: by largest component.
  for (int pass = 0; pass < 2; ++pass)
    for (int k = 0; k + 1 < 3; ++k) {
      const double lx = eig.values[order[k]], ly = eig.values[order[k + 1]];
      const bool swap =
          std::abs(lx - ly) <= gap
              ? detail::largest_component(vecs[order[k]]) > detail::largest_component(vecs[order[k + 1]])
              : (std::abs(std::abs(lx) - std::abs(ly)) <= gap && ly > lx);
      if (swap) std::swap(order[k], order[k + 1]);
    }

  EigenSystem3 out;
  for (int k = 0; k < 3; ++k) out.values[k] = eig.values[order[k]];
  Vec3 v1 = canonical_sign(normalized(vecs[order[0]]));
  Vec3 v2 = canonical_sign(detail::gram_schmidt(vecs[order[1]], v1));
  out.vectors = {v1, v2, cross(v1, v2)};
  return out;
}

// ---------------------------------------------------------------------------
// Kelvin mapping

using KelvinMatrix = SquareMatrix<6>;
using KelvinVector = std::array<double, 6>;

/// Kelvin index pairs: 1→11, 2→22, 3→33, 4→23, 5→13, 6→12 (0-based here).
inline constexpr std::array<std::array<int, 2>, 6> kKelvinPairs{{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

inline double kelvin_weight(int m) { return m < 3 ? 1.0 : std::sqrt(2.0); }

inline int kelvin_index(int i, int j) {
  if (i == j) return i;
  const int s = i + j;  // (1,2)→3, (0,2)→4, (0,1)→5
  return s == 3 ? 3 : (s == 2 ? 4 : 5);
}

/// Worst minor/major symmetry residual and its index quadruple.
struct StiffnessSymmetryReport {
  double residual = 0.0;
  Index worst{};
};

inline StiffnessSymmetryReport stiffness_symmetry_residual(const DenseTensor& c) {
  StiffnessSymmetryReport rep;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double v = c(i, j, k, l);
          const double r =
              std::max({std::abs(v - c(j, i, k, l)), std::abs(v - c(i, j, l, k)), std::abs(v - c(k, l, i, j))});
          if (r > rep.residual) {
            rep.residual = r;
            rep.worst = {i, j, k, l};
          }
        }
  return rep;
}

namespace detail {

inline void require_stiffness_symmetry(const DenseTensor& c, double rel_tol) {
  if (c.order() != 4) throw Error(ErrorCode::DimensionError, "expected an order-4 tensor");
  const auto rep = stiffness_symmetry_residual(c);
  if (rep.residual > rel_tol * c.norm() && rep.residual > 0.0) {
    const auto& w = rep.worst;
    throw Error(ErrorCode::SymmetryViolation, "minor/major symmetry residual " + std::to_string(rep.residual) +
                                                  " at (" + std::to_string(w[0] + 1) + std::to_string(w[1] + 1) +
                                                  std::to_string(w[2] + 1) + std::to_string(w[3] + 1) + ")");
  }
}

}  // namespace detail

inline KelvinMatrix kelvin_map(const DenseTensor& c, const Tolerances& tol = {}) {
  detail::require_stiffness_symmetry(c, tol.sym);
  KelvinMatrix k{};
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      const auto [i, j] = kKelvinPairs[m];
      const auto [p, q] = kKelvinPairs[n];
      k[m][n] = kelvin_weight(m) * kelvin_weight(n) * c(i, j, p, q);
    }
  return k;
}

inline DenseTensor kelvin_unmap(const KelvinMatrix& k) {
  DenseTensor c(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          const int m = kelvin_index(i, j), n = kelvin_index(p, q);
          c(i, j, p, q) = k[m][n] / (kelvin_weight(m) * kelvin_weight(n));
        }
  return c;
}

/// Symmetric second-order tensor as a Kelvin 6-vector (σ11, σ22, σ33, √2σ23, √2σ13, √2σ12).
inline KelvinVector kelvin_vector(const DenseTensor& s) {
  KelvinVector v{};
  for (int m = 0; m < 6; ++m) v[m] = kelvin_weight(m) * s(kKelvinPairs[m][0], kKelvinPairs[m][1]);
  return v;
}

inline DenseTensor kelvin_tensor(const KelvinVector& v) {
  DenseTensor s(2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int m = kelvin_index(i, j);
      s(i, j) = v[m] / kelvin_weight(m);
    }
  return s;
}

inline double frobenius(const KelvinMatrix& k) {
  double s = 0.0;
  for (const auto& row : k)
    for (double x : row) s += x * x;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Eigentensors

struct EigentensorSystem {
  std::array<double, 6> eigenstiffnesses{};   // descending
  std::array<DenseTensor, 6> eigentensors{};  // symmetric, orthonormal under ':'

  DenseTensor reconstruct() const {
    DenseTensor c(4);
    for (int k = 0; k < 6; ++k) c += eigenstiffnesses[k] * outer_product(eigentensors[k], eigentensors[k]);
    return c;
  }
};

/// C = Σ Λ_i M_i ⊗ M_i from the spectral decomposition of the Kelvin matrix.
inline EigentensorSystem eigentensors(const DenseTensor& c, const Tolerances& tol = {}) {
  const KelvinMatrix k = kelvin_map(c, tol);
  const auto eig = jacobi_eigen<6>(k);
  std::array<int, 6> order{0, 1, 2, 3, 4, 5};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eig.values[a] > eig.values[b]; });

  EigentensorSystem out;
  for (int r = 0; r < 6; ++r) {
    const int col = order[r];
    KelvinVector v{};
    int big = 0;
    for (int m = 0; m < 6; ++m) {
      v[m] = eig.vectors[m][col];
      if (std::abs(v[m]) > std::abs(v[big]) + 1e-12) big = m;
    }
    if (v[big] < 0)
      for (double& x : v) x = -x;
    out.eigenstiffnesses[r] = eig.values[col];
    out.eigentensors[r] = kelvin_tensor(v);
  }
  return out;
}

}  // namespace devitensor
