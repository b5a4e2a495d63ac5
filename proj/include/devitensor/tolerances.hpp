#pragma once

namespace devitensor {

/// Numerical thresholds shared by all modules. Relative values are scaled by
/// the Frobenius norm of the tensor under test unless stated otherwise.
struct Tolerances {
  double sym = 1e-10;      // total / minor / major symmetry residual
  double trace = 1e-10;    // trace residual of deviators
  double orth = 1e-10;     // |QᵀQ - I| for rotations
  double gap = 1e-8;       // eigenvalue coincidence
  double dir = 1e-6;       // angle (rad) for equal directions, up to sign
  double mirror = 1e-8;    // mirror test residual
  double zero = 1e-10;     // deviator treated as zero relative to its parent
  double pair = 1e-3;      // chordal distance for antipodal root pairing
  double rec2 = 1e-8;      // multipole reconstruction, order 2
  double rec4 = 1e-6;      // multipole reconstruction, order 4
  double stiffness_accept = 1e-8;  // auto-symmetrize threshold for stiffness input
};

}  // namespace devitensor
