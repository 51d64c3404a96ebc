#pragma once

#include "bfcs/types.hpp"

namespace bfcs {

// Sign-consistency barriers: one-sided l1 penalizes violations linearly,
// one-sided l2 quadratically.
enum class BarrierKind { OneSidedL1, OneSidedL2 };

// [Z]_- = min(Z, 0), entry-wise.
Matrix negative_part(const Matrix& z);

// Z = Y (.) (A X), the sign-consistency matrix the barriers act on.
Matrix consistency(const SensingMatrix& a, const Signal2D& x,
                   const BinaryMeasurements& y);

// OneSidedL1: 2 ||[Z]_-||_1;  OneSidedL2: 1/2 ||[Z]_-||_2^2.
double barrier_value(BarrierKind kind, const Matrix& z);

// Subgradient of X -> barrier_value(kind, Y (.) (A X)).
//   l1: A^T (sign(A X) - Y)
//   l2: A^T (Y (.) [Y (.) (A X)]_-)
// At zero entries of A X the l1 formula uses sign(0) = -1.
Matrix subgradient(BarrierKind kind, const SensingMatrix& a, const Signal2D& x,
                   const BinaryMeasurements& y);

}  // namespace bfcs
