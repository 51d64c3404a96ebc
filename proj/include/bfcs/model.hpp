#pragma once

#include <cstdint>

#include "bfcs/types.hpp"

namespace bfcs {

struct NoiseModel {
  double variance = 0.0;  // sigma^2 of i.i.d. zero-mean Gaussian entries
};

enum class GroupOrientation { Vertical, Horizontal };

// Synthetic group-sparse image: n_groups constant runs of group_length
// entries at +/-amplitude, placed without touching, then unit-normalized.
struct GroupSignalSpec {
  int n_rows = 0;
  int n_cols = 0;
  int n_groups = 0;
  int group_length = 0;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  GroupOrientation orientation = GroupOrientation::Vertical;
};

// Element-wise sign with sign(0) = -1.
Matrix sign_elementwise(const Matrix& z);

// Y = sign(A X + W), W ~ N(0, variance) i.i.d., deterministic given seed.
// variance == 0 skips noise generation entirely.
BinaryMeasurements measure(const SensingMatrix& a, const Signal2D& x,
                           const NoiseModel& noise, std::uint64_t seed);

Signal2D generate_group_signal(const GroupSignalSpec& spec);

SensingMatrix gaussian_sensing_matrix(int m, int n, std::uint64_t seed);

// 20 log10(||X|| / ||X - Xhat||) after unit-normalizing both arguments.
// Exact match -> +inf; zero estimate -> -inf.
double snr_db(const Signal2D& reference, const Signal2D& estimate);

// Fraction of entries where sign(A Xhat) differs from Y.
double sign_consistency_error(const BinaryMeasurements& y,
                              const SensingMatrix& a, const Signal2D& estimate);

// F1 score between nonzero supports; both supports empty -> 1.
double support_f1(const Signal2D& reference, const Signal2D& estimate);

}  // namespace bfcs
