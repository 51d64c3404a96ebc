#include "bfcs/barriers.hpp"

#include "bfcs/model.hpp"

namespace bfcs {

Matrix negative_part(const Matrix& z) {
  require_finite(z, "negative_part");
  return z.cwiseMin(0.0);
}

Matrix consistency(const SensingMatrix& a, const Signal2D& x,
                   const BinaryMeasurements& y) {
  if (a.cols() != x.rows() || y.rows() != a.rows() || y.cols() != x.cols()) {
    throw DimensionMismatch("consistency: shape mismatch");
  }
  return y.cwiseProduct(a * x);
}

double barrier_value(BarrierKind kind, const Matrix& z) {
  const Matrix neg = negative_part(z);
  if (kind == BarrierKind::OneSidedL1) {
    return -2.0 * neg.sum();
  }
  return 0.5 * neg.squaredNorm();
}

Matrix subgradient(BarrierKind kind, const SensingMatrix& a, const Signal2D& x,
                   const BinaryMeasurements& y) {
  if (a.cols() != x.rows() || y.rows() != a.rows() || y.cols() != x.cols()) {
    throw DimensionMismatch("subgradient: shape mismatch");
  }
  if (kind == BarrierKind::OneSidedL1) {
    return a.transpose() * (sign_elementwise(a * x) - y);
  }
  const Matrix z = y.cwiseProduct(a * x);
  return a.transpose() * y.cwiseProduct(z.cwiseMin(0.0));
}

}  // namespace bfcs
