#include "bfcs/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "bfcs/rng.hpp"

namespace bfcs {

Matrix sign_elementwise(const Matrix& z) {
  require_finite(z, "sign_elementwise");
  return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : -1.0; });
}

BinaryMeasurements measure(const SensingMatrix& a, const Signal2D& x,
                           const NoiseModel& noise, std::uint64_t seed) {
  if (a.cols() != x.rows()) {
    throw DimensionMismatch("measure: A columns must match X rows");
  }
  if (noise.variance < 0.0) {
    throw InvalidInput("measure: negative noise variance");
  }
  Matrix z = a * x;
  if (noise.variance > 0.0) {
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.variance));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      for (Eigen::Index j = 0; j < z.cols(); ++j) {
        z(i, j) += gauss(eng);
      }
    }
  }
  return sign_elementwise(z);
}

Signal2D generate_group_signal(const GroupSignalSpec& spec) {
  const int n = spec.n_rows;
  const int l = spec.n_cols;
  const int len = spec.group_length;
  if (n < 1 || l < 1) throw InvalidInput("group signal: empty dimensions");
  if (spec.n_groups < 0 || (spec.n_groups > 0 && len < 1)) {
    throw InvalidInput("group signal: invalid group shape");
  }
  if (static_cast<long long>(spec.n_groups) * len >
      static_cast<long long>(n) * l) {
    throw InvalidInput("group signal: groups do not fit");
  }
  if (spec.n_groups > 0 && spec.amplitude <= 0.0) {
    throw InvalidInput("group signal: amplitude must be positive");
  }
  const bool vertical = spec.orientation == GroupOrientation::Vertical;
  const int run_span = vertical ? n : l;
  if (spec.n_groups > 0 && len > run_span) {
    throw InvalidInput("group signal: group longer than image side");
  }

  Signal2D x = Signal2D::Zero(n, l);
  if (spec.n_groups == 0) return x;

  auto eng = make_engine(spec.seed);
  std::uniform_int_distribution<int> pick_lane(0, vertical ? l - 1 : n - 1);
  std::uniform_int_distribution<int> pick_start(0, run_span - len);
  std::uniform_int_distribution<int> pick_sign(0, 1);

  // Occupancy including a one-cell halo so distinct groups never 4-touch.
  std::vector<char> blocked(static_cast<std::size_t>(n) * l, 0);
  auto blocked_at = [&](int i, int j) { return blocked[i * l + j] != 0; };
  auto block = [&](int i, int j) {
    if (i >= 0 && i < n && j >= 0 && j < l) blocked[i * l + j] = 1;
  };

  constexpr int kMaxRetries = 10000;
  int retries = 0;
  for (int g = 0; g < spec.n_groups;) {
    const int lane = pick_lane(eng);
    const int start = pick_start(eng);
    bool free = true;
    for (int t = 0; t < len && free; ++t) {
      const int i = vertical ? start + t : lane;
      const int j = vertical ? lane : start + t;
      free = !blocked_at(i, j);
    }
    if (!free) {
      if (++retries > kMaxRetries) {
        throw InvalidInput("group signal: placement retries exhausted");
      }
      continue;
    }
    const double value = pick_sign(eng) ? spec.amplitude : -spec.amplitude;
    for (int t = 0; t < len; ++t) {
      const int i = vertical ? start + t : lane;
      const int j = vertical ? lane : start + t;
      x(i, j) = value;
      block(i, j);
      block(i - 1, j);
      block(i + 1, j);
      block(i, j - 1);
      block(i, j + 1);
    }
    ++g;
  }

  const double norm = x.norm();
  if (norm > 0.0) x /= norm;
  return x;
}

SensingMatrix gaussian_sensing_matrix(int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw InvalidInput("sensing matrix: empty dimensions");
  auto eng = make_engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SensingMatrix a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = gauss(eng);
    }
  }
  return a;
}

double snr_db(const Signal2D& reference, const Signal2D& estimate) {
  if (reference.rows() != estimate.rows() ||
      reference.cols() != estimate.cols()) {
    throw DimensionMismatch("snr_db: shape mismatch");
  }
  const double ref_norm = reference.norm();
  if (ref_norm == 0.0) throw InvalidInput("snr_db: zero reference");
  const double est_norm = estimate.norm();
  if (est_norm == 0.0) return -std::numeric_limits<double>::infinity();
  const double err = (reference / ref_norm - estimate / est_norm).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(1.0 / err);
}

double sign_consistency_error(const BinaryMeasurements& y,
                              const SensingMatrix& a,
                              const Signal2D& estimate) {
  if (a.cols() != estimate.rows() || y.rows() != a.rows() ||
      y.cols() != estimate.cols()) {
    throw DimensionMismatch("sign_consistency_error: shape mismatch");
  }
  const Matrix predicted = sign_elementwise(a * estimate);
  const auto total = static_cast<double>(y.rows() * y.cols());
  double mismatches = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      if (predicted(i, j) != y(i, j)) mismatches += 1.0;
    }
  }
  return mismatches / total;
}

double support_f1(const Signal2D& reference, const Signal2D& estimate) {
  if (reference.rows() != estimate.rows() ||
      reference.cols() != estimate.cols()) {
    throw DimensionMismatch("support_f1: shape mismatch");
  }
  long long tp = 0, fp = 0, fn = 0;
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    for (Eigen::Index j = 0; j < reference.cols(); ++j) {
      const bool in_ref = reference(i, j) != 0.0;
      const bool in_est = estimate(i, j) != 0.0;
      tp += in_ref && in_est;
      fp += !in_ref && in_est;
      fn += in_ref && !in_est;
    }
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

}  // namespace bfcs
