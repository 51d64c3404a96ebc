#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bfcs {

using Matrix = Eigen::MatrixXd;

// N x L image of amplitudes; the unknown X and every iterate.
using Signal2D = Matrix;
// M x N sensing operator applied column-wise.
using SensingMatrix = Matrix;
// M x L matrix with entries in {-1, +1}.
using BinaryMeasurements = Matrix;

struct Coord {
  int row = 0;
  int col = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when an iterative projection exhausts its caps; carries the best
// iterate found and the remaining constraint residual.
class ProjectionError : public std::runtime_error {
 public:
  ProjectionError(const std::string& what, std::vector<double> best_iterate,
                  double residual)
      : std::runtime_error(what),
        best(std::move(best_iterate)),
        residual(residual) {}

  std::vector<double> best;
  double residual = 0.0;
};

// Thrown when a solver ends on an identically zero iterate.
class RecoveryFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(name) + ": non-finite entry");
  }
}

}  // namespace bfcs
