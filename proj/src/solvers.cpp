#include "bfcs/solvers.hpp"

#include <cmath>

#include "bfcs/model.hpp"
#include "bfcs/projections.hpp"

namespace bfcs {

namespace {

double worst_normalized_tv(const Signal2D& x) {
  double worst = 0.0;
  for (const Component& comp : connected_components(x).components) {
    worst =
        std::max(worst, normalized_tv(component_values(x, comp), comp.edges));
  }
  return worst;
}

}  // namespace

SolveResult solve(const SensingMatrix& a, const BinaryMeasurements& y,
                  const SolverConfig& config) {
  const auto n = a.cols();
  const auto l = y.cols();
  if (y.rows() != a.rows()) {
    throw DimensionMismatch("solve: Y rows must match A rows");
  }
  if (config.tau <= 0.0) throw InvalidInput("solve: tau must be positive");
  if (config.max_iters < 1) throw InvalidInput("solve: max_iters must be >= 1");
  if (config.sparsity < 1 || config.sparsity > n * l) {
    throw InvalidInput("solve: K out of range");
  }
  if (config.variant != SolverVariant::Biht && !(config.epsilon >= 0.0)) {
    throw InvalidInput("solve: epsilon required for TV/MTV variants");
  }

  Signal2D x;
  if (config.initial.size() > 0) {
    if (config.initial.rows() != n || config.initial.cols() != l) {
      throw DimensionMismatch("solve: initial iterate shape mismatch");
    }
    x = config.initial;
  } else if (config.barrier == BarrierKind::OneSidedL1) {
    x = Signal2D::Zero(n, l);
  } else {
    // Zero is a stationary point of the one-sided l2 barrier, so the l2
    // default start is the normalized back-projection A^T Y.
    x = a.transpose() * y;
    const double norm = x.norm();
    if (norm > 0.0) x /= norm;
  }

  GraphTvWarmStart tv_warm;
  SolverTrace trace;
  trace.reason = Termination::MaxIters;
  for (int k = 0; k < config.max_iters; ++k) {
    const Signal2D previous = x;
    Signal2D v = x - config.tau * subgradient(config.barrier, a, x, y);
    // The residual of the constrained projection stage's output: grid TV for
    // FBCS-TV (measured before the subsequent K-sparse step, which does not
    // preserve TV feasibility), worst component normalized TV for FBCS-MTV.
    double residual = 0.0;
    switch (config.variant) {
      case SolverVariant::Biht:
        x = project_k_sparse(v, config.sparsity);
        break;
      case SolverVariant::FbcsTv:
        if (!std::isinf(config.epsilon)) {
          v = project_tv_ball(v, config.epsilon, config.projection_tol,
                              &tv_warm);
        }
        residual = tv(v);
        x = project_k_sparse(v, config.sparsity);
        break;
      case SolverVariant::FbcsMtv:
        x = project_fused(v, config.sparsity, config.epsilon,
                          config.projection_tol);
        residual = worst_normalized_tv(x);
        break;
    }
    if (config.nonneg) x = project_nonneg(x);

    IterationRecord record;
    record.barrier = barrier_value(config.barrier, consistency(a, x, y));
    record.constraint_residual = residual;
    record.change_norm = (x - previous).norm();
    trace.iterations.push_back(record);

    const double denom = std::max(previous.norm(), 1e-12);
    if (record.change_norm / denom < config.rel_change_tol) {
      trace.reason = Termination::RelChange;
      break;
    }
  }

  trace.final_iterate = x;
  const double norm = x.norm();
  if (norm == 0.0) {
    throw RecoveryFailure("solve: final iterate is identically zero");
  }
  return SolveResult{x / norm, std::move(trace)};
}

double default_step_size(BarrierKind kind, int m) {
  if (m < 1) throw InvalidInput("default_step_size: M must be >= 1");
  return kind == BarrierKind::OneSidedL1 ? 1.0 : 1.0 / m;
}

}  // namespace bfcs
