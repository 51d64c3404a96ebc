#pragma once

#include <limits>
#include <vector>

#include "bfcs/barriers.hpp"
#include "bfcs/types.hpp"

namespace bfcs {

enum class SolverVariant { Biht, FbcsTv, FbcsMtv };

struct SolverConfig {
  BarrierKind barrier = BarrierKind::OneSidedL2;
  SolverVariant variant = SolverVariant::Biht;
  double tau = 1.0;
  int sparsity = 1;  // K
  double epsilon = std::numeric_limits<double>::infinity();
  int max_iters = 300;
  double rel_change_tol = 1e-6;
  bool nonneg = false;
  double projection_tol = 1e-6;
  Signal2D initial;  // empty -> default start (see solve)
};

struct IterationRecord {
  double barrier = 0.0;              // f(Y (.) (A X_k)) at the new iterate
  // Residual of the constrained projection stage's output: grid TV of the
  // TV-ball projection result for FbcsTv, worst component normalized TV of
  // the fused projection result for FbcsMtv, 0 for Biht.
  double constraint_residual = 0.0;
  double change_norm = 0.0;          // ||X_k - X_{k-1}||
};

enum class Termination { RelChange, MaxIters };

struct SolverTrace {
  std::vector<IterationRecord> iterations;
  Termination reason = Termination::MaxIters;
  Signal2D final_iterate;  // last X_k before sphere normalization
};

struct SolveResult {
  Signal2D signal;  // final iterate divided by its norm
  SolverTrace trace;
};

// Forward-backward splitting loop shared by the three variants: subgradient
// step on the barrier, then the variant's constraint projection
//   Biht:    P_{Sigma_K}
//   FbcsTv:  P_{Sigma_K} ( P_{T_eps} ( . ) )   (TV ball first)
//   FbcsMtv: fused projection onto F^K_eps
// with an optional nonnegativity projection appended each iteration.
SolveResult solve(const SensingMatrix& a, const BinaryMeasurements& y,
                  const SolverConfig& config);

// Paper step sizes: 1 for the l1 barrier, 1/M for the l2 barrier.
double default_step_size(BarrierKind kind, int m);

}  // namespace bfcs
