#pragma once

#include <string>

#include "pacs/numerics.hpp"
#include "pacs/sensing.hpp"

namespace pacs {

struct SolverConfig {
  Index max_iterations = 5000;
  Real abs_tol = 1e-7;
  Real rel_tol = 1e-5;
  /// Convergence also requires ||Ax - y||_2 <= eta + feas_tol.
  Real feas_tol = 1e-6;
  /// Penalty on the z = v copy; the ball block uses penalty 1, so the cached
  /// system matrix is A^*A + rho I.
  Real rho = 1.0;
  /// Over-relaxation factor in [1, 1.8].
  Real alpha = 1.5;
  /// Residuals are evaluated exactly every `check_every` iterations.
  Index check_every = 10;
  /// For eta = 0, re-fit on the detected support by least squares and keep
  /// the result when it is feasible and no worse in l1.
  bool polish = true;

  void validate() const;
};

enum class SolverStatus { Converged, MaxIter };
std::string to_string(SolverStatus status);

struct SolverResult {
  CVec x;
  SolverStatus status = SolverStatus::MaxIter;
  Index iterations = 0;
  Real primal_residual = 0.0;
  Real dual_residual = 0.0;
  /// ||x||_1.
  Real objective = 0.0;
  /// ||Ax - y||_2.
  Real slack = 0.0;
  bool polished = false;
};

/// min ||z||_1 subject to ||Az - y||_2 <= eta, by over-relaxed ADMM on the
/// splitting z = v, Az - y = w, ||w||_2 <= eta.
SolverResult bpdn_solve(const CMat& A, const CVec& y, Real eta, const SolverConfig& config = {});
SolverResult bpdn_solve(const ParallelSystem& system, const MeasurementSet& meas, const SolverConfig& config = {});

/// Entrywise t max(0, 1 - kappa/|t|).
CVec soft_threshold(const CVec& t, Real kappa);

/// ||x - xhat||_2 / ||x||_2 < tol.
bool recovery_success(const CVec& x, const CVec& xhat, Real tol = 1e-3);

}  // namespace pacs
