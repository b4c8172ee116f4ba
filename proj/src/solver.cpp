#include "pacs/solver.hpp"

#include <algorithm>
#include <cmath>

#include "pacs/errors.hpp"

namespace pacs {

void SolverConfig::validate() const {
  if (max_iterations < 1) throw DomainError("solver: max_iterations must be at least 1");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(feas_tol > 0.0)) throw DomainError("solver: tolerances must be positive");
  if (!(rho > 0.0)) throw DomainError("solver: rho must be positive");
  if (!(alpha >= 1.0 && alpha <= 1.8)) throw DomainError("solver: alpha must lie in [1, 1.8]");
  if (check_every < 1) throw DomainError("solver: check_every must be at least 1");
}

std::string to_string(SolverStatus status) { return status == SolverStatus::Converged ? "converged" : "max_iter"; }

CVec soft_threshold(const CVec& t, Real kappa) {
  CVec out(t.size());
  for (Index i = 0; i < t.size(); ++i) {
    const Real mag = std::abs(t(i));
    out(i) = mag > kappa ? t(i) * (1.0 - kappa / mag) : Complex(0.0, 0.0);
  }
  return out;
}

namespace {

CVec project_ball(const CVec& w, Real eta) {
  const Real norm = w.norm();
  return norm > eta ? CVec(w * (eta / norm)) : w;
}

// Least-squares refit on the support of the ADMM iterate.
bool polish(const CMat& A, const CVec& y, SolverResult& result) {
  const Index n = A.cols();
  const Real peak = norm_inf(result.x);
  if (peak == 0.0) return false;
  std::vector<Index> supp;
  for (Index j = 0; j < n; ++j)
    if (std::abs(result.x(j)) > 1e-6 * peak) supp.push_back(j);
  if (static_cast<Index>(supp.size()) > A.rows()) return false;
  CMat sub(A.rows(), static_cast<Index>(supp.size()));
  for (std::size_t k = 0; k < supp.size(); ++k) sub.col(static_cast<Index>(k)) = A.col(supp[k]);
  Eigen::ColPivHouseholderQR<CMat> qr(sub);
  if (qr.rank() < sub.cols()) return false;
  const CVec coef = qr.solve(y);
  CVec candidate = CVec::Zero(n);
  for (std::size_t k = 0; k < supp.size(); ++k) candidate(supp[k]) = coef(static_cast<Index>(k));

  const Real slack = (A * candidate - y).norm();
  const Real l1 = norm1(candidate);
  const Real scale = std::max(1.0, y.norm());
  if (slack > 1e-9 * scale) return false;
  if (l1 > result.objective * (1.0 + 1e-6) + 1e-12) return false;
  if ((candidate - result.x).norm() > 1e-3 * std::max(1.0, result.x.norm())) return false;
  result.x = candidate;
  result.objective = l1;
  result.slack = slack;
  result.polished = true;
  return true;
}

}  // namespace

SolverResult bpdn_solve(const CMat& A, const CVec& y, Real eta, const SolverConfig& config) {
  config.validate();
  const Index m = A.rows();
  const Index n = A.cols();
  if (y.size() != m) throw DomainError("bpdn_solve: y length differs from the row count of A");
  if (!(eta >= 0.0)) throw DomainError("bpdn_solve: eta must be nonnegative");

  SolverResult result;
  if (y.norm() <= eta) {
    result.x = CVec::Zero(n);
    result.status = SolverStatus::Converged;
    result.slack = y.norm();
    return result;
  }

  const Real rho = config.rho;
  const Real alpha = config.alpha;
  const CMat gram = A.adjoint() * A;
  CMat system = gram;
  system.diagonal().array() += rho;
  const Eigen::LLT<CMat> llt(system);
  const CMat inverse = llt.solve(CMat::Identity(n, n));
  const CVec aty = A.adjoint() * y;
  const Real sqrt_n = std::sqrt(static_cast<Real>(n));
  const Real sqrt_nm = std::sqrt(static_cast<Real>(n + m));

  CVec z = CVec::Zero(n), v1 = CVec::Zero(n), u1 = CVec::Zero(n);
  bool converged = false;
  Index it = 0;

  // Residual tests passed: finalise the iterate and keep it only if it meets
  // the constraint to within feas_tol.
  auto finish = [&](const CVec& iterate) {
    result.x = iterate;
    result.objective = norm1(iterate);
    result.slack = (A * iterate - y).norm();
    result.polished = false;
    if (eta == 0.0 && config.polish) polish(A, y, result);
    return result.slack <= eta + config.feas_tol;
  };

  if (eta == 0.0) {
    // w is pinned to 0, so the ball block only enters through q = A^* u2 and
    // every update stays in C^N.
    CVec q = CVec::Zero(n);
    for (it = 1; it <= config.max_iterations; ++it) {
      z = inverse * (rho * (v1 - u1) + aty - q);
      const CVec v1_old = v1;
      const CVec h1 = alpha * z + (1.0 - alpha) * v1;
      v1 = soft_threshold(h1 + u1, 1.0 / rho);
      u1 += h1 - v1;
      const CVec gz = gram * z;
      q += alpha * (gz - aty);

      if (it % config.check_every == 0 || it == config.max_iterations) {
        const CVec az = A * z;
        const Real r_ball = (az - y).norm();
        const Real r_copy = (z - v1).norm();
        result.primal_residual = std::hypot(r_copy, r_ball);
        result.dual_residual = rho * (v1 - v1_old).norm();
        const Real eps_pri = sqrt_nm * config.abs_tol +
                             config.rel_tol * std::max(std::hypot(z.norm(), az.norm()), std::hypot(v1.norm(), y.norm()));
        const Real eps_dual = sqrt_n * config.abs_tol + config.rel_tol * (rho * u1 + q).norm();
        if (result.primal_residual <= eps_pri && result.dual_residual <= eps_dual && finish(z)) {
          converged = true;
          break;
        }
      }
    }
  } else {
    CVec v2 = CVec::Zero(m), u2 = CVec::Zero(m);
    for (it = 1; it <= config.max_iterations; ++it) {
      z = inverse * (rho * (v1 - u1) + A.adjoint() * (y + v2 - u2));
      const CVec az = A * z;
      const CVec v1_old = v1, v2_old = v2;
      const CVec h1 = alpha * z + (1.0 - alpha) * v1;
      const CVec h2 = alpha * az + (1.0 - alpha) * (v2 + y);
      v1 = soft_threshold(h1 + u1, 1.0 / rho);
      v2 = project_ball(h2 - y + u2, eta);
      u1 += h1 - v1;
      u2 += h2 - y - v2;

      if (it % config.check_every == 0 || it == config.max_iterations) {
        result.primal_residual = std::hypot((z - v1).norm(), (az - y - v2).norm());
        result.dual_residual = (rho * (v1 - v1_old) + A.adjoint() * (v2 - v2_old)).norm();
        const Real eps_pri = sqrt_nm * config.abs_tol +
                             config.rel_tol * std::max(std::hypot(z.norm(), az.norm()), std::hypot(v1.norm(), (v2 + y).norm()));
        const Real eps_dual = sqrt_n * config.abs_tol + config.rel_tol * (rho * u1 + A.adjoint() * u2).norm();
        if (result.primal_residual <= eps_pri && result.dual_residual <= eps_dual && finish(z)) {
          converged = true;
          break;
        }
      }
    }
  }

  result.iterations = std::min(it, config.max_iterations);
  result.status = converged ? SolverStatus::Converged : SolverStatus::MaxIter;
  if (!converged) finish(z);
  return result;
}

SolverResult bpdn_solve(const ParallelSystem& system, const MeasurementSet& meas, const SolverConfig& config) {
  return bpdn_solve(system.A, meas.y, meas.eta, config);
}

bool recovery_success(const CVec& x, const CVec& xhat, Real tol) {
  if (x.size() != xhat.size()) throw DomainError("recovery_success: length mismatch");
  const Real ref = x.norm();
  if (!(ref > 0.0)) throw DomainError("recovery_success: reference signal is zero");
  return (x - xhat).norm() / ref < tol;
}

}  // namespace pacs
