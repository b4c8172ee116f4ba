#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "pacs/numerics.hpp"
#include "pacs/profiles.hpp"
#include "pacs/sensing.hpp"
#include "pacs/solver.hpp"

namespace pacs {

/// Constants of the dual certificate conditions (i)-(v).
struct CertificateParams {
  Real alpha = 0.25;
  Real beta = 1.0;
  Real gamma = 0.25;
  Real theta = 0.5;
  Real sigma = 8.0;

  /// theta + beta gamma / (1 - alpha); must be < 1 (and alpha < 1).
  Real combined() const;
  bool admissible() const;
};

struct GolfingSchedule {
  Index L = 0;
  std::vector<Real> a;
  std::vector<Real> b;
  std::vector<Index> p;

  Index total_rows() const;
};

/// L = 2 + ceil(log2 sqrt(s)), a and b per block, p_l = floor(p / (2(L-2)))
/// for l >= 3 and the remainder split between the first two blocks (p_1
/// takes the odd row).
GolfingSchedule golfing_schedule(Index s, Index p);

/// A_l = (1/sqrt(p_l)) sum_{i in block l} e_i (x) B_i^*, together with the
/// rows of A it came from.
struct GolfingBlock {
  CMat A;
  std::vector<Index> rows;
  Index draws = 0;
};

/// Splits the draws of `system` into consecutive blocks of p_l draws.
std::vector<GolfingBlock> split_blocks(const ParallelSystem& system, const GolfingSchedule& schedule);

struct GolfingResult {
  CVec rho;
  /// xi in C^m with rho = A^* xi.
  CVec xi;
  /// v^(0), ..., v^(L).
  std::vector<CVec> v;
};

/// rho^(l) = A_l^* A_l P_Delta v^(l-1) + rho^(l-1) with v^(l) = sgn(P_Delta x)
/// - P_Delta rho^(l); xi accumulates sqrt(p/p_l) A_l v^(l-1) on the rows of
/// block l.
GolfingResult golfing_construct(const std::vector<GolfingBlock>& blocks, Index m, Index total_draws,
                                const std::vector<Index>& delta, const CVec& x);

struct ConditionValue {
  Real value = 0.0;
  Real threshold = 0.0;
  bool pass = false;
};

struct CertificateReport {
  /// (i) ||P_D A^*A P_D - P_D||_2, (ii) max_{i not in D} ||P_D A^*A e_i||_2,
  /// (iii) ||P_D rho - sgn(P_D x)||_2, (iv) ||P_D^perp rho||_inf,
  /// (v) ||xi||_2 / sqrt|D| against sigma.
  ConditionValue cond[5];
  Real combined = 0.0;
  bool combined_pass = false;
  bool valid = false;

  Real measured_sigma() const { return cond[4].value; }
  nlohmann::json to_json() const;
};

CertificateReport check_conditions(const CMat& A, const std::vector<Index>& delta, const CVec& x, const CVec& rho,
                                   const CVec& xi, const CertificateParams& params = {});

struct EventReport {
  /// Left-hand side and pass flag of A_l, B_l for each block.
  std::vector<ConditionValue> A;
  std::vector<ConditionValue> B;
  ConditionValue C;
  ConditionValue D;
  bool all() const;
  nlohmann::json to_json() const;
};

EventReport check_events(const std::vector<GolfingBlock>& blocks, const CMat& A, const std::vector<Index>& delta,
                         const GolfingSchedule& schedule, const std::vector<CVec>& v);

/// Right-hand sides of the bounds implied by the events: sqrt(s) prod a_l for
/// (iii), sum_l b_l prod_{j<l} a_j for (iv) and
/// sqrt(s p) sum_l sqrt((a_l + 1)/p_l) prod_{j<l} a_j for ||xi||_2.
struct ChainBounds {
  Real cond3 = 0.0;
  Real cond4 = 0.0;
  Real xi = 0.0;
};
ChainBounds chain_bounds(const GolfingSchedule& schedule, Index s);

/// A realized golfing instance: identical sampling with p draws of C rows,
/// a support Delta holding s/C indices in each contiguous level, and x with
/// unit-modulus entries on Delta.
struct CertificateSetup {
  Index n = 32;
  Index num_sensors = 4;
  Index s = 4;
  Index draws = 64;
  /// "dft_iid" (DFT atoms drawn with replacement) or "gaussian".
  std::string ensemble = "dft_iid";
  ProfileFamily family = ProfileFamily::PiecewiseConstant;
  std::uint64_t seed = 1;
  CertificateParams params;
};

struct CertificateOutcome {
  std::vector<Index> delta;
  CVec x;
  GolfingSchedule schedule;
  GolfingResult golfing;
  CertificateReport report;
  EventReport events;
  ChainBounds chains;
  SolverResult solve;
  Real recovery_error = 0.0;

  nlohmann::json to_json() const;
};

CertificateOutcome run_certificate_instance(const CertificateSetup& setup, const SolverConfig& solver = {});

}  // namespace pacs
