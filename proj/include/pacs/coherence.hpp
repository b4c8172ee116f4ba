#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pacs/numerics.hpp"
#include "pacs/profiles.hpp"
#include "pacs/sensing.hpp"
#include "pacs/signals.hpp"

namespace pacs {

/// Finite distribution over N x D blocks B. D = 1 for vector ensembles
/// (B = a), D = C for identical sampling (B = [H_1^* a | ... | H_C^* a]).
struct BlockDistribution {
  std::vector<CMat> blocks;
  std::vector<Real> probabilities;
  std::string label;

  Index dimension() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  Index width() const { return blocks.empty() ? 0 : blocks.front().cols(); }
  Index size() const { return static_cast<Index>(blocks.size()); }
  /// E(BB^*).
  CMat second_moment() const;
};

/// Atoms of a finite ensemble. Throws CoherenceUndefined for Gaussian rows.
BlockDistribution atom_distribution(const Ensemble& ensemble);
/// F_c: a_c = H_c^* a with a drawn from the ensemble.
BlockDistribution sensor_distribution(const Ensemble& ensemble, const SensorProfile& profiles, Index c);
/// Distinct sampling: mixture of F_1..F_C with weights m_c / m.
BlockDistribution distinct_distribution(const std::vector<Ensemble>& ensembles, const SensorProfile& profiles,
                                        const std::vector<Index>& row_counts);
/// Identical sampling: B = [H_1^* a | ... | H_C^* a].
BlockDistribution identical_distribution(const Ensemble& ensemble, const SensorProfile& profiles);
/// k i.i.d. draws with equal weights (Monte Carlo stand-in for unbounded
/// ensembles).
BlockDistribution sampled_distribution(const Ensemble& ensemble, Index k, Generator& gen);

enum class Method { Exact, Bound, MonteCarlo };
std::string to_string(Method method);

struct CoherenceReport {
  std::string quantity;
  Real value = 0.0;
  Method method = Method::Exact;
  Index samples = 0;
  /// Bracket for quantities that are only bounded (Gamma_2, S_c).
  std::optional<Real> lower;
  std::optional<Real> upper;
  std::string context;

  nlohmann::json to_json() const;
};

/// mu(F) = sup ||B||_max^2 (for vectors, ||a||_inf^2).
CoherenceReport mu(const BlockDistribution& dist);
CoherenceReport mu(const Ensemble& ensemble);
/// Monte Carlo variant for unbounded ensembles: 99.9% quantile of
/// ||a||_inf^2 over k draws. Not rigorous.
CoherenceReport mu_monte_carlo(const Ensemble& ensemble, Index k, Generator& gen);

struct LevelCoherence {
  /// mu'_c = sup ||P_{I_c} a||_inf^2.
  std::vector<Real> mu_prime;
  /// mu_c = sqrt(mu * mu'_c).
  std::vector<Real> mu_c;
  Real mu = 0.0;
};
LevelCoherence mu_levels(const BlockDistribution& dist, const Partition& partition);
LevelCoherence mu_levels(const Ensemble& ensemble, const Partition& partition);

enum class GammaMode { Exact, Bound };

struct GammaResult {
  CoherenceReport gamma1;
  CoherenceReport gamma2;
};

/// Exact mode: Gamma_1 = sup ||BB^* P_Delta||_inf, Gamma_2 bracketed by an
/// 8-phase grid search (lower) and min(sum |M_jk|, |Delta| lambda_max(M))
/// (upper). Bound mode: s * max |(BB^*)_ij|, valid for isotropic F.
GammaResult gamma(const BlockDistribution& dist, const std::vector<Index>& delta, GammaMode mode = GammaMode::Exact);

/// Largest |Delta| accepted by exact Gamma_2 and brute-force S_c.
inline constexpr Index kMaxPhaseSearch = 12;

/// Result of maximising z^* M z over |z_j| = 1 with phases restricted to
/// the 8th roots of unity.
struct PhaseSearch {
  Real best = 0.0;
  CVec z;
};
/// Branch and bound over the phase grid. Branches that cannot exceed
/// `incumbent` are pruned (best stays at `incumbent` when nothing beats it).
PhaseSearch phase_grid_max(const CMat& m, Real incumbent = 0.0);

enum class SparsityMode { Bound, BruteForce };

/// S_c relative to a levels scheme. Bound mode: sum_d ||H_c P_{I_d}||_inf^2 s_d
/// (diagonal profiles). Brute force: max of z^* E(a_c a_c^*) z over supports
/// meeting the level constraints and the 8-phase grid, with a_c = H_c^* a for
/// a drawn from `ensemble` (N <= 12).
std::vector<CoherenceReport> relative_sparsity(const SensorProfile& profiles, const LevelScheme& levels,
                                               SparsityMode mode, const std::optional<Ensemble>& ensemble = std::nullopt);

/// sigma(G) = sup N^{-1} ||Phi a||_1^2.
CoherenceReport sigma_g(const Ensemble& ensemble);

/// mu(G, H_1..H_C) = sup max_{i,j} |sum_c (H_c^* a)_i conj((H_c^* a)_j)|.
CoherenceReport mu_joint(const Ensemble& ensemble, const SensorProfile& profiles);
CoherenceReport mu_joint(const BlockDistribution& dist);

/// L = log(N/eps) + log(s) log(s/eps), natural logarithm.
Real log_factor(Index n, Index s, Real eps);

enum class BoundRule { Thm21, Cor31, Cor32, Cor33, Cor34, Cor35, Cor36, Cor41, Cor42, Cor43, Thm41 };
std::string to_string(BoundRule rule);
BoundRule parse_bound_rule(const std::string& name);

/// Inputs for required_measurements. Only the fields used by the rule are
/// read; missing ones raise DomainError.
struct BoundQuery {
  BoundRule rule = BoundRule::Thm21;
  Index n = 0;
  Real eps = 0.05;
  std::optional<Index> s;
  std::optional<LevelScheme> levels;
  Index num_sensors = 1;

  std::optional<Real> d;                  // thm_2_1
  std::optional<Real> gamma;              // thm_2_1
  std::vector<Real> mu_sensors;           // cor_3_1: mu(F_c)
  std::vector<std::vector<Real>> mu_lev;  // cor_3_2: mu_lev[c][d] = mu_d(F_c)
  std::vector<Real> row_fractions;        // cor_3_2: m_d / m
  std::vector<Real> relative_sparsities;  // cor_3_2: S_d
  std::optional<Real> mu_g;               // mu_G = max_c mu(G_c) or mu(G)
  std::vector<Real> inf_norms;            // ||H_c||_inf
  std::vector<std::vector<Real>> restricted;  // ||H_c P_{I_d}||_inf
  std::vector<Real> filter_l1;            // ||h_c||_1
  std::vector<Real> eigen_inf;            // ||Lambda_c||_inf
  std::vector<Real> sigma_g;              // sigma(G_c)
  std::optional<Real> mu_joint;           // cor_4_1
  /// thm_4_1 without a levels scheme: C max s_c = lambda s.
  std::optional<Real> lambda;
};

struct BoundResult {
  BoundRule rule = BoundRule::Thm21;
  /// Right-hand side with the universal constant set to 1.
  Real rhs = 0.0;
  Real log_factor = 0.0;
  /// cor_3_4 only: max_c sum_d ||H_d||_inf ||H_d P_{I_c}||_inf, passes when <= C.
  std::optional<Real> side_value;
  std::optional<bool> side_pass;
  nlohmann::json inputs;

  nlohmann::json to_json() const;
};

BoundResult required_measurements(const BoundQuery& query);

}  // namespace pacs
