#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "pacs/config.hpp"
#include "pacs/profiles.hpp"
#include "pacs/solver.hpp"

namespace pacs {

enum class EnsembleKind { Dft, DftDecimated, Gaussian };
std::string to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(const std::string& name);

struct ExperimentConfig {
  Index n = 128;
  Index num_sensors = 2;
  SamplingMode mode = SamplingMode::Distinct;
  EnsembleKind ensemble = EnsembleKind::Dft;
  ProfileFamily family = ProfileFamily::BandedCosine;
  /// almost_identical gains (real).
  std::vector<Real> gains;
  /// "sparse" or "clustered".
  std::string signal_model = "sparse";
  Real cluster_lambda = 1.0;
  Index delta_resolution = 49;
  Index kappa_resolution = 49;
  /// Explicit axes; override the uniform (i+1)/(res+1) grid when nonempty.
  std::vector<Real> deltas;
  std::vector<Real> kappas;
  Index trials = 20;
  Real tol = 1e-3;
  Real eta = 0.0;
  std::uint64_t seed = 1;
  /// Share signal draws across runs that differ only in C.
  bool paired = false;
  SolverConfig solver;

  void validate() const;
  std::vector<Real> delta_axis() const;
  std::vector<Real> kappa_axis() const;

  static ExperimentConfig from_config(const Config& cfg);
  static const std::set<std::string>& known_keys();
};

struct PhaseCell {
  Index i = 0;
  Index j = 0;
  Real delta = 0.0;
  Real kappa = 0.0;
  /// Total measurements m = C round(delta N) and sparsity s = round(kappa N),
  /// each clamped to at least 1.
  Index m = 0;
  Index s = 0;
  Index trials = 0;
  Index successes = 0;
  bool skipped = false;
  bool clamped = false;

  Real fraction() const { return trials > 0 && !skipped ? static_cast<Real>(successes) / static_cast<Real>(trials) : 0.0; }
  bool operator==(const PhaseCell& other) const;
};

/// Cells in row-major order: i indexes delta, j indexes kappa.
struct PhaseGrid {
  Index rows = 0;
  Index cols = 0;
  std::vector<PhaseCell> cells;

  const PhaseCell& at(Index i, Index j) const { return cells[static_cast<std::size_t>(i * cols + j)]; }
  bool operator==(const PhaseGrid& other) const { return rows == other.rows && cols == other.cols && cells == other.cells; }
};

/// Per-cell measurement and sparsity for the given axis values.
PhaseCell plan_cell(const ExperimentConfig& config, Index i, Index j, Real delta, Real kappa);

struct TrialOutcome {
  bool success = false;
  Real relative_error = 0.0;
  SolverResult solve;
};

/// One seeded recovery trial; exposed so single cells can be replayed.
TrialOutcome run_trial(const ExperimentConfig& config, const PhaseCell& cell, Index trial);

/// Runs every cell with `workers` threads (0 = hardware concurrency). The
/// result does not depend on the worker count.
PhaseGrid run_phase_transition(const ExperimentConfig& config, unsigned workers = 1);

/// Mean success fraction (percent) over non-skipped cells with delta < delta_max.
Real avgp(const PhaseGrid& grid, Real delta_max);

std::string to_csv(const PhaseGrid& grid);
PhaseGrid from_csv(const std::string& text);
void export_csv(const PhaseGrid& grid, const std::string& path);
PhaseGrid import_csv(const std::string& path);

}  // namespace pacs
