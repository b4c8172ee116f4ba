#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "pacs/numerics.hpp"
#include "pacs/profiles.hpp"
#include "pacs/rng.hpp"

namespace pacs {

/// Row distribution F on C^N. A measurement row is a^* for a ~ F.
class Ensemble {
 public:
  enum class Kind { SubsampledDft, Gaussian, ExplicitAtoms };

  /// Atoms sqrt(N) conj(Phi_k), k = 0..N-1, drawn uniformly without
  /// replacement.
  static Ensemble subsampled_dft(Index n);
  /// Atoms on the C-fold downsampled time grid t = kC, k = 0..N/C-1: the row
  /// a^* is sqrt(N) times row t of Phi^*. Requires C | N.
  static Ensemble decimated_dft(Index n, Index factor);
  /// Real i.i.d. N(0, 1) entries.
  static Ensemble gaussian(Index n);
  /// Finite distribution, drawn i.i.d. with replacement.
  static Ensemble explicit_atoms(std::vector<CVec> atoms, std::vector<Real> probabilities);

  Kind kind() const { return kind_; }
  Index dimension() const { return n_; }
  /// 1 for the full DFT grid.
  Index decimation() const { return decimation_; }
  bool is_finite() const { return kind_ != Kind::Gaussian; }
  bool with_replacement() const { return kind_ == Kind::ExplicitAtoms; }

  Index num_atoms() const;
  CVec atom(Index k) const;
  Real probability(Index k) const;

  std::string describe() const;

 private:
  Ensemble() = default;

  Kind kind_ = Kind::Gaussian;
  Index n_ = 0;
  Index decimation_ = 1;
  std::vector<CVec> atoms_;
  std::vector<Real> probabilities_;
};

/// Spectral norm of E(aa^*) - I, exact for finite ensembles.
Real isotropy_deviation(const Ensemble& ensemble);

/// Sample average of aa^* over `samples` independent draws.
CMat empirical_second_moment(const Ensemble& ensemble, Index samples, Generator& gen);

/// Rows a_1^*, ..., a_k^* drawn from the ensemble (unscaled). Atom indices
/// are written to `indices` for finite ensembles.
CMat draw_rows(const Ensemble& ensemble, Index k, Generator& gen, std::vector<Index>* indices = nullptr);

struct ParallelSystem {
  SamplingMode mode = SamplingMode::Distinct;
  SensorProfile profiles;
  /// Rows per sensor block A_c.
  std::vector<Index> block_rows;
  /// Unscaled draws: one matrix per sensor (distinct) or a single shared
  /// matrix of p = m/C rows (identical). Row i holds a_i^*.
  std::vector<CMat> draws;
  /// Atom indices of the draws, empty for Gaussian ensembles.
  std::vector<std::vector<Index>> atom_indices;
  /// Global factor 1/sqrt(m) (distinct) or 1/sqrt(m/C) (identical), already
  /// applied to A.
  Real scale = 1.0;
  CMat A;

  Index rows() const { return A.rows(); }
  Index cols() const { return A.cols(); }
  Index num_sensors() const { return profiles.num_sensors(); }
  Index block_offset(Index c) const;
  CMat block(Index c) const { return A.middleRows(block_offset(c), block_rows[static_cast<std::size_t>(c)]); }

  /// Independent draws making up A: m single rows (distinct) or m/C groups
  /// of C rows (identical).
  Index num_draws() const;
  /// Rows of A generated by draw i.
  std::vector<Index> rows_of_draw(Index i) const;
};

/// Builds A. Distinct: row_counts = {m_1, ..., m_C} and `ensembles` holds
/// either one shared ensemble or one per sensor. Identical: row_counts = {m}
/// with C | m and a single ensemble.
ParallelSystem assemble(SamplingMode mode, const std::vector<Ensemble>& ensembles, const SensorProfile& profiles,
                        const std::vector<Index>& row_counts, const RngStream& rng);

struct NoNoise {};
struct GaussianNoise {
  Real sigma;
};
struct FixedNoise {
  CVec e;
};
using NoiseModel = std::variant<NoNoise, GaussianNoise, FixedNoise>;

struct MeasurementSet {
  CVec y;
  Real eta = 0.0;
};

/// y = Ax + e. Gaussian noise is complex circular with E|e_i|^2 = sigma^2.
MeasurementSet measure(const ParallelSystem& system, const CVec& x, const NoiseModel& noise, Generator& gen);

/// Interleaved re,im columns, one matrix row per line.
void write_matrix_csv(const std::string& path, const CMat& m);

/// Scenario, ensemble, dimensions and row counts (no matrix data).
nlohmann::json system_descriptor(const ParallelSystem& system, const std::vector<Ensemble>& ensembles,
                                 const RngStream& rng);

}  // namespace pacs
