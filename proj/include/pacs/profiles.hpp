#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pacs/numerics.hpp"
#include "pacs/rng.hpp"
#include "pacs/signals.hpp"

namespace pacs {

/// Distinct sampling requires (1/C) sum_c H_c^* H_c = I, identical sampling
/// requires sum_c H_c^* H_c = I.
enum class SamplingMode { Distinct, Identical };

enum class ProfileKind { Diagonal, Circulant, Dense };

enum class ProfileFamily {
  Nonoverlapping,
  AlmostIdentical,
  ComplexUnit,
  PiecewiseConstant,
  BandedCosine,
  CirculantFilter,
  CirculantUnitEigen,
  DftLike,
  Repeated,
  Custom,
};

std::string to_string(SamplingMode mode);
std::string to_string(ProfileKind kind);
std::string to_string(ProfileFamily family);
SamplingMode parse_sampling_mode(const std::string& name);
ProfileFamily parse_profile_family(const std::string& name);

/// Sensor profile matrices H_1, ..., H_C acting on C^N. Diagonal profiles
/// store the diagonals, circulant profiles the filters (first columns), dense
/// profiles the full matrices.
class SensorProfile {
 public:
  SensorProfile() = default;
  static SensorProfile diagonal(std::vector<CVec> diagonals, ProfileFamily family = ProfileFamily::Custom);
  static SensorProfile circulant(std::vector<CVec> filters, ProfileFamily family = ProfileFamily::Custom);
  static SensorProfile dense(std::vector<CMat> blocks, ProfileFamily family = ProfileFamily::Custom);

  ProfileKind kind() const { return kind_; }
  ProfileFamily family() const { return family_; }
  Index num_sensors() const { return num_sensors_; }
  Index dimension() const { return dim_; }

  /// Diagonal entries (diagonal kind) or filter (circulant kind) of sensor c.
  const CVec& vector_data(Index c) const { return vectors_[static_cast<std::size_t>(c)]; }
  const CMat& dense_block(Index c) const { return blocks_[static_cast<std::size_t>(c)]; }

  /// Dense H_c.
  CMat matrix(Index c) const;
  /// H_c v.
  CVec apply(Index c, const CVec& v) const;
  /// H_c^* v.
  CVec apply_adjoint(Index c, const CVec& v) const;
  /// M H_c for a matrix M with N columns.
  CMat right_multiply(const CMat& m, Index c) const;

  /// Eigenvalues sqrt(N) Phi h_c of a circulant profile.
  CVec eigenvalues(Index c) const;

  bool operator==(const SensorProfile& other) const;

 private:
  ProfileKind kind_ = ProfileKind::Diagonal;
  ProfileFamily family_ = ProfileFamily::Custom;
  Index num_sensors_ = 0;
  Index dim_ = 0;
  std::vector<CVec> vectors_;
  std::vector<CMat> blocks_;
};

/// Inputs for build_profile. Only the fields used by the requested family are
/// read.
struct ProfileParams {
  Index num_sensors = 1;
  Index dimension = 1;
  SamplingMode mode = SamplingMode::Distinct;
  /// Levels I_1..I_C for nonoverlapping / piecewise_constant. Defaults to the
  /// contiguous partition when absent.
  std::optional<Partition> partition;
  /// Sensor gains for almost_identical.
  std::vector<Complex> gains;
  /// Common unit-modulus diagonal H for almost_identical (identity if empty).
  CVec base_diagonal;
  /// C x C mixing matrix V for piecewise_constant (DFT mixing if empty).
  CMat mixing;
  /// Raw filters for circulant_filter.
  std::vector<CVec> filters;
  /// Seed source for random families (complex_unit, circulant_unit_eigen).
  std::optional<RngStream> rng;
};

SensorProfile build_profile(ProfileFamily family, const ProfileParams& params);

struct IsometryReport {
  Real max_deviation = 0.0;
  bool pass = false;
};

/// Entrywise max |M - I| where M = (1/C) sum H_c^* H_c (distinct) or
/// sum H_c^* H_c (identical).
IsometryReport check_isometry(const SensorProfile& profile, SamplingMode mode, Real tol = 1e-10);

/// Rescales each coordinate so that the isometry holds exactly. Throws
/// DomainError if some coordinate carries no profile mass.
SensorProfile normalize_to_isometry(const std::vector<CVec>& raw_diagonals, SamplingMode mode,
                                    ProfileFamily family = ProfileFamily::Custom);

/// Spectral analogue for circulant profiles: rescales every frequency.
SensorProfile normalize_circulant_to_isometry(const std::vector<CVec>& raw_filters, SamplingMode mode,
                                              ProfileFamily family = ProfileFamily::Custom);

struct ProfileNorms {
  /// ||H_c||_inf (induced, i.e. max absolute row sum).
  std::vector<Real> inf_norm;
  /// restricted[c][d] = ||H_c P_{I_d}||_inf; empty without a partition.
  std::vector<std::vector<Real>> restricted;
  /// ||h_c||_1 for circulant profiles.
  std::vector<Real> filter_l1;
  /// ||Lambda_c||_inf for circulant profiles.
  std::vector<Real> eigen_inf;
};

ProfileNorms profile_norms(const SensorProfile& profile, const std::optional<Partition>& partition = std::nullopt);

/// Unitary DFT mixing V_{cd} = exp(-2 pi i cd / C) / sqrt(C).
CMat dft_mixing(Index num_sensors);
/// Circulant mixing V_{cd} = w_{(c - d) mod C}.
CMat circulant_mixing(const CVec& w);
/// Distinct mode: columns l2-normalised. Identical mode: V^* V = I.
bool is_valid_mixing(const CMat& v, SamplingMode mode, Real tol = 1e-10);

/// {kind, family, C, N, data}; data holds one interleaved [re, im, ...] array
/// per sensor (row-major for dense blocks).
nlohmann::json profile_to_json(const SensorProfile& profile);
SensorProfile profile_from_json(const nlohmann::json& doc);

}  // namespace pacs
