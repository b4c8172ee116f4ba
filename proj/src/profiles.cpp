#include "pacs/profiles.hpp"

#include <cmath>
#include <map>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

const std::map<ProfileFamily, std::string>& family_names() {
  static const std::map<ProfileFamily, std::string> names = {
      {ProfileFamily::Nonoverlapping, "nonoverlapping"},
      {ProfileFamily::AlmostIdentical, "almost_identical"},
      {ProfileFamily::ComplexUnit, "complex_unit"},
      {ProfileFamily::PiecewiseConstant, "piecewise_constant"},
      {ProfileFamily::BandedCosine, "banded_cosine"},
      {ProfileFamily::CirculantFilter, "circulant_filter"},
      {ProfileFamily::CirculantUnitEigen, "circulant_unit_eigen"},
      {ProfileFamily::DftLike, "dft_like"},
      {ProfileFamily::Repeated, "repeated"},
      {ProfileFamily::Custom, "custom"},
  };
  return names;
}

// Families are first built in the distinct normalisation; identical mode
// divides by sqrt(C).
Real mode_scale(SamplingMode mode, Index num_sensors) {
  return mode == SamplingMode::Distinct ? 1.0 : 1.0 / std::sqrt(static_cast<Real>(num_sensors));
}

Real mode_divisor(SamplingMode mode, Index num_sensors) {
  return mode == SamplingMode::Distinct ? static_cast<Real>(num_sensors) : 1.0;
}

CVec reversed_filter(const CVec& h) {
  const Index n = h.size();
  CVec r(n);
  for (Index j = 0; j < n; ++j) r(j) = h((n - j) % n);
  return r;
}

Partition partition_or_default(const ProfileParams& params) {
  if (params.partition) {
    if (params.partition->size() != params.dimension || params.partition->num_levels() != params.num_sensors) {
      throw DomainError("profile: partition must have N indices and C levels");
    }
    return *params.partition;
  }
  return contiguous_partition(params.dimension, params.num_sensors);
}

Generator require_rng(const ProfileParams& params, const char* family) {
  if (!params.rng) throw DomainError(std::string("profile family ") + family + " needs a random stream");
  return params.rng->generator();
}

std::vector<CVec> piecewise_diagonals(const CMat& v, const Partition& partition, Real scale) {
  const Index num_sensors = v.rows();
  std::vector<CVec> diagonals(static_cast<std::size_t>(num_sensors), CVec::Zero(partition.size()));
  for (Index c = 0; c < num_sensors; ++c) {
    for (Index d = 0; d < partition.num_levels(); ++d) {
      for (Index j : partition.level(d)) diagonals[static_cast<std::size_t>(c)](j) = scale * v(c, d);
    }
  }
  return diagonals;
}

std::vector<CVec> banded_cosine_raw(Index num_sensors, Index n) {
  std::vector<CVec> raw(static_cast<std::size_t>(num_sensors), CVec::Zero(n));
  const Real width = static_cast<Real>(n) / static_cast<Real>(num_sensors);
  for (Index c = 0; c < num_sensors; ++c) {
    const Real center = (static_cast<Real>(c) + 0.5) * width;
    for (Index j = 0; j < n; ++j) {
      const Real dist = std::abs(static_cast<Real>(j) + 0.5 - center);
      if (dist >= width) continue;
      // Squared amplitudes of neighbouring sensors sum to one in the interior.
      const Real amplitude = std::cos(kPi * dist / (2.0 * width));
      const Real phase = static_cast<Real>(c) * 2.0 * kPi / static_cast<Real>(num_sensors) +
                         static_cast<Real>(j + 1) * 2.0 * kPi / static_cast<Real>(n * num_sensors);
      raw[static_cast<std::size_t>(c)](j) = amplitude * Complex(std::cos(phase), std::sin(phase));
    }
  }
  return raw;
}

}  // namespace

std::string to_string(SamplingMode mode) { return mode == SamplingMode::Distinct ? "distinct" : "identical"; }

std::string to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Diagonal: return "diagonal";
    case ProfileKind::Circulant: return "circulant";
    case ProfileKind::Dense: return "dense";
  }
  return "diagonal";
}

std::string to_string(ProfileFamily family) { return family_names().at(family); }

SamplingMode parse_sampling_mode(const std::string& name) {
  if (name == "distinct") return SamplingMode::Distinct;
  if (name == "identical") return SamplingMode::Identical;
  throw DomainError("unknown sampling mode: " + name);
}

ProfileFamily parse_profile_family(const std::string& name) {
  for (const auto& [family, label] : family_names())
    if (label == name) return family;
  throw DomainError("unknown profile family: " + name);
}

SensorProfile SensorProfile::diagonal(std::vector<CVec> diagonals, ProfileFamily family) {
  if (diagonals.empty()) throw DomainError("profile: at least one sensor required");
  SensorProfile p;
  p.kind_ = ProfileKind::Diagonal;
  p.family_ = family;
  p.num_sensors_ = static_cast<Index>(diagonals.size());
  p.dim_ = diagonals.front().size();
  for (const auto& d : diagonals)
    if (d.size() != p.dim_ || p.dim_ < 1) throw DomainError("profile: diagonals must share a positive length");
  p.vectors_ = std::move(diagonals);
  return p;
}

SensorProfile SensorProfile::circulant(std::vector<CVec> filters, ProfileFamily family) {
  SensorProfile p = diagonal(std::move(filters), family);
  p.kind_ = ProfileKind::Circulant;
  return p;
}

SensorProfile SensorProfile::dense(std::vector<CMat> blocks, ProfileFamily family) {
  if (blocks.empty()) throw DomainError("profile: at least one sensor required");
  SensorProfile p;
  p.kind_ = ProfileKind::Dense;
  p.family_ = family;
  p.num_sensors_ = static_cast<Index>(blocks.size());
  p.dim_ = blocks.front().rows();
  for (const auto& b : blocks)
    if (b.rows() != p.dim_ || b.cols() != p.dim_ || p.dim_ < 1)
      throw DomainError("profile: dense blocks must be N x N");
  p.blocks_ = std::move(blocks);
  return p;
}

CMat SensorProfile::matrix(Index c) const {
  switch (kind_) {
    case ProfileKind::Diagonal: return vector_data(c).asDiagonal();
    case ProfileKind::Circulant: return circulant_matrix(vector_data(c));
    case ProfileKind::Dense: return dense_block(c);
  }
  return {};
}

CVec SensorProfile::apply(Index c, const CVec& v) const {
  switch (kind_) {
    case ProfileKind::Diagonal: return vector_data(c).cwiseProduct(v);
    case ProfileKind::Circulant: return circulant_apply(vector_data(c), v);
    case ProfileKind::Dense: return dense_block(c) * v;
  }
  return {};
}

CVec SensorProfile::apply_adjoint(Index c, const CVec& v) const {
  switch (kind_) {
    case ProfileKind::Diagonal: return vector_data(c).conjugate().cwiseProduct(v);
    // H^* is circulant with filter conj(h(-j)).
    case ProfileKind::Circulant: return circulant_apply(reversed_filter(vector_data(c)).conjugate(), v);
    case ProfileKind::Dense: return dense_block(c).adjoint() * v;
  }
  return {};
}

CMat SensorProfile::right_multiply(const CMat& m, Index c) const {
  if (m.cols() != dim_) throw DomainError("right_multiply: column count differs from N");
  switch (kind_) {
    case ProfileKind::Diagonal: return m * vector_data(c).asDiagonal();
    case ProfileKind::Circulant: {
      // (r H)^T = H^T r^T, and H^T is circulant with the reversed filter.
      const CVec transposed = reversed_filter(vector_data(c));
      CMat out(m.rows(), m.cols());
      for (Index i = 0; i < m.rows(); ++i) out.row(i) = circulant_apply(transposed, m.row(i).transpose()).transpose();
      return out;
    }
    case ProfileKind::Dense: return m * dense_block(c);
  }
  return {};
}

CVec SensorProfile::eigenvalues(Index c) const {
  if (kind_ != ProfileKind::Circulant) throw DomainError("eigenvalues: profile is not circulant");
  return circulant_eigenvalues(vector_data(c));
}

bool SensorProfile::operator==(const SensorProfile& other) const {
  if (kind_ != other.kind_ || family_ != other.family_ || num_sensors_ != other.num_sensors_ || dim_ != other.dim_)
    return false;
  for (std::size_t c = 0; c < vectors_.size(); ++c)
    if (vectors_[c] != other.vectors_[c]) return false;
  for (std::size_t c = 0; c < blocks_.size(); ++c)
    if (blocks_[c] != other.blocks_[c]) return false;
  return true;
}

CMat dft_mixing(Index num_sensors) { return dft_matrix(num_sensors); }

CMat circulant_mixing(const CVec& w) {
  const Index n = w.size();
  CMat v(n, n);
  for (Index c = 0; c < n; ++c)
    for (Index d = 0; d < n; ++d) v(c, d) = w(((c - d) % n + n) % n);
  return v;
}

bool is_valid_mixing(const CMat& v, SamplingMode mode, Real tol) {
  if (v.rows() != v.cols() || v.rows() == 0) return false;
  if (mode == SamplingMode::Distinct) {
    for (Index d = 0; d < v.cols(); ++d)
      if (std::abs(v.col(d).squaredNorm() - 1.0) > tol) return false;
    return true;
  }
  const CMat gram = v.adjoint() * v;
  return (gram - CMat::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() <= tol;
}

SensorProfile build_profile(ProfileFamily family, const ProfileParams& params) {
  const Index num_sensors = params.num_sensors;
  const Index n = params.dimension;
  if (num_sensors < 1 || n < 1) throw DomainError("profile: need C >= 1 and N >= 1");
  const Real scale = mode_scale(params.mode, num_sensors);
  const Real root_c = std::sqrt(static_cast<Real>(num_sensors));

  switch (family) {
    case ProfileFamily::Nonoverlapping: {
      const Partition part = partition_or_default(params);
      std::vector<CVec> diagonals(static_cast<std::size_t>(num_sensors), CVec::Zero(n));
      for (Index c = 0; c < num_sensors; ++c)
        for (Index j : part.level(c)) diagonals[static_cast<std::size_t>(c)](j) = root_c * scale;
      return SensorProfile::diagonal(std::move(diagonals), family);
    }
    case ProfileFamily::AlmostIdentical: {
      if (static_cast<Index>(params.gains.size()) != num_sensors)
        throw DomainError("almost_identical: one gain per sensor required");
      Real energy = 0.0;
      for (const Complex& g : params.gains) energy += std::norm(g);
      const Real target = mode_divisor(params.mode, num_sensors);
      if (std::abs(energy - target) > 1e-10 * target)
        throw DomainError("almost_identical: sum |lambda_c|^2 must equal " + std::to_string(target));
      const CVec base = params.base_diagonal.size() == 0 ? CVec::Ones(n) : params.base_diagonal;
      if (base.size() != n || (base.cwiseAbs().array() - 1.0).abs().maxCoeff() > 1e-12)
        throw DomainError("almost_identical: base diagonal must have unit-modulus entries");
      std::vector<CVec> diagonals;
      for (const Complex& g : params.gains) diagonals.push_back(g * base);
      return SensorProfile::diagonal(std::move(diagonals), family);
    }
    case ProfileFamily::ComplexUnit: {
      Generator gen = require_rng(params, "complex_unit");
      std::vector<CVec> diagonals;
      for (Index c = 0; c < num_sensors; ++c) diagonals.push_back(scale * unit_circle(gen, n));
      return SensorProfile::diagonal(std::move(diagonals), family);
    }
    case ProfileFamily::PiecewiseConstant: {
      const Partition part = partition_or_default(params);
      const CMat v = params.mixing.size() == 0 ? dft_mixing(num_sensors) : params.mixing;
      if (v.rows() != num_sensors || v.cols() != part.num_levels())
        throw DomainError("piecewise_constant: V must be C x C");
      if (!is_valid_mixing(v, params.mode)) {
        throw DomainError(params.mode == SamplingMode::Distinct
                              ? "piecewise_constant: V columns must be l2-normalised"
                              : "piecewise_constant: V must be an isometry");
      }
      return SensorProfile::diagonal(piecewise_diagonals(v, part, root_c * scale), family);
    }
    case ProfileFamily::BandedCosine:
      if (num_sensors > n) throw DomainError("banded_cosine: band width must be positive (C <= N)");
      return normalize_to_isometry(banded_cosine_raw(num_sensors, n), params.mode, family);
    case ProfileFamily::CirculantFilter:
      if (static_cast<Index>(params.filters.size()) != num_sensors)
        throw DomainError("circulant_filter: one filter per sensor required");
      return normalize_circulant_to_isometry(params.filters, params.mode, family);
    case ProfileFamily::CirculantUnitEigen: {
      Generator gen = require_rng(params, "circulant_unit_eigen");
      std::vector<CVec> filters;
      const Real root_n = std::sqrt(static_cast<Real>(n));
      for (Index c = 0; c < num_sensors; ++c) {
        const CVec eig = scale * unit_circle(gen, n);
        filters.push_back(inverse_unitary_dft(eig) / root_n);
      }
      return SensorProfile::circulant(std::move(filters), family);
    }
    case ProfileFamily::DftLike: {
      if (n % num_sensors != 0) throw DomainError("dft_like: C must divide N");
      std::vector<CVec> diagonals(static_cast<std::size_t>(num_sensors), CVec(n));
      for (Index c = 0; c < num_sensors; ++c)
        for (Index j = 0; j < n; ++j) {
          const Real theta = 2.0 * kPi * static_cast<Real>(c - j) / static_cast<Real>(num_sensors);
          diagonals[static_cast<std::size_t>(c)](j) = scale * Complex(std::cos(theta), std::sin(theta));
        }
      return SensorProfile::diagonal(std::move(diagonals), family);
    }
    case ProfileFamily::Repeated: {
      std::vector<CVec> diagonals(static_cast<std::size_t>(num_sensors), CVec::Constant(n, Complex(scale, 0.0)));
      return SensorProfile::diagonal(std::move(diagonals), family);
    }
    case ProfileFamily::Custom: break;
  }
  throw DomainError("build_profile: custom profiles are constructed directly");
}

IsometryReport check_isometry(const SensorProfile& profile, SamplingMode mode, Real tol) {
  const Index n = profile.dimension();
  const Real divisor = mode_divisor(mode, profile.num_sensors());
  Real deviation = 0.0;
  switch (profile.kind()) {
    case ProfileKind::Diagonal: {
      RVec mass = RVec::Zero(n);
      for (Index c = 0; c < profile.num_sensors(); ++c) mass += profile.vector_data(c).cwiseAbs2();
      deviation = (mass / divisor - RVec::Ones(n)).cwiseAbs().maxCoeff();
      break;
    }
    case ProfileKind::Circulant: {
      // sum H_c^* H_c is circulant with eigenvalues sum |lambda_c|^2; its
      // first column determines every entry.
      CVec spectrum = CVec::Zero(n);
      for (Index c = 0; c < profile.num_sensors(); ++c) spectrum += profile.eigenvalues(c).cwiseAbs2().cast<Complex>();
      CVec column = inverse_unitary_dft(spectrum) / std::sqrt(static_cast<Real>(n)) / divisor;
      column(0) -= 1.0;
      deviation = column.cwiseAbs().maxCoeff();
      break;
    }
    case ProfileKind::Dense: {
      CMat gram = CMat::Zero(n, n);
      for (Index c = 0; c < profile.num_sensors(); ++c) gram += profile.dense_block(c).adjoint() * profile.dense_block(c);
      deviation = (gram / divisor - CMat::Identity(n, n)).cwiseAbs().maxCoeff();
      break;
    }
  }
  return {deviation, deviation <= tol};
}

SensorProfile normalize_to_isometry(const std::vector<CVec>& raw_diagonals, SamplingMode mode, ProfileFamily family) {
  if (raw_diagonals.empty()) throw DomainError("normalize_to_isometry: no sensors");
  const Index num_sensors = static_cast<Index>(raw_diagonals.size());
  const Index n = raw_diagonals.front().size();
  RVec mass = RVec::Zero(n);
  for (const auto& d : raw_diagonals) {
    if (d.size() != n) throw DomainError("normalize_to_isometry: diagonals differ in length");
    mass += d.cwiseAbs2();
  }
  const Real divisor = mode_divisor(mode, num_sensors);
  for (Index j = 0; j < n; ++j)
    if (!(mass(j) > 0.0)) throw DomainError("normalize_to_isometry: coordinate " + std::to_string(j) + " is unobservable");
  const RVec factor = (mass / divisor).cwiseSqrt().cwiseInverse();
  std::vector<CVec> out;
  for (const auto& d : raw_diagonals) out.push_back(d.cwiseProduct(factor.cast<Complex>()));
  return SensorProfile::diagonal(std::move(out), family);
}

SensorProfile normalize_circulant_to_isometry(const std::vector<CVec>& raw_filters, SamplingMode mode,
                                              ProfileFamily family) {
  if (raw_filters.empty()) throw DomainError("normalize_circulant_to_isometry: no sensors");
  const Index num_sensors = static_cast<Index>(raw_filters.size());
  const Index n = raw_filters.front().size();
  std::vector<CVec> spectra;
  RVec mass = RVec::Zero(n);
  for (const auto& h : raw_filters) {
    if (h.size() != n) throw DomainError("normalize_circulant_to_isometry: filters differ in length");
    spectra.push_back(circulant_eigenvalues(h));
    mass += spectra.back().cwiseAbs2();
  }
  const Real divisor = mode_divisor(mode, num_sensors);
  for (Index k = 0; k < n; ++k)
    if (!(mass(k) > 0.0)) throw DomainError("normalize_circulant_to_isometry: frequency " + std::to_string(k) + " is unobservable");
  const RVec factor = (mass / divisor).cwiseSqrt().cwiseInverse();
  const Real root_n = std::sqrt(static_cast<Real>(n));
  std::vector<CVec> filters;
  for (const auto& spectrum : spectra)
    filters.push_back(inverse_unitary_dft(spectrum.cwiseProduct(factor.cast<Complex>())) / root_n);
  return SensorProfile::circulant(std::move(filters), family);
}

ProfileNorms profile_norms(const SensorProfile& profile, const std::optional<Partition>& partition) {
  ProfileNorms norms;
  const Index num_sensors = profile.num_sensors();
  if (partition && partition->size() != profile.dimension()) throw DomainError("profile_norms: partition length differs");
  for (Index c = 0; c < num_sensors; ++c) {
    std::vector<Real> row;
    switch (profile.kind()) {
      case ProfileKind::Diagonal: {
        const RVec mag = profile.vector_data(c).cwiseAbs();
        norms.inf_norm.push_back(mag.maxCoeff());
        if (partition) {
          for (Index d = 0; d < partition->num_levels(); ++d) {
            Real best = 0.0;
            for (Index j : partition->level(d)) best = std::max(best, mag(j));
            row.push_back(best);
          }
        }
        break;
      }
      case ProfileKind::Circulant:
      case ProfileKind::Dense: {
        const CMat h = profile.matrix(c);
        norms.inf_norm.push_back(induced_inf_norm(h));
        if (partition) {
          for (Index d = 0; d < partition->num_levels(); ++d) {
            RVec sums = RVec::Zero(h.rows());
            for (Index j : partition->level(d)) sums += h.col(j).cwiseAbs();
            row.push_back(sums.maxCoeff());
          }
        }
        if (profile.kind() == ProfileKind::Circulant) {
          norms.filter_l1.push_back(norm1(profile.vector_data(c)));
          norms.eigen_inf.push_back(norm_inf(profile.eigenvalues(c)));
        }
        break;
      }
    }
    if (partition) norms.restricted.push_back(std::move(row));
  }
  return norms;
}

namespace {

nlohmann::json interleave(const CVec& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i).real());
    arr.push_back(v(i).imag());
  }
  return arr;
}

CVec deinterleave(const nlohmann::json& arr, Index expected) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != 2 * expected)
    throw InputError("profile json: data array has wrong length");
  CVec v(expected);
  for (Index i = 0; i < expected; ++i)
    v(i) = Complex(arr.at(static_cast<std::size_t>(2 * i)).get<Real>(), arr.at(static_cast<std::size_t>(2 * i + 1)).get<Real>());
  return v;
}

}  // namespace

nlohmann::json profile_to_json(const SensorProfile& profile) {
  nlohmann::json doc;
  doc["kind"] = to_string(profile.kind());
  doc["family"] = to_string(profile.family());
  doc["C"] = profile.num_sensors();
  doc["N"] = profile.dimension();
  nlohmann::json data = nlohmann::json::array();
  for (Index c = 0; c < profile.num_sensors(); ++c) {
    if (profile.kind() == ProfileKind::Dense) {
      const CMat& b = profile.dense_block(c);
      CVec flat(b.size());
      for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) flat(i * b.cols() + j) = b(i, j);
      data.push_back(interleave(flat));
    } else {
      data.push_back(interleave(profile.vector_data(c)));
    }
  }
  doc["data"] = std::move(data);
  return doc;
}

SensorProfile profile_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    const ProfileFamily family = parse_profile_family(doc.at("family").get<std::string>());
    const Index num_sensors = doc.at("C").get<Index>();
    const Index n = doc.at("N").get<Index>();
    const auto& data = doc.at("data");
    if (!data.is_array() || static_cast<Index>(data.size()) != num_sensors)
      throw InputError("profile json: expected one data array per sensor");
    if (kind == "dense") {
      std::vector<CMat> blocks;
      for (const auto& entry : data) {
        const CVec flat = deinterleave(entry, n * n);
        CMat b(n, n);
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < n; ++j) b(i, j) = flat(i * n + j);
        blocks.push_back(std::move(b));
      }
      return SensorProfile::dense(std::move(blocks), family);
    }
    std::vector<CVec> vectors;
    for (const auto& entry : data) vectors.push_back(deinterleave(entry, n));
    if (kind == "diagonal") return SensorProfile::diagonal(std::move(vectors), family);
    if (kind == "circulant") return SensorProfile::circulant(std::move(vectors), family);
    throw InputError("profile json: unknown kind " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("profile json: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(std::string("profile json: ") + e.what());
  }
}

}  // namespace pacs
