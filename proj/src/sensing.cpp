#include "pacs/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "pacs/errors.hpp"

namespace pacs {

Ensemble Ensemble::subsampled_dft(Index n) {
  if (n < 1) throw DomainError("ensemble: N must be positive");
  Ensemble e;
  e.kind_ = Kind::SubsampledDft;
  e.n_ = n;
  return e;
}

Ensemble Ensemble::decimated_dft(Index n, Index factor) {
  if (n < 1 || factor < 1 || n % factor != 0) throw DomainError("decimated grid requires C | N");
  Ensemble e = subsampled_dft(n);
  e.decimation_ = factor;
  return e;
}

Ensemble Ensemble::gaussian(Index n) {
  if (n < 1) throw DomainError("ensemble: N must be positive");
  Ensemble e;
  e.kind_ = Kind::Gaussian;
  e.n_ = n;
  return e;
}

Ensemble Ensemble::explicit_atoms(std::vector<CVec> atoms, std::vector<Real> probabilities) {
  if (atoms.empty() || atoms.size() != probabilities.size())
    throw DomainError("explicit ensemble: one probability per atom required");
  Real total = 0.0;
  for (Real p : probabilities) {
    if (!(p >= 0.0)) throw DomainError("explicit ensemble: probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("explicit ensemble: probabilities must sum to 1");
  Ensemble e;
  e.kind_ = Kind::ExplicitAtoms;
  e.n_ = atoms.front().size();
  for (const auto& a : atoms)
    if (a.size() != e.n_) throw DomainError("explicit ensemble: atoms differ in length");
  e.atoms_ = std::move(atoms);
  e.probabilities_ = std::move(probabilities);
  return e;
}

Index Ensemble::num_atoms() const {
  switch (kind_) {
    case Kind::SubsampledDft: return n_ / decimation_;
    case Kind::ExplicitAtoms: return static_cast<Index>(atoms_.size());
    case Kind::Gaussian: break;
  }
  throw DomainError("gaussian ensemble has no finite atom set");
}

CVec Ensemble::atom(Index k) const {
  if (k < 0 || k >= num_atoms()) throw DomainError("ensemble: atom index out of range");
  if (kind_ == Kind::ExplicitAtoms) return atoms_[static_cast<std::size_t>(k)];
  // Full grid: a = sqrt(N) conj(row k of Phi). Decimated grid: a^* is
  // sqrt(N) times row t = kC of Phi^*, so a = exp(-2 pi i t j / N).
  CVec a(n_);
  const bool full = decimation_ == 1;
  const Index t = full ? k : k * decimation_;
  for (Index j = 0; j < n_; ++j) {
    const Real theta = 2.0 * kPi * static_cast<Real>((t * j) % n_) / static_cast<Real>(n_);
    a(j) = full ? Complex(std::cos(theta), std::sin(theta)) : Complex(std::cos(theta), -std::sin(theta));
  }
  return a;
}

Real Ensemble::probability(Index k) const {
  if (kind_ == Kind::ExplicitAtoms) return probabilities_.at(static_cast<std::size_t>(k));
  return 1.0 / static_cast<Real>(num_atoms());
}

std::string Ensemble::describe() const {
  switch (kind_) {
    case Kind::SubsampledDft: return decimation_ == 1 ? "subsampled_dft" : "subsampled_dft_decimated";
    case Kind::Gaussian: return "gaussian";
    case Kind::ExplicitAtoms: return "explicit_atoms";
  }
  return "";
}

Real isotropy_deviation(const Ensemble& ensemble) {
  const Index n = ensemble.dimension();
  CMat moment = CMat::Zero(n, n);
  for (Index k = 0; k < ensemble.num_atoms(); ++k) {
    const CVec a = ensemble.atom(k);
    moment += ensemble.probability(k) * a * a.adjoint();
  }
  return spectral_norm(moment - CMat::Identity(n, n));
}

CMat empirical_second_moment(const Ensemble& ensemble, Index samples, Generator& gen) {
  if (samples < 1) throw DomainError("empirical_second_moment: need at least one sample");
  const Index n = ensemble.dimension();
  CMat moment = CMat::Zero(n, n);
  for (Index i = 0; i < samples; ++i) {
    CMat row;
    if (ensemble.with_replacement() || ensemble.kind() == Ensemble::Kind::Gaussian) {
      row = draw_rows(ensemble, 1, gen);
    } else {
      row = ensemble.atom(static_cast<Index>(gen.uniform_index(static_cast<std::uint64_t>(ensemble.num_atoms())))).adjoint();
    }
    moment += row.adjoint() * row;
  }
  return moment / static_cast<Real>(samples);
}

namespace {

Index sample_categorical(const std::vector<Real>& cumulative, Generator& gen) {
  const Real u = gen.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<Index>(static_cast<Index>(it - cumulative.begin()), static_cast<Index>(cumulative.size()) - 1);
}

}  // namespace

CMat draw_rows(const Ensemble& ensemble, Index k, Generator& gen, std::vector<Index>* indices) {
  const Index n = ensemble.dimension();
  if (k < 0) throw DomainError("draw_rows: negative row count");
  if (indices) indices->clear();
  if (ensemble.kind() == Ensemble::Kind::Gaussian) return gaussian(gen, k, n).cast<Complex>();

  std::vector<Index> chosen;
  if (ensemble.with_replacement()) {
    std::vector<Real> cumulative(static_cast<std::size_t>(ensemble.num_atoms()));
    Real acc = 0.0;
    for (Index a = 0; a < ensemble.num_atoms(); ++a) cumulative[static_cast<std::size_t>(a)] = acc += ensemble.probability(a);
    for (Index i = 0; i < k; ++i) chosen.push_back(sample_categorical(cumulative, gen));
  } else {
    if (k > ensemble.num_atoms())
      throw DomainError("draw_rows: " + std::to_string(k) + " rows requested from " +
                        std::to_string(ensemble.num_atoms()) + " atoms without replacement");
    chosen = subset_without_replacement(gen, ensemble.num_atoms(), k);
  }
  CMat rows(k, n);
  for (Index i = 0; i < k; ++i) rows.row(i) = ensemble.atom(chosen[static_cast<std::size_t>(i)]).adjoint();
  if (indices) *indices = std::move(chosen);
  return rows;
}

Index ParallelSystem::block_offset(Index c) const {
  Index offset = 0;
  for (Index d = 0; d < c; ++d) offset += block_rows[static_cast<std::size_t>(d)];
  return offset;
}

Index ParallelSystem::num_draws() const {
  return mode == SamplingMode::Distinct ? rows() : block_rows.front();
}

std::vector<Index> ParallelSystem::rows_of_draw(Index i) const {
  if (mode == SamplingMode::Distinct) return {i};
  const Index p = block_rows.front();
  std::vector<Index> out;
  for (Index c = 0; c < num_sensors(); ++c) out.push_back(c * p + i);
  return out;
}

ParallelSystem assemble(SamplingMode mode, const std::vector<Ensemble>& ensembles, const SensorProfile& profiles,
                        const std::vector<Index>& row_counts, const RngStream& rng) {
  const Index num_sensors = profiles.num_sensors();
  const Index n = profiles.dimension();
  if (ensembles.empty()) throw DomainError("assemble: no ensemble given");
  for (const auto& e : ensembles)
    if (e.dimension() != n) throw DomainError("assemble: ensemble and profile dimensions differ");
  const IsometryReport iso = check_isometry(profiles, mode, 1e-8);
  if (!iso.pass) throw DomainError("assemble: profiles violate the isometry condition for " + to_string(mode) + " sampling");

  ParallelSystem sys;
  sys.mode = mode;
  sys.profiles = profiles;

  if (mode == SamplingMode::Distinct) {
    if (static_cast<Index>(row_counts.size()) != num_sensors)
      throw DomainError("assemble: distinct sampling needs one row count per sensor");
    if (ensembles.size() != 1 && static_cast<Index>(ensembles.size()) != num_sensors)
      throw DomainError("assemble: give one shared ensemble or one per sensor");
    const Index m = std::accumulate(row_counts.begin(), row_counts.end(), Index{0});
    if (m < 1) throw DomainError("assemble: no measurements requested");
    sys.block_rows = row_counts;
    sys.scale = 1.0 / std::sqrt(static_cast<Real>(m));
    sys.A.resize(m, n);
    Index offset = 0;
    for (Index c = 0; c < num_sensors; ++c) {
      const Index mc = row_counts[static_cast<std::size_t>(c)];
      if (mc < 0) throw DomainError("assemble: negative row count");
      const Ensemble& ens = ensembles[ensembles.size() == 1 ? 0 : static_cast<std::size_t>(c)];
      Generator gen = rng.substream(static_cast<std::uint64_t>(c)).generator();
      std::vector<Index> idx;
      CMat draws = draw_rows(ens, mc, gen, &idx);
      if (mc > 0) sys.A.middleRows(offset, mc) = sys.scale * profiles.right_multiply(draws, c);
      sys.draws.push_back(std::move(draws));
      sys.atom_indices.push_back(std::move(idx));
      offset += mc;
    }
    return sys;
  }

  if (row_counts.size() != 1) throw DomainError("assemble: identical sampling takes the total row count m");
  if (ensembles.size() != 1) throw DomainError("assemble: identical sampling uses a single ensemble");
  const Index m = row_counts.front();
  if (m < 1 || m % num_sensors != 0) throw DomainError("assemble: m/C must be a positive integer in identical mode");
  const Index p = m / num_sensors;
  sys.block_rows.assign(static_cast<std::size_t>(num_sensors), p);
  sys.scale = 1.0 / std::sqrt(static_cast<Real>(p));
  Generator gen = rng.substream(0).generator();
  std::vector<Index> idx;
  CMat draws = draw_rows(ensembles.front(), p, gen, &idx);
  sys.A.resize(m, n);
  for (Index c = 0; c < num_sensors; ++c) sys.A.middleRows(c * p, p) = sys.scale * profiles.right_multiply(draws, c);
  sys.draws.push_back(std::move(draws));
  sys.atom_indices.push_back(std::move(idx));
  return sys;
}

MeasurementSet measure(const ParallelSystem& system, const CVec& x, const NoiseModel& noise, Generator& gen) {
  if (x.size() != system.cols()) throw DomainError("measure: signal length differs from N");
  MeasurementSet out;
  out.y = system.A * x;
  if (const auto* g = std::get_if<GaussianNoise>(&noise)) {
    if (!(g->sigma >= 0.0)) throw DomainError("measure: sigma must be nonnegative");
    const Real sd = g->sigma / std::sqrt(2.0);
    CVec e(out.y.size());
    for (Index i = 0; i < e.size(); ++i) {
      const Real re = gen.normal();
      e(i) = sd * Complex(re, gen.normal());
    }
    out.y += e;
    out.eta = e.norm();
  } else if (const auto* f = std::get_if<FixedNoise>(&noise)) {
    if (f->e.size() != out.y.size()) throw DomainError("measure: noise length differs from m");
    out.y += f->e;
    out.eta = f->e.norm();
  }
  return out;
}

void write_matrix_csv(const std::string& path, const CMat& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out.precision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << m(i, j).real() << ',' << m(i, j).imag();
    }
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path);
}

nlohmann::json system_descriptor(const ParallelSystem& system, const std::vector<Ensemble>& ensembles,
                                 const RngStream& rng) {
  nlohmann::json doc;
  doc["scenario"] = to_string(system.mode);
  nlohmann::json ens = nlohmann::json::array();
  for (const auto& e : ensembles) ens.push_back(e.describe());
  doc["ensembles"] = ens;
  doc["profile_family"] = to_string(system.profiles.family());
  doc["N"] = system.cols();
  doc["C"] = system.num_sensors();
  doc["m"] = system.rows();
  doc["block_rows"] = system.block_rows;
  doc["seed"] = rng.master_seed();
  doc["seed_path"] = rng.path();
  return doc;
}

}  // namespace pacs
