#include "pacs/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "pacs/errors.hpp"
#include "pacs/rng.hpp"
#include "pacs/sensing.hpp"
#include "pacs/signals.hpp"

namespace pacs {

namespace {

enum : std::uint64_t { kSignalStream = 1, kSystemStream = 2 };

std::string fmt6(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Index nearest(Real v) { return static_cast<Index>(std::llround(v)); }

}  // namespace

std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::Dft: return "dft";
    case EnsembleKind::DftDecimated: return "dft_decimated";
    case EnsembleKind::Gaussian: return "gaussian";
  }
  return "dft";
}

EnsembleKind parse_ensemble_kind(const std::string& name) {
  if (name == "dft") return EnsembleKind::Dft;
  if (name == "dft_decimated") return EnsembleKind::DftDecimated;
  if (name == "gaussian") return EnsembleKind::Gaussian;
  throw DomainError("unknown ensemble: " + name);
}

void ExperimentConfig::validate() const {
  if (n < 2) throw DomainError("experiment: N must be at least 2");
  if (num_sensors < 1) throw DomainError("experiment: C must be positive");
  if (trials < 1) throw DomainError("experiment: trials must be at least 1");
  if (!(tol > 0.0)) throw DomainError("experiment: tol must be positive");
  if (!(eta >= 0.0)) throw DomainError("experiment: eta must be nonnegative");
  if (deltas.empty() && delta_resolution < 1) throw DomainError("experiment: delta resolution must be at least 1");
  if (kappas.empty() && kappa_resolution < 1) throw DomainError("experiment: kappa resolution must be at least 1");
  for (Real d : deltas)
    if (!(d > 0.0)) throw DomainError("experiment: delta values must be positive");
  for (Real k : kappas)
    if (!(k > 0.0)) throw DomainError("experiment: kappa values must be positive");
  if (signal_model != "sparse" && signal_model != "clustered")
    throw DomainError("experiment: signal model must be sparse or clustered");
  if (ensemble == EnsembleKind::DftDecimated && n % num_sensors != 0)
    throw DomainError("experiment: decimated grid requires C | N");
  solver.validate();
}

std::vector<Real> ExperimentConfig::delta_axis() const {
  if (!deltas.empty()) return deltas;
  std::vector<Real> axis;
  for (Index i = 0; i < delta_resolution; ++i) axis.push_back(static_cast<Real>(i + 1) / static_cast<Real>(delta_resolution + 1));
  return axis;
}

std::vector<Real> ExperimentConfig::kappa_axis() const {
  if (!kappas.empty()) return kappas;
  std::vector<Real> axis;
  for (Index j = 0; j < kappa_resolution; ++j) axis.push_back(static_cast<Real>(j + 1) / static_cast<Real>(kappa_resolution + 1));
  return axis;
}

const std::set<std::string>& ExperimentConfig::known_keys() {
  static const std::set<std::string> keys = {
      "experiment.N", "experiment.C", "experiment.scenario", "experiment.seed", "experiment.trials",
      "experiment.tol", "experiment.eta", "experiment.paired",
      "sensing.ensemble",
      "profile.family", "profile.gains",
      "signal.model", "signal.lambda",
      "grid.delta_resolution", "grid.kappa_resolution", "grid.deltas", "grid.kappas",
      "solver.max_iterations", "solver.abs_tol", "solver.rel_tol", "solver.feas_tol", "solver.rho", "solver.alpha", "solver.polish",
  };
  return keys;
}

ExperimentConfig ExperimentConfig::from_config(const Config& cfg) {
  cfg.reject_unknown(known_keys());
  ExperimentConfig c;
  try {
    c.n = cfg.get_int("experiment.N", c.n);
    c.num_sensors = cfg.get_int("experiment.C", c.num_sensors);
    c.mode = parse_sampling_mode(cfg.get_string("experiment.scenario", to_string(c.mode)));
    c.seed = static_cast<std::uint64_t>(cfg.get_int("experiment.seed", static_cast<std::int64_t>(c.seed)));
    c.trials = cfg.get_int("experiment.trials", c.trials);
    c.tol = cfg.get_real("experiment.tol", c.tol);
    c.eta = cfg.get_real("experiment.eta", c.eta);
    c.paired = cfg.get_bool("experiment.paired", c.paired);
    c.ensemble = parse_ensemble_kind(cfg.get_string("sensing.ensemble", to_string(c.ensemble)));
    c.family = parse_profile_family(cfg.get_string("profile.family", to_string(c.family)));
    if (cfg.has("profile.gains")) c.gains = cfg.get_real_list("profile.gains");
    c.signal_model = cfg.get_string("signal.model", c.signal_model);
    c.cluster_lambda = cfg.get_real("signal.lambda", c.cluster_lambda);
    c.delta_resolution = cfg.get_int("grid.delta_resolution", c.delta_resolution);
    c.kappa_resolution = cfg.get_int("grid.kappa_resolution", c.kappa_resolution);
    if (cfg.has("grid.deltas")) c.deltas = cfg.get_real_list("grid.deltas");
    if (cfg.has("grid.kappas")) c.kappas = cfg.get_real_list("grid.kappas");
    c.solver.max_iterations = cfg.get_int("solver.max_iterations", c.solver.max_iterations);
    c.solver.abs_tol = cfg.get_real("solver.abs_tol", c.solver.abs_tol);
    c.solver.rel_tol = cfg.get_real("solver.rel_tol", c.solver.rel_tol);
    c.solver.feas_tol = cfg.get_real("solver.feas_tol", c.solver.feas_tol);
    c.solver.rho = cfg.get_real("solver.rho", c.solver.rho);
    c.solver.alpha = cfg.get_real("solver.alpha", c.solver.alpha);
    c.solver.polish = cfg.get_bool("solver.polish", c.solver.polish);
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  c.validate();
  return c;
}

bool PhaseCell::operator==(const PhaseCell& other) const {
  return i == other.i && j == other.j && fmt6(delta) == fmt6(other.delta) && fmt6(kappa) == fmt6(other.kappa) &&
         m == other.m && s == other.s && trials == other.trials && successes == other.successes &&
         skipped == other.skipped;
}

PhaseCell plan_cell(const ExperimentConfig& config, Index i, Index j, Real delta, Real kappa) {
  PhaseCell cell;
  cell.i = i;
  cell.j = j;
  cell.delta = delta;
  cell.kappa = kappa;
  cell.trials = config.trials;
  Index per_sensor = nearest(delta * static_cast<Real>(config.n));
  Index s = nearest(kappa * static_cast<Real>(config.n));
  if (per_sensor < 1) {
    per_sensor = 1;
    cell.clamped = true;
  }
  if (s < 1) {
    s = 1;
    cell.clamped = true;
  }
  cell.m = config.num_sensors * per_sensor;
  cell.s = s;
  const Index atoms = config.ensemble == EnsembleKind::Dft            ? config.n
                      : config.ensemble == EnsembleKind::DftDecimated ? config.n / config.num_sensors
                                                                      : -1;
  if (s > config.n || (atoms >= 0 && per_sensor > atoms)) cell.skipped = true;
  if (config.signal_model == "clustered" && nearest(config.cluster_lambda * static_cast<Real>(s)) > config.n)
    cell.skipped = true;
  return cell;
}

namespace {

SensorProfile trial_profile(const ExperimentConfig& config, const RngStream& stream) {
  ProfileParams params;
  params.num_sensors = config.num_sensors;
  params.dimension = config.n;
  params.mode = config.mode;
  params.rng = stream;
  for (Real g : config.gains) params.gains.emplace_back(g, 0.0);
  return build_profile(config.family, params);
}

Ensemble trial_ensemble(const ExperimentConfig& config) {
  switch (config.ensemble) {
    case EnsembleKind::Dft: return Ensemble::subsampled_dft(config.n);
    case EnsembleKind::DftDecimated: return Ensemble::decimated_dft(config.n, config.num_sensors);
    case EnsembleKind::Gaussian: return Ensemble::gaussian(config.n);
  }
  return Ensemble::gaussian(config.n);
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& config, const PhaseCell& cell, Index trial) {
  const RngStream master(config.seed);
  const auto ui = static_cast<std::uint64_t>(cell.i), uj = static_cast<std::uint64_t>(cell.j),
             ut = static_cast<std::uint64_t>(trial);
  const RngStream signal_stream =
      config.paired ? master.substream({kSignalStream, ui, uj, ut})
                    : master.substream({kSignalStream, ui, uj, ut, static_cast<std::uint64_t>(config.num_sensors)});
  const RngStream system_stream =
      master.substream({kSystemStream, ui, uj, ut, static_cast<std::uint64_t>(config.num_sensors)});

  SignalSpec spec{SparseModel{cell.s}, config.n};
  if (config.signal_model == "clustered") {
    const Index width = nearest(config.cluster_lambda * static_cast<Real>(cell.s));
    Generator start_gen = signal_stream.substream(0).generator();
    const Index start = static_cast<Index>(start_gen.uniform_index(static_cast<std::uint64_t>(config.n - width + 1)));
    spec.model = ClusteredModel{cell.s, config.cluster_lambda, start};
  }
  Generator signal_gen = signal_stream.generator();
  const CVec x = gen_signal(spec, signal_gen);

  const SensorProfile profile = trial_profile(config, system_stream.substream(0));
  std::vector<Index> counts;
  if (config.mode == SamplingMode::Distinct) counts.assign(static_cast<std::size_t>(config.num_sensors), cell.m / config.num_sensors);
  else counts = {cell.m};
  const ParallelSystem system = assemble(config.mode, {trial_ensemble(config)}, profile, counts, system_stream.substream(1));

  Generator noise_gen = system_stream.substream(2).generator();
  NoiseModel noise = NoNoise{};
  if (config.eta > 0.0) {
    // Noise of norm exactly eta in a uniformly random direction.
    CVec e(system.rows());
    for (Index r = 0; r < e.size(); ++r) {
      const Real re = noise_gen.normal();
      e(r) = Complex(re, noise_gen.normal());
    }
    noise = FixedNoise{e * (config.eta / e.norm())};
  }
  const MeasurementSet meas = measure(system, x, noise, noise_gen);
  TrialOutcome out;
  out.solve = bpdn_solve(system, meas, config.solver);
  out.relative_error = (x - out.solve.x).norm() / x.norm();
  out.success = recovery_success(x, out.solve.x, config.tol);
  return out;
}

PhaseGrid run_phase_transition(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  const std::vector<Real> da = config.delta_axis();
  const std::vector<Real> ka = config.kappa_axis();
  PhaseGrid grid;
  grid.rows = static_cast<Index>(da.size());
  grid.cols = static_cast<Index>(ka.size());
  for (Index i = 0; i < grid.rows; ++i)
    for (Index j = 0; j < grid.cols; ++j)
      grid.cells.push_back(plan_cell(config, i, j, da[static_cast<std::size_t>(i)], ka[static_cast<std::size_t>(j)]));

  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned id) {
    try {
      for (std::size_t k = next++; k < grid.cells.size(); k = next++) {
        PhaseCell& cell = grid.cells[k];
        if (cell.skipped) continue;
        for (Index t = 0; t < cell.trials; ++t) cell.successes += run_trial(config, cell, t).success ? 1 : 0;
      }
    } catch (...) {
      errors[id] = std::current_exception();
      next = grid.cells.size();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return grid;
}

Real avgp(const PhaseGrid& grid, Real delta_max) {
  Real total = 0.0;
  Index count = 0;
  for (const auto& cell : grid.cells) {
    if (cell.skipped || !(cell.delta < delta_max)) continue;
    total += cell.fraction();
    ++count;
  }
  if (count == 0) throw DomainError("avgp: no cells with delta below " + fmt6(delta_max));
  return 100.0 * total / static_cast<Real>(count);
}

std::string to_csv(const PhaseGrid& grid) {
  std::ostringstream out;
  out << "i,j,delta,kappa,m,s,trials,successes,fraction,skipped\n";
  for (const auto& c : grid.cells) {
    out << c.i << ',' << c.j << ',' << fmt6(c.delta) << ',' << fmt6(c.kappa) << ',' << c.m << ',' << c.s << ','
        << c.trials << ',' << c.successes << ',' << fmt6(c.fraction()) << ',' << (c.skipped ? 1 : 0) << '\n';
  }
  return out.str();
}

PhaseGrid from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "i,j,delta,kappa,m,s,trials,successes,fraction,skipped")
    throw InputError("phase csv: unexpected header");
  PhaseGrid grid;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 10) throw InputError("phase csv: line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
    PhaseCell c;
    try {
      std::size_t used = 0;
      auto to_index = [&](const std::string& s) {
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<Index>(v);
      };
      auto to_real = [&](const std::string& s) {
        const Real v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      };
      c.i = to_index(f[0]);
      c.j = to_index(f[1]);
      c.delta = to_real(f[2]);
      c.kappa = to_real(f[3]);
      c.m = to_index(f[4]);
      c.s = to_index(f[5]);
      c.trials = to_index(f[6]);
      c.successes = to_index(f[7]);
      to_real(f[8]);
      const Index skipped = to_index(f[9]);
      if (skipped != 0 && skipped != 1) throw std::invalid_argument(f[9]);
      c.skipped = skipped == 1;
    } catch (const std::logic_error&) {
      throw InputError("phase csv: malformed value on line " + std::to_string(lineno));
    }
    if (c.successes < 0 || c.successes > c.trials) throw InputError("phase csv: successes exceed trials on line " + std::to_string(lineno));
    grid.rows = std::max(grid.rows, c.i + 1);
    grid.cols = std::max(grid.cols, c.j + 1);
    grid.cells.push_back(c);
  }
  if (static_cast<Index>(grid.cells.size()) != grid.rows * grid.cols) throw InputError("phase csv: grid is not rectangular");
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& c = grid.cells[k];
    if (c.i * grid.cols + c.j != static_cast<Index>(k)) throw InputError("phase csv: cells are not in row-major order");
  }
  return grid;
}

void export_csv(const PhaseGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << to_csv(grid);
  if (!out) throw InputError("failed writing " + path);
}

PhaseGrid import_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_csv(buf.str());
}

}  // namespace pacs
