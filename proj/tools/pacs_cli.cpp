#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pacs/certificate.hpp"
#include "pacs/coherence.hpp"
#include "pacs/config.hpp"
#include "pacs/errors.hpp"
#include "pacs/experiments.hpp"
#include "pacs/profiles.hpp"
#include "pacs/sensing.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pacs;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  unsigned workers = 1;
  int verbose = 0;
};

struct ProfileFlags {
  std::string family;
  Index n = 32;
  Index c = 2;
  std::string mode = "distinct";
  std::string partition = "contiguous";
  std::vector<double> gains;
  std::uint64_t seed = 1;
};

std::string output_path(const Common& common, const std::string& stem) {
  if (!common.out.empty()) return common.out;
  const char* dir = std::getenv("PACS_OUTPUT_DIR");
  return (fs::path(dir && *dir ? dir : ".") / stem).string();
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw InputError("cannot create " + p.parent_path().string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("failed writing " + path);
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_manifest(const std::string& result_path, const std::string& subcommand, const std::vector<std::string>& argv,
                    const json& extra) {
  json m;
  m["subcommand"] = subcommand;
  m["argv"] = argv;
  m["result"] = fs::path(result_path).filename().string();
  m["version"] = kVersion;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  m["compiler"] = __VERSION__;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_json(result_path + ".manifest.json", m);
}

Partition make_partition(const std::string& kind, Index n, Index c) {
  if (kind == "contiguous") return contiguous_partition(n, c);
  if (kind == "interleaved") return interleaved_partition(n, c);
  throw DomainError("unknown partition: " + kind);
}

SensorProfile make_profile(const ProfileFlags& f) {
  ProfileParams params;
  params.num_sensors = f.c;
  params.dimension = f.n;
  params.mode = parse_sampling_mode(f.mode);
  params.partition = make_partition(f.partition, f.n, f.c);
  params.rng = RngStream(f.seed);
  for (double g : f.gains) params.gains.emplace_back(g, 0.0);
  return build_profile(parse_profile_family(f.family), params);
}

Ensemble make_ensemble(const std::string& kind, Index n, Index c) {
  switch (parse_ensemble_kind(kind)) {
    case EnsembleKind::Dft: return Ensemble::subsampled_dft(n);
    case EnsembleKind::DftDecimated: return Ensemble::decimated_dft(n, c);
    case EnsembleKind::Gaussian: return Ensemble::gaussian(n);
  }
  return Ensemble::gaussian(n);
}

void add_profile_flags(CLI::App* cmd, ProfileFlags& f, bool family_required) {
  auto* opt = cmd->add_option("--family", f.family, "profile family");
  if (family_required) opt->required();
  cmd->add_option("--N", f.n, "signal length");
  cmd->add_option("--C", f.c, "number of sensors");
  cmd->add_option("--mode", f.mode, "distinct or identical");
  cmd->add_option("--partition", f.partition, "contiguous or interleaved");
  cmd->add_option("--gains", f.gains, "almost_identical gains")->delimiter(',');
  cmd->add_option("--seed", f.seed, "seed for random families");
}

ExperimentConfig load_experiment(const Common& common, json& extra) {
  Config cfg = common.config.empty() ? Config::parse("", "<flags>") : Config::load(common.config);
  for (const auto& s : common.sets) cfg.set(s, ExperimentConfig::known_keys());
  ExperimentConfig ec = ExperimentConfig::from_config(cfg);
  extra["config"] = cfg.dump();
  extra["seed"] = ec.seed;
  return ec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel-acquisition compressed sensing toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--out", common.out, "output file (default: $PACS_OUTPUT_DIR or .)");
  app.add_flag("-v,--verbose", common.verbose, "verbose progress on stderr");

  ProfileFlags pf;
  auto* profiles_cmd = app.add_subcommand("profiles", "build a sensor profile and check the isometry condition");
  add_profile_flags(profiles_cmd, pf, true);

  ProfileFlags cf;
  std::string coh_ensemble = "dft";
  std::vector<Index> coh_delta;
  std::vector<Index> coh_levels;
  std::string gamma_mode = "exact";
  std::string sparsity_mode = "bound";
  Index mc_samples = 0;
  auto* coherence_cmd = app.add_subcommand("coherence", "coherence quantities of an ensemble and profile");
  add_profile_flags(coherence_cmd, cf, false);
  coherence_cmd->add_option("--ensemble", coh_ensemble, "dft, dft_decimated or gaussian");
  coherence_cmd->add_option("--delta", coh_delta, "support Delta for Gamma_1, Gamma_2")->delimiter(',');
  coherence_cmd->add_option("--levels", coh_levels, "local sparsities for S_c")->delimiter(',');
  coherence_cmd->add_option("--gamma-mode", gamma_mode, "exact or bound");
  coherence_cmd->add_option("--sparsity-mode", sparsity_mode, "bound or brute_force");
  coherence_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo draws for unbounded ensembles");

  std::string rule;
  Index b_n = 0, b_c = 1;
  std::optional<Index> b_s;
  std::optional<double> b_lambda, b_mug, b_gamma, b_d, b_mujoint;
  double b_eps = 0.05;
  std::string b_partition = "contiguous";
  std::vector<Index> b_levels;
  std::vector<double> b_mu, b_inf, b_l1, b_eig, b_sigma, b_restricted, b_mulev, b_frac, b_rel;
  auto* bounds_cmd = app.add_subcommand("bounds", "evaluate a measurement bound (up to universal constant)");
  bounds_cmd->add_option("--rule", rule, "thm_2_1, cor_3_1 ... cor_4_3, thm_4_1")->required();
  bounds_cmd->add_option("--N", b_n, "signal length")->required();
  bounds_cmd->add_option("--C", b_c, "number of sensors");
  bounds_cmd->add_option("--s", b_s, "sparsity");
  bounds_cmd->add_option("--eps", b_eps, "failure probability");
  bounds_cmd->add_option("--lambda", b_lambda, "equidistribution factor");
  bounds_cmd->add_option("--muG", b_mug, "mu_G");
  bounds_cmd->add_option("--gamma", b_gamma, "Gamma(F, Delta)");
  bounds_cmd->add_option("--D", b_d, "block width D");
  bounds_cmd->add_option("--mu-joint", b_mujoint, "mu(G, H_1..H_C)");
  bounds_cmd->add_option("--levels", b_levels, "local sparsities")->delimiter(',');
  bounds_cmd->add_option("--partition", b_partition, "contiguous or interleaved");
  bounds_cmd->add_option("--mu-sensors", b_mu, "mu(F_c)")->delimiter(',');
  bounds_cmd->add_option("--inf-norms", b_inf, "||H_c||_inf")->delimiter(',');
  bounds_cmd->add_option("--filter-l1", b_l1, "||h_c||_1")->delimiter(',');
  bounds_cmd->add_option("--eigen-inf", b_eig, "||Lambda_c||_inf")->delimiter(',');
  bounds_cmd->add_option("--sigma-g", b_sigma, "sigma(G_c)")->delimiter(',');
  bounds_cmd->add_option("--restricted", b_restricted, "||H_c P_{I_d}||_inf, row-major C x C")->delimiter(',');
  bounds_cmd->add_option("--mu-levels", b_mulev, "mu_d(F_c), row-major C x C")->delimiter(',');
  bounds_cmd->add_option("--row-fractions", b_frac, "m_c / m")->delimiter(',');
  bounds_cmd->add_option("--rel-sparsities", b_rel, "S_c")->delimiter(',');

  Index r_m = 0, r_s = 0, r_trial = 0;
  auto* recover_cmd = app.add_subcommand("recover", "one seeded recovery trial");
  recover_cmd->add_option("--config", common.config, "experiment config file");
  recover_cmd->add_option("--set", common.sets, "override key=value");
  recover_cmd->add_option("--m", r_m, "total measurements (multiple of C)")->required();
  recover_cmd->add_option("--s", r_s, "sparsity")->required();
  recover_cmd->add_option("--trial", r_trial, "trial index");

  CertificateSetup cs;
  std::string cs_family = "piecewise_constant";
  auto* cert_cmd = app.add_subcommand("certificate", "golfing dual certificate for one identical-sampling draw");
  cert_cmd->add_option("--N", cs.n, "signal length");
  cert_cmd->add_option("--C", cs.num_sensors, "number of sensors");
  cert_cmd->add_option("--s", cs.s, "support size (multiple of C)");
  cert_cmd->add_option("--draws", cs.draws, "number of draws p = m/C");
  cert_cmd->add_option("--ensemble", cs.ensemble, "dft_iid or gaussian");
  cert_cmd->add_option("--family", cs_family, "profile family");
  cert_cmd->add_option("--seed", cs.seed, "seed");
  cert_cmd->add_option("--alpha", cs.params.alpha, "condition (i) constant");
  cert_cmd->add_option("--beta", cs.params.beta, "condition (ii) constant");
  cert_cmd->add_option("--gamma", cs.params.gamma, "condition (iii) constant");
  cert_cmd->add_option("--theta", cs.params.theta, "condition (iv) constant");
  cert_cmd->add_option("--sigma", cs.params.sigma, "condition (v) constant");

  std::vector<double> avgp_thresholds;
  auto* phase_cmd = app.add_subcommand("phase", "phase-transition experiment");
  phase_cmd->add_option("--config", common.config, "experiment config file")->required();
  phase_cmd->add_option("--set", common.sets, "override key=value");
  phase_cmd->add_option("--workers", common.workers, "worker threads (0 = all cores)");
  phase_cmd->add_option("--avgp", avgp_thresholds, "report AvgP below these delta values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    json extra = json::object();
    if (profiles_cmd->parsed()) {
      const SensorProfile profile = make_profile(pf);
      const IsometryReport iso = check_isometry(profile, parse_sampling_mode(pf.mode));
      const ProfileNorms norms = profile_norms(profile, make_partition(pf.partition, pf.n, pf.c));
      json doc;
      doc["profile"] = profile_to_json(profile);
      doc["isometry"] = {{"max_deviation", iso.max_deviation}, {"pass", iso.pass}, {"mode", pf.mode}};
      doc["norms"] = {{"inf_norm", norms.inf_norm}, {"restricted", norms.restricted}};
      if (profile.kind() == ProfileKind::Circulant) {
        doc["norms"]["filter_l1"] = norms.filter_l1;
        doc["norms"]["eigen_inf"] = norms.eigen_inf;
      }
      const std::string path = output_path(common, "profiles.json");
      write_json(path, doc);
      extra["seed"] = pf.seed;
      write_manifest(path, "profiles", args, extra);
      if (!iso.pass) {
        std::cerr << "profile violates the isometry condition (max deviation " << iso.max_deviation << ")\n";
        return 1;
      }
    } else if (coherence_cmd->parsed()) {
      const Ensemble ens = make_ensemble(coh_ensemble, cf.n, cf.c);
      std::optional<SensorProfile> profile;
      if (!cf.family.empty()) profile = make_profile(cf);
      json reports = json::array();
      BlockDistribution dist;
      if (!ens.is_finite()) {
        if (mc_samples < 1) throw CoherenceUndefined("gaussian rows have unbounded coherence; pass --mc-samples");
        Generator gen = RngStream(cf.seed).substream(7).generator();
        reports.push_back(mu_monte_carlo(ens, mc_samples, gen).to_json());
        dist = sampled_distribution(ens, mc_samples, gen);
      } else {
        reports.push_back(mu(ens).to_json());
        reports.push_back(sigma_g(ens).to_json());
        if (cf.c > 1) {
          const LevelCoherence lc = mu_levels(ens, make_partition(cf.partition, cf.n, cf.c));
          reports.push_back({{"quantity", "mu_levels"}, {"mu_prime", lc.mu_prime}, {"mu_c", lc.mu_c}, {"method", "exact"}});
        }
        dist = atom_distribution(ens);
        if (profile) {
          const SamplingMode mode = parse_sampling_mode(cf.mode);
          if (mode == SamplingMode::Identical) reports.push_back(mu_joint(ens, *profile).to_json());
          dist = mode == SamplingMode::Identical
                     ? identical_distribution(ens, *profile)
                     : distinct_distribution({ens}, *profile, std::vector<Index>(static_cast<std::size_t>(cf.c), 1));
        }
      }
      if (!coh_delta.empty()) {
        GammaResult g = gamma(dist, coh_delta, gamma_mode == "bound" ? GammaMode::Bound : GammaMode::Exact);
        if (!ens.is_finite() && gamma_mode != "bound") {
          g.gamma1.method = g.gamma2.method = Method::MonteCarlo;
          g.gamma1.samples = g.gamma2.samples = mc_samples;
        }
        reports.push_back(g.gamma1.to_json());
        reports.push_back(g.gamma2.to_json());
      }
      if (!coh_levels.empty()) {
        if (!profile) throw DomainError("relative sparsities need --family");
        const LevelScheme scheme(make_partition(cf.partition, cf.n, cf.c), coh_levels);
        const auto mode = sparsity_mode == "brute_force" ? SparsityMode::BruteForce : SparsityMode::Bound;
        std::optional<Ensemble> src;
        if (ens.is_finite()) src = ens;
        for (const auto& r : relative_sparsity(*profile, scheme, mode, src)) reports.push_back(r.to_json());
      }
      json doc;
      doc["reports"] = reports;
      doc["ensemble"] = ens.describe();
      doc["N"] = cf.n;
      doc["C"] = cf.c;
      const std::string path = output_path(common, "coherence.json");
      write_json(path, doc);
      extra["seed"] = cf.seed;
      write_manifest(path, "coherence", args, extra);
    } else if (bounds_cmd->parsed()) {
      BoundQuery q;
      q.rule = parse_bound_rule(rule);
      q.n = b_n;
      q.eps = b_eps;
      q.s = b_s;
      q.num_sensors = b_c;
      q.lambda = b_lambda;
      q.mu_g = b_mug;
      q.gamma = b_gamma;
      q.d = b_d;
      q.mu_joint = b_mujoint;
      if (!b_levels.empty()) q.levels = LevelScheme(make_partition(b_partition, b_n, b_c), b_levels);
      q.mu_sensors = b_mu;
      q.inf_norms = b_inf;
      q.filter_l1 = b_l1;
      q.eigen_inf = b_eig;
      q.sigma_g = b_sigma;
      q.row_fractions = b_frac;
      q.relative_sparsities = b_rel;
      auto square = [&](const std::vector<double>& flat, const char* name) {
        std::vector<std::vector<Real>> out;
        if (flat.empty()) return out;
        if (static_cast<Index>(flat.size()) != b_c * b_c) throw DomainError(std::string(name) + " needs C*C values");
        for (Index c = 0; c < b_c; ++c) out.emplace_back(flat.begin() + c * b_c, flat.begin() + (c + 1) * b_c);
        return out;
      };
      q.restricted = square(b_restricted, "--restricted");
      q.mu_lev = square(b_mulev, "--mu-levels");
      const BoundResult res = required_measurements(q);
      const std::string path = output_path(common, "bounds.json");
      write_json(path, res.to_json());
      write_manifest(path, "bounds", args, extra);
      std::cout << res.to_json().dump() << "\n";
    } else if (recover_cmd->parsed()) {
      const ExperimentConfig ec = load_experiment(common, extra);
      PhaseCell cell;
      cell.m = r_m;
      cell.s = r_s;
      cell.trials = 1;
      if (r_m < 1 || r_m % ec.num_sensors != 0) throw DomainError("--m must be a positive multiple of C");
      if (r_s < 1 || r_s > ec.n) throw DomainError("--s must lie in [1, N]");
      const TrialOutcome t = run_trial(ec, cell, r_trial);
      json doc;
      doc["relative_error"] = t.relative_error;
      doc["success"] = t.success;
      doc["iterations"] = t.solve.iterations;
      doc["status"] = to_string(t.solve.status);
      doc["m"] = r_m;
      doc["s"] = r_s;
      const std::string path = output_path(common, "recover.json");
      write_json(path, doc);
      write_manifest(path, "recover", args, extra);
      std::cout << doc.dump() << "\n";
    } else if (cert_cmd->parsed()) {
      cs.family = parse_profile_family(cs_family);
      const CertificateOutcome out = run_certificate_instance(cs);
      json doc = out.to_json();
      doc["recovered"] = out.recovery_error < 1e-4;
      const std::string path = output_path(common, "certificate.json");
      write_json(path, doc);
      extra["seed"] = cs.seed;
      write_manifest(path, "certificate", args, extra);
    } else if (phase_cmd->parsed()) {
      const ExperimentConfig ec = load_experiment(common, extra);
      if (common.verbose) std::cerr << "running " << ec.delta_axis().size() << "x" << ec.kappa_axis().size() << " cells\n";
      const PhaseGrid grid = run_phase_transition(ec, common.workers);
      const std::string path = output_path(common, "phase.csv");
      export_csv(grid, path);
      json avg = json::object();
      for (double t : avgp_thresholds) {
        char key[32];
        std::snprintf(key, sizeof(key), "%.6g", t);
        avg[key] = avgp(grid, t);
      }
      if (!avgp_thresholds.empty()) {
        extra["avgp"] = avg;
        std::cout << avg.dump() << "\n";
      }
      json clamped = json::array();
      for (const auto& c : grid.cells)
        if (c.clamped) clamped.push_back({c.i, c.j});
      extra["clamped_cells"] = clamped;
      write_manifest(path, "phase", args, extra);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
