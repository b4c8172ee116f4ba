#include "pacs/coherence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>

#include <Eigen/Eigenvalues>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

void require_finite(const Ensemble& ensemble, const char* what) {
  if (!ensemble.is_finite()) {
    throw CoherenceUndefined(std::string(what) + " is undefined for unbounded (gaussian) ensembles; use Monte Carlo mode");
  }
}

std::vector<Index> sorted_delta(const std::vector<Index>& delta, Index n) {
  if (delta.empty()) throw DomainError("Delta must be nonempty");
  std::vector<Index> d = delta;
  std::sort(d.begin(), d.end());
  if (std::adjacent_find(d.begin(), d.end()) != d.end()) throw DomainError("Delta has repeated indices");
  if (d.front() < 0 || d.back() >= n) throw DomainError("Delta index out of range");
  return d;
}

CMat columns(const CMat& m, const std::vector<Index>& cols) {
  CMat out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Index>(k)) = m.col(cols[k]);
  return out;
}

CMat rows(const CMat& m, const std::vector<Index>& idx) {
  CMat out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = m.row(idx[k]);
  return out;
}

Real quantile_999(std::vector<Real> values) {
  std::sort(values.begin(), values.end());
  const auto k = static_cast<std::size_t>(std::ceil(0.999 * static_cast<Real>(values.size())));
  return values[std::max<std::size_t>(k, 1) - 1];
}

const std::array<Complex, 8>& phase_grid() {
  static const std::array<Complex, 8> grid = [] {
    std::array<Complex, 8> g{};
    const Real r = std::sqrt(0.5);
    g = {Complex(1, 0), Complex(r, r), Complex(0, 1), Complex(-r, r),
         Complex(-1, 0), Complex(-r, -r), Complex(0, -1), Complex(r, -r)};
    return g;
  }();
  return grid;
}

}  // namespace

CMat BlockDistribution::second_moment() const {
  const Index n = dimension();
  CMat moment = CMat::Zero(n, n);
  for (std::size_t k = 0; k < blocks.size(); ++k) moment += probabilities[k] * blocks[k] * blocks[k].adjoint();
  return moment;
}

BlockDistribution atom_distribution(const Ensemble& ensemble) {
  require_finite(ensemble, "coherence");
  BlockDistribution dist;
  dist.label = ensemble.describe();
  for (Index k = 0; k < ensemble.num_atoms(); ++k) {
    dist.blocks.emplace_back(ensemble.atom(k));
    dist.probabilities.push_back(ensemble.probability(k));
  }
  return dist;
}

BlockDistribution sensor_distribution(const Ensemble& ensemble, const SensorProfile& profiles, Index c) {
  BlockDistribution dist = atom_distribution(ensemble);
  for (auto& b : dist.blocks) b = profiles.apply_adjoint(c, b.col(0));
  dist.label = ensemble.describe() + "/sensor" + std::to_string(c);
  return dist;
}

BlockDistribution distinct_distribution(const std::vector<Ensemble>& ensembles, const SensorProfile& profiles,
                                        const std::vector<Index>& row_counts) {
  const Index num_sensors = profiles.num_sensors();
  if (static_cast<Index>(row_counts.size()) != num_sensors) throw DomainError("one row count per sensor required");
  if (ensembles.size() != 1 && static_cast<Index>(ensembles.size()) != num_sensors)
    throw DomainError("give one shared ensemble or one per sensor");
  Index m = 0;
  for (Index mc : row_counts) m += mc;
  if (m < 1) throw DomainError("no measurements");
  BlockDistribution dist;
  dist.label = "distinct";
  for (Index c = 0; c < num_sensors; ++c) {
    const Real weight = static_cast<Real>(row_counts[static_cast<std::size_t>(c)]) / static_cast<Real>(m);
    if (weight == 0.0) continue;
    const Ensemble& ens = ensembles[ensembles.size() == 1 ? 0 : static_cast<std::size_t>(c)];
    BlockDistribution fc = sensor_distribution(ens, profiles, c);
    for (std::size_t k = 0; k < fc.blocks.size(); ++k) {
      dist.blocks.push_back(std::move(fc.blocks[k]));
      dist.probabilities.push_back(weight * fc.probabilities[k]);
    }
  }
  return dist;
}

BlockDistribution identical_distribution(const Ensemble& ensemble, const SensorProfile& profiles) {
  BlockDistribution atoms = atom_distribution(ensemble);
  BlockDistribution dist;
  dist.label = "identical";
  dist.probabilities = atoms.probabilities;
  for (const auto& a : atoms.blocks) {
    CMat b(profiles.dimension(), profiles.num_sensors());
    for (Index c = 0; c < profiles.num_sensors(); ++c) b.col(c) = profiles.apply_adjoint(c, a.col(0));
    dist.blocks.push_back(std::move(b));
  }
  return dist;
}

BlockDistribution sampled_distribution(const Ensemble& ensemble, Index k, Generator& gen) {
  if (k < 1) throw DomainError("Monte Carlo mode needs at least one sample");
  const CMat draws = draw_rows(ensemble, ensemble.with_replacement() || !ensemble.is_finite() ? k : std::min(k, ensemble.num_atoms()), gen);
  BlockDistribution dist;
  dist.label = ensemble.describe() + "/sampled";
  for (Index i = 0; i < draws.rows(); ++i) {
    dist.blocks.emplace_back(draws.row(i).adjoint());
    dist.probabilities.push_back(1.0 / static_cast<Real>(draws.rows()));
  }
  return dist;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::Bound: return "bound";
    case Method::MonteCarlo: return "monte_carlo";
  }
  return "exact";
}

nlohmann::json CoherenceReport::to_json() const {
  nlohmann::json doc;
  doc["quantity"] = quantity;
  doc["value"] = value;
  doc["method"] = to_string(method);
  if (method == Method::MonteCarlo) doc["samples"] = samples;
  if (lower) doc["lower"] = *lower;
  if (upper) doc["upper"] = *upper;
  if (!context.empty()) doc["context"] = context;
  return doc;
}

CoherenceReport mu(const BlockDistribution& dist) {
  Real best = 0.0;
  for (const auto& b : dist.blocks) best = std::max(best, b.cwiseAbs2().maxCoeff());
  return {"mu", best, Method::Exact, 0, std::nullopt, std::nullopt, dist.label};
}

CoherenceReport mu(const Ensemble& ensemble) { return mu(atom_distribution(ensemble)); }

CoherenceReport mu_monte_carlo(const Ensemble& ensemble, Index k, Generator& gen) {
  if (k < 1) throw DomainError("Monte Carlo mode needs at least one sample");
  const CMat draws = draw_rows(ensemble, k, gen);
  std::vector<Real> values;
  for (Index i = 0; i < k; ++i) values.push_back(draws.row(i).cwiseAbs2().maxCoeff());
  return {"mu", quantile_999(std::move(values)), Method::MonteCarlo, k, std::nullopt, std::nullopt,
          ensemble.describe() + " (99.9% quantile, not rigorous)"};
}

LevelCoherence mu_levels(const BlockDistribution& dist, const Partition& partition) {
  if (partition.size() != dist.dimension()) throw DomainError("partition length differs from N");
  LevelCoherence out;
  out.mu = mu(dist).value;
  out.mu_prime.assign(static_cast<std::size_t>(partition.num_levels()), 0.0);
  for (const auto& b : dist.blocks) {
    const RMat mag = b.cwiseAbs2();
    for (Index j = 0; j < mag.rows(); ++j) {
      Real& slot = out.mu_prime[static_cast<std::size_t>(partition.level_of(j))];
      slot = std::max(slot, mag.row(j).maxCoeff());
    }
  }
  for (Real mp : out.mu_prime) out.mu_c.push_back(std::sqrt(out.mu * mp));
  return out;
}

LevelCoherence mu_levels(const Ensemble& ensemble, const Partition& partition) {
  return mu_levels(atom_distribution(ensemble), partition);
}

PhaseSearch phase_grid_max(const CMat& m, Real incumbent) {
  const Index s = m.rows();
  PhaseSearch result;
  result.best = incumbent;
  if (s == 0) return result;
  const auto& grid = phase_grid();

  // tail[t] = sum_{j,k >= t} |M_jk|: bound on the free-free part.
  std::vector<Real> tail(static_cast<std::size_t>(s + 1), 0.0);
  const RMat mag = m.cwiseAbs();
  for (Index t = s - 1; t >= 0; --t) {
    Real add = mag(t, t);
    for (Index k = t + 1; k < s; ++k) add += mag(t, k) + mag(k, t);
    tail[static_cast<std::size_t>(t)] = tail[static_cast<std::size_t>(t + 1)] + add;
  }

  CVec z = CVec::Zero(s);
  // w_k = sum_{j assigned} conj(z_j) M_jk.
  std::vector<CVec> w_stack(static_cast<std::size_t>(s + 1), CVec::Zero(s));
  std::function<void(Index, Real)> descend = [&](Index t, Real fixed) {
    const CVec& w = w_stack[static_cast<std::size_t>(t)];
    if (t == s) {
      if (fixed > result.best || result.z.size() == 0) {
        if (fixed > result.best) result.best = fixed;
        if (fixed >= result.best) result.z = z;
      }
      return;
    }
    Real cross = 0.0;
    for (Index k = t; k < s; ++k) cross += std::abs(w(k));
    if (fixed + 2.0 * cross + tail[static_cast<std::size_t>(t)] <= result.best && result.z.size() != 0) return;

    // The objective is invariant under a global phase, so z_0 = 1.
    const int choices = t == 0 ? 1 : 8;
    std::array<std::pair<Real, int>, 8> order{};
    for (int q = 0; q < choices; ++q) order[static_cast<std::size_t>(q)] = {2.0 * (w(t) * grid[static_cast<std::size_t>(q)]).real(), q};
    std::sort(order.begin(), order.begin() + choices, [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int r = 0; r < choices; ++r) {
      const Complex zt = grid[static_cast<std::size_t>(order[static_cast<std::size_t>(r)].second)];
      z(t) = zt;
      const Real next = fixed + order[static_cast<std::size_t>(r)].first + m(t, t).real();
      w_stack[static_cast<std::size_t>(t + 1)] = w + std::conj(zt) * m.row(t).transpose();
      descend(t + 1, next);
    }
  };
  descend(0, 0.0);
  return result;
}

GammaResult gamma(const BlockDistribution& dist, const std::vector<Index>& delta, GammaMode mode) {
  const Index n = dist.dimension();
  const std::vector<Index> d = sorted_delta(delta, n);
  const Index s = static_cast<Index>(d.size());
  GammaResult out;
  out.gamma1.quantity = "gamma1";
  out.gamma2.quantity = "gamma2";
  out.gamma1.context = out.gamma2.context = dist.label + ", |Delta|=" + std::to_string(s);

  if (mode == GammaMode::Bound) {
    const Real bound = static_cast<Real>(s) * mu_joint(dist).value;
    out.gamma1.value = out.gamma2.value = bound;
    out.gamma1.method = out.gamma2.method = Method::Bound;
    return out;
  }
  if (s > kMaxPhaseSearch) throw DomainError("exact Gamma_2 needs |Delta| <= " + std::to_string(kMaxPhaseSearch));

  Real g1 = 0.0;
  std::vector<CMat> moments(static_cast<std::size_t>(n), CMat::Zero(s, s));
  for (std::size_t k = 0; k < dist.blocks.size(); ++k) {
    const CMat& b = dist.blocks[k];
    // R = B B^* P_Delta restricted to the Delta columns, N x s.
    const CMat r = b * rows(b, d).adjoint();
    g1 = std::max(g1, r.cwiseAbs().rowwise().sum().maxCoeff());
    for (Index i = 0; i < n; ++i) moments[static_cast<std::size_t>(i)] += dist.probabilities[k] * r.row(i).adjoint() * r.row(i);
  }
  out.gamma1.value = g1;

  Real lower = 0.0;
  Real upper = 0.0;
  for (Index i = 0; i < n; ++i) {
    const CMat& mi = moments[static_cast<std::size_t>(i)];
    lower = std::max(lower, phase_grid_max(mi, lower).best);
    Eigen::SelfAdjointEigenSolver<CMat> eig(mi, Eigen::EigenvaluesOnly);
    const Real lam = std::max(0.0, eig.eigenvalues().maxCoeff());
    upper = std::max(upper, std::min(mi.cwiseAbs().sum(), static_cast<Real>(s) * lam));
  }
  out.gamma2.value = lower;
  out.gamma2.lower = lower;
  out.gamma2.upper = std::max(upper, lower);
  return out;
}

std::vector<CoherenceReport> relative_sparsity(const SensorProfile& profiles, const LevelScheme& levels,
                                               SparsityMode mode, const std::optional<Ensemble>& ensemble) {
  const Partition& part = levels.partition;
  const Index n = profiles.dimension();
  if (part.size() != n) throw DomainError("relative_sparsity: partition length differs from N");
  std::vector<CoherenceReport> out;

  if (mode == SparsityMode::Bound) {
    if (profiles.kind() != ProfileKind::Diagonal) throw DomainError("relative_sparsity bound mode needs diagonal profiles");
    const ProfileNorms norms = profile_norms(profiles, part);
    for (Index c = 0; c < profiles.num_sensors(); ++c) {
      Real total = 0.0;
      for (Index dd = 0; dd < part.num_levels(); ++dd) {
        const Real r = norms.restricted[static_cast<std::size_t>(c)][static_cast<std::size_t>(dd)];
        total += r * r * static_cast<Real>(levels.local_sparsities[static_cast<std::size_t>(dd)]);
      }
      out.push_back({"S_" + std::to_string(c), total, Method::Bound, 0, std::nullopt, std::nullopt, "diagonal closed form"});
    }
    return out;
  }

  if (n > kMaxPhaseSearch) throw DomainError("relative_sparsity brute force needs N <= " + std::to_string(kMaxPhaseSearch));
  for (Index c = 0; c < profiles.num_sensors(); ++c) {
    CMat moment;
    if (ensemble) {
      moment = sensor_distribution(*ensemble, profiles, c).second_moment();
    } else {
      const CMat h = profiles.matrix(c);
      moment = h.adjoint() * h;
    }
    // Enumerate supports with exactly s_d indices in level d. Larger supports
    // dominate smaller ones because the phases of added entries are free.
    Real best = 0.0;
    std::vector<Index> chosen;
    std::function<void(Index, std::size_t, Index)> pick = [&](Index level, std::size_t from, Index left) {
      if (level == part.num_levels()) {
        if (chosen.empty()) return;
        best = std::max(best, phase_grid_max(rows(columns(moment, chosen), chosen), best).best);
        return;
      }
      if (left == 0) {
        const Index next = level + 1;
        pick(next, 0, next < part.num_levels() ? levels.local_sparsities[static_cast<std::size_t>(next)] : 0);
        return;
      }
      const auto& idx = part.level(level);
      for (std::size_t k = from; k + static_cast<std::size_t>(left) <= idx.size(); ++k) {
        chosen.push_back(idx[k]);
        pick(level, k + 1, left - 1);
        chosen.pop_back();
      }
    };
    pick(0, 0, levels.local_sparsities.front());
    out.push_back({"S_" + std::to_string(c), best, Method::Exact, 0, best, std::nullopt,
                   "8-phase grid maximum (lower bound on the complex supremum)"});
  }
  return out;
}

CoherenceReport sigma_g(const Ensemble& ensemble) {
  require_finite(ensemble, "sigma(G)");
  Real best = 0.0;
  const Real n = static_cast<Real>(ensemble.dimension());
  for (Index k = 0; k < ensemble.num_atoms(); ++k) {
    const Real l1 = norm1(unitary_dft(ensemble.atom(k)));
    best = std::max(best, l1 * l1 / n);
  }
  return {"sigma_g", best, Method::Exact, 0, std::nullopt, std::nullopt, ensemble.describe()};
}

CoherenceReport mu_joint(const BlockDistribution& dist) {
  Real best = 0.0;
  for (const auto& b : dist.blocks) best = std::max(best, (b * b.adjoint()).cwiseAbs().maxCoeff());
  return {"mu_joint", best, Method::Exact, 0, std::nullopt, std::nullopt, dist.label};
}

CoherenceReport mu_joint(const Ensemble& ensemble, const SensorProfile& profiles) {
  return mu_joint(identical_distribution(ensemble, profiles));
}

Real log_factor(Index n, Index s, Real eps) {
  if (n < 2) throw DomainError("log_factor: N must be at least 2");
  if (s < 2) throw DomainError("log_factor: s must be at least 2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("log_factor: eps must lie in (0, 1)");
  const Real sr = static_cast<Real>(s);
  return std::log(static_cast<Real>(n) / eps) + std::log(sr) * std::log(sr / eps);
}

namespace {

const std::map<BoundRule, std::string>& rule_names() {
  static const std::map<BoundRule, std::string> names = {
      {BoundRule::Thm21, "thm_2_1"}, {BoundRule::Cor31, "cor_3_1"}, {BoundRule::Cor32, "cor_3_2"},
      {BoundRule::Cor33, "cor_3_3"}, {BoundRule::Cor34, "cor_3_4"}, {BoundRule::Cor35, "cor_3_5"},
      {BoundRule::Cor36, "cor_3_6"}, {BoundRule::Cor41, "cor_4_1"}, {BoundRule::Cor42, "cor_4_2"},
      {BoundRule::Cor43, "cor_4_3"}, {BoundRule::Thm41, "thm_4_1"},
  };
  return names;
}

template <typename T>
const T& need(const std::optional<T>& v, const char* name) {
  if (!v) throw DomainError(std::string("bound query: missing ") + name);
  return *v;
}

const std::vector<Real>& need(const std::vector<Real>& v, const char* name, Index len) {
  if (v.empty()) throw DomainError(std::string("bound query: missing ") + name);
  if (len > 0 && static_cast<Index>(v.size()) != len)
    throw DomainError(std::string("bound query: ") + name + " needs " + std::to_string(len) + " entries");
  return v;
}

const std::vector<std::vector<Real>>& need_square(const std::vector<std::vector<Real>>& v, const char* name, Index len) {
  if (static_cast<Index>(v.size()) != len) throw DomainError(std::string("bound query: ") + name + " must be C x C");
  for (const auto& row : v)
    if (static_cast<Index>(row.size()) != len) throw DomainError(std::string("bound query: ") + name + " must be C x C");
  return v;
}

Real max_of(const std::vector<Real>& v) { return *std::max_element(v.begin(), v.end()); }

Real max_squared(const std::vector<Real>& v) {
  Real best = 0.0;
  for (Real x : v) best = std::max(best, x * x);
  return best;
}

}  // namespace

std::string to_string(BoundRule rule) { return rule_names().at(rule); }

BoundRule parse_bound_rule(const std::string& name) {
  for (const auto& [rule, label] : rule_names())
    if (label == name) return rule;
  throw DomainError("unknown bound rule: " + name);
}

nlohmann::json BoundResult::to_json() const {
  nlohmann::json doc;
  doc["rule"] = to_string(rule);
  doc["rhs"] = rhs;
  doc["log_factor"] = log_factor;
  doc["log_base"] = "e";
  doc["note"] = "up to universal constant";
  if (side_value) doc["side_condition"] = {{"value", *side_value}, {"pass", side_pass.value_or(false)}};
  doc["inputs"] = inputs;
  return doc;
}

BoundResult required_measurements(const BoundQuery& q) {
  const bool needs_levels = q.rule == BoundRule::Cor32 || q.rule == BoundRule::Cor34 ||
                            (q.rule == BoundRule::Thm41 && !q.lambda);
  if (needs_levels && !q.levels) throw DomainError("bound query: " + to_string(q.rule) + " needs a levels scheme");
  Index s = 0;
  if (q.levels) {
    s = q.levels->total_sparsity();
    if (q.s && *q.s != s) throw DomainError("bound query: s differs from the sum of local sparsities");
    if (q.levels->partition.size() != q.n) throw DomainError("bound query: partition length differs from N");
  } else {
    s = need(q.s, "s");
  }
  if (s < 2) throw DomainError("bound query: s must be at least 2");
  if (s > q.n) throw DomainError("bound query: s must not exceed N");
  if (q.num_sensors < 1) throw DomainError("bound query: C must be positive");

  BoundResult out;
  out.rule = q.rule;
  out.log_factor = log_factor(q.n, s, q.eps);
  const Real L = out.log_factor;
  const Real sr = static_cast<Real>(s);
  const Index C = q.num_sensors;
  const Real cr = static_cast<Real>(C);
  nlohmann::json& in = out.inputs;
  in["N"] = q.n;
  in["s"] = s;
  in["eps"] = q.eps;
  in["C"] = C;
  if (q.levels) in["local_sparsities"] = q.levels->local_sparsities;

  switch (q.rule) {
    case BoundRule::Thm21: {
      const Real d = need(q.d, "D");
      const Real g = need(q.gamma, "gamma");
      in["D"] = d;
      in["gamma"] = g;
      out.rhs = d * g * L;
      break;
    }
    case BoundRule::Cor31: {
      const Real m = max_of(need(q.mu_sensors, "mu_sensors", 0));
      in["mu_sensors"] = q.mu_sensors;
      out.rhs = sr * m * L;
      break;
    }
    case BoundRule::Cor32: {
      const auto& sd = q.levels->local_sparsities;
      const auto& mu = need_square(q.mu_lev, "mu_levels", C);
      const auto& frac = need(q.row_fractions, "row_fractions", C);
      const auto& rel = need(q.relative_sparsities, "relative_sparsities", C);
      if (q.levels->partition.num_levels() != C) throw DomainError("bound query: cor_3_2 needs C levels");
      Real first = 0.0, second = 0.0;
      for (Index c = 0; c < C; ++c) {
        Real a = 0.0, b = 0.0;
        for (Index d = 0; d < C; ++d) {
          const auto cs = static_cast<std::size_t>(c), ds = static_cast<std::size_t>(d);
          a += mu[cs][ds] * static_cast<Real>(sd[ds]);
          b += frac[ds] * mu[ds][cs] * rel[ds];
        }
        first = std::max(first, a);
        second = std::max(second, b);
      }
      in["mu_levels"] = q.mu_lev;
      in["row_fractions"] = frac;
      in["relative_sparsities"] = rel;
      out.rhs = std::max(first, second) * L;
      break;
    }
    case BoundRule::Cor33: {
      const Real mg = need(q.mu_g, "mu_g");
      const Real pen = max_squared(need(q.inf_norms, "inf_norms", C));
      in["mu_g"] = mg;
      in["inf_norms"] = q.inf_norms;
      out.rhs = sr * mg * pen * L;
      break;
    }
    case BoundRule::Cor34: {
      const Real mg = need(q.mu_g, "mu_g");
      const auto& inf = need(q.inf_norms, "inf_norms", C);
      const auto& res = need_square(q.restricted, "restricted_norms", C);
      if (q.levels->partition.num_levels() != C) throw DomainError("bound query: cor_3_4 needs C levels");
      const auto& sd = q.levels->local_sparsities;
      Real side = 0.0, sigma = 0.0;
      for (Index c = 0; c < C; ++c) {
        Real a = 0.0, b = 0.0;
        for (Index d = 0; d < C; ++d) {
          const auto cs = static_cast<std::size_t>(c), ds = static_cast<std::size_t>(d);
          a += inf[ds] * res[ds][cs];
          b += inf[cs] * res[cs][ds] * static_cast<Real>(sd[ds]);
        }
        side = std::max(side, a);
        sigma = std::max(sigma, b);
      }
      in["mu_g"] = mg;
      in["inf_norms"] = inf;
      in["restricted_norms"] = res;
      out.side_value = side;
      out.side_pass = side <= cr * (1.0 + 1e-12);
      out.rhs = mg * sigma * L;
      break;
    }
    case BoundRule::Cor35: {
      const Real mg = need(q.mu_g, "mu_g");
      const Real pen = max_squared(need(q.filter_l1, "filter_l1", C));
      in["mu_g"] = mg;
      in["filter_l1"] = q.filter_l1;
      out.rhs = sr * mg * pen * L;
      break;
    }
    case BoundRule::Cor36: {
      const auto& lam = need(q.eigen_inf, "eigen_inf", C);
      const auto& sg = need(q.sigma_g, "sigma_g", C);
      Real pen = 0.0;
      for (Index c = 0; c < C; ++c) {
        const auto cs = static_cast<std::size_t>(c);
        pen = std::max(pen, lam[cs] * lam[cs] * sg[cs]);
      }
      in["eigen_inf"] = lam;
      in["sigma_g"] = sg;
      out.rhs = sr * pen * L;
      break;
    }
    case BoundRule::Cor41: {
      const Real mj = need(q.mu_joint, "mu_joint");
      in["mu_joint"] = mj;
      out.rhs = sr * cr * mj * L;
      break;
    }
    case BoundRule::Cor42: {
      const Real mg = need(q.mu_g, "mu_g");
      in["mu_g"] = mg;
      out.rhs = sr * cr * mg * L;
      break;
    }
    case BoundRule::Cor43: {
      const Real mg = need(q.mu_g, "mu_g");
      Real total = 0.0;
      for (Real h : need(q.filter_l1, "filter_l1", C)) total += h * h;
      in["mu_g"] = mg;
      in["filter_l1"] = q.filter_l1;
      out.rhs = sr * cr * mg * total * L;
      break;
    }
    case BoundRule::Thm41: {
      const Real mg = need(q.mu_g, "mu_g");
      in["mu_g"] = mg;
      if (q.levels) {
        // C * max s_c in integer arithmetic.
        const Index load = C * q.levels->max_local_sparsity();
        out.rhs = mg * static_cast<Real>(load) * L;
      } else {
        if (!(*q.lambda >= 1.0)) throw DomainError("bound query: lambda must be at least 1");
        in["lambda"] = *q.lambda;
        out.rhs = mg * (*q.lambda * sr) * L;
      }
      break;
    }
  }
  return out;
}

}  // namespace pacs
