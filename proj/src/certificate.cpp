#include "pacs/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pacs/errors.hpp"

namespace pacs {

Real CertificateParams::combined() const { return theta + beta * gamma / (1.0 - alpha); }

bool CertificateParams::admissible() const {
  return alpha >= 0.0 && alpha < 1.0 && beta >= 0.0 && gamma >= 0.0 && theta >= 0.0 && sigma >= 0.0 && combined() < 1.0;
}

Index GolfingSchedule::total_rows() const { return std::accumulate(p.begin(), p.end(), Index{0}); }

GolfingSchedule golfing_schedule(Index s, Index p) {
  if (s < 2) throw DomainError("golfing schedule: s must be at least 2");
  const Real half_log = 0.5 * std::log2(static_cast<Real>(s));
  GolfingSchedule sch;
  sch.L = 2 + static_cast<Index>(std::ceil(half_log));
  const auto L = static_cast<std::size_t>(sch.L);
  sch.a.assign(L, 0.5);
  sch.b.assign(L, half_log / 4.0);
  sch.a[0] = sch.a[1] = 1.0 / (2.0 * std::sqrt(half_log));
  sch.b[0] = sch.b[1] = 0.25;

  sch.p.assign(L, p / (2 * (sch.L - 2)));
  const Index rest = p - (sch.L - 2) * sch.p[2];
  sch.p[1] = rest / 2;
  sch.p[0] = rest - sch.p[1];
  for (Index pl : sch.p)
    if (pl < 1) throw DomainError("golfing schedule: p = " + std::to_string(p) + " leaves an empty block");
  return sch;
}

std::vector<GolfingBlock> split_blocks(const ParallelSystem& system, const GolfingSchedule& schedule) {
  const Index p = system.num_draws();
  if (schedule.total_rows() != p) throw DomainError("golfing: schedule does not match the number of draws");
  std::vector<GolfingBlock> blocks;
  Index next = 0;
  for (Index pl : schedule.p) {
    GolfingBlock blk;
    blk.draws = pl;
    for (Index i = next; i < next + pl; ++i)
      for (Index r : system.rows_of_draw(i)) blk.rows.push_back(r);
    blk.A.resize(static_cast<Index>(blk.rows.size()), system.cols());
    const Real lift = std::sqrt(static_cast<Real>(p) / static_cast<Real>(pl));
    for (std::size_t k = 0; k < blk.rows.size(); ++k) blk.A.row(static_cast<Index>(k)) = lift * system.A.row(blk.rows[k]);
    blocks.push_back(std::move(blk));
    next += pl;
  }
  return blocks;
}

namespace {

CVec restrict_to(const CVec& v, const std::vector<Index>& delta) {
  CVec out = CVec::Zero(v.size());
  for (Index j : delta) out(j) = v(j);
  return out;
}

std::vector<bool> membership(Index n, const std::vector<Index>& delta) {
  std::vector<bool> in(static_cast<std::size_t>(n), false);
  for (Index j : delta) {
    if (j < 0 || j >= n) throw DomainError("Delta index out of range");
    in[static_cast<std::size_t>(j)] = true;
  }
  return in;
}

CMat principal(const CMat& m, const std::vector<Index>& idx) {
  const auto k = static_cast<Index>(idx.size());
  CMat out(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) out(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return out;
}

ConditionValue at_most(Real value, Real threshold) { return {value, threshold, value <= threshold + 1e-12}; }

nlohmann::json to_json(const ConditionValue& c) {
  return {{"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}};
}

}  // namespace

GolfingResult golfing_construct(const std::vector<GolfingBlock>& blocks, Index m, Index total_draws,
                                const std::vector<Index>& delta, const CVec& x) {
  const Index n = x.size();
  membership(n, delta);
  GolfingResult out;
  out.rho = CVec::Zero(n);
  out.xi = CVec::Zero(m);
  const CVec target = complex_sign(restrict_to(x, delta));
  out.v.push_back(target);
  for (const auto& blk : blocks) {
    if (blk.A.cols() != n) throw DomainError("golfing: block width differs from N");
    const CVec& v = out.v.back();
    const CVec av = blk.A * v;
    out.rho += blk.A.adjoint() * av;
    const Real lift = std::sqrt(static_cast<Real>(total_draws) / static_cast<Real>(blk.draws));
    for (std::size_t k = 0; k < blk.rows.size(); ++k) {
      if (blk.rows[k] < 0 || blk.rows[k] >= m) throw DomainError("golfing: block row outside A");
      out.xi(blk.rows[k]) += lift * av(static_cast<Index>(k));
    }
    out.v.push_back(target - restrict_to(out.rho, delta));
  }
  return out;
}

CertificateReport check_conditions(const CMat& A, const std::vector<Index>& delta, const CVec& x, const CVec& rho,
                                   const CVec& xi, const CertificateParams& params) {
  const Index n = A.cols();
  if (x.size() != n || rho.size() != n || xi.size() != A.rows()) throw DomainError("certificate: shape mismatch");
  if (delta.empty()) throw DomainError("certificate: Delta must be nonempty");
  const auto in = membership(n, delta);
  const CMat gram = A.adjoint() * A;

  CertificateReport rep;
  CMat dev = principal(gram, delta);
  dev.diagonal().array() -= 1.0;
  rep.cond[0] = at_most(spectral_norm(dev), params.alpha);

  Real off = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (in[static_cast<std::size_t>(i)]) continue;
    Real sq = 0.0;
    for (Index j : delta) sq += std::norm(gram(j, i));
    off = std::max(off, std::sqrt(sq));
  }
  rep.cond[1] = at_most(off, params.beta);

  rep.cond[2] = at_most((restrict_to(rho, delta) - complex_sign(restrict_to(x, delta))).norm(), params.gamma);

  Real outside = 0.0;
  for (Index i = 0; i < n; ++i)
    if (!in[static_cast<std::size_t>(i)]) outside = std::max(outside, std::abs(rho(i)));
  rep.cond[3] = at_most(outside, params.theta);

  rep.cond[4] = at_most(xi.norm() / std::sqrt(static_cast<Real>(delta.size())), params.sigma);

  rep.combined = params.combined();
  rep.combined_pass = params.alpha < 1.0 && rep.combined < 1.0;
  rep.valid = rep.combined_pass;
  for (const auto& c : rep.cond) rep.valid = rep.valid && c.pass;
  return rep;
}

nlohmann::json CertificateReport::to_json() const {
  nlohmann::json doc;
  const char* names[5] = {"i", "ii", "iii", "iv", "v"};
  for (int k = 0; k < 5; ++k) doc["conditions"][names[k]] = pacs::to_json(cond[k]);
  doc["measured_sigma"] = measured_sigma();
  doc["combined"] = combined;
  doc["combined_pass"] = combined_pass;
  doc["valid"] = valid;
  return doc;
}

EventReport check_events(const std::vector<GolfingBlock>& blocks, const CMat& A, const std::vector<Index>& delta,
                         const GolfingSchedule& schedule, const std::vector<CVec>& v) {
  const Index n = A.cols();
  if (static_cast<Index>(blocks.size()) != schedule.L || static_cast<Index>(v.size()) != schedule.L + 1)
    throw DomainError("events: blocks and v sequence must follow the schedule");
  const auto in = membership(n, delta);
  EventReport rep;
  for (Index l = 0; l < schedule.L; ++l) {
    const auto ls = static_cast<std::size_t>(l);
    const CVec& prev = v[ls];
    const CVec w = blocks[ls].A.adjoint() * (blocks[ls].A * prev);
    const Real scale = norm_inf(prev);
    Real a_lhs = 0.0, b_lhs = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (in[static_cast<std::size_t>(j)]) a_lhs = std::max(a_lhs, std::abs(prev(j) - w(j)));
      else b_lhs = std::max(b_lhs, std::abs(w(j)));
    }
    rep.A.push_back(at_most(a_lhs, schedule.a[ls] * scale));
    rep.B.push_back(at_most(b_lhs, schedule.b[ls] * scale));
  }

  const CMat gram = A.adjoint() * A;
  CMat dev = principal(gram, delta);
  dev.diagonal().array() -= 1.0;
  rep.C = at_most(spectral_norm(dev), 0.25);
  Real off = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (in[static_cast<std::size_t>(i)]) continue;
    Real sq = 0.0;
    for (Index j : delta) sq += std::norm(gram(j, i));
    off = std::max(off, std::sqrt(sq));
  }
  // An empty maximum (Delta = everything) passes.
  rep.D = at_most(off, 1.0);
  return rep;
}

bool EventReport::all() const {
  bool ok = C.pass && D.pass;
  for (const auto& e : A) ok = ok && e.pass;
  for (const auto& e : B) ok = ok && e.pass;
  return ok;
}

nlohmann::json EventReport::to_json() const {
  nlohmann::json doc;
  for (const auto& e : A) doc["A"].push_back(pacs::to_json(e));
  for (const auto& e : B) doc["B"].push_back(pacs::to_json(e));
  doc["C"] = pacs::to_json(C);
  doc["D"] = pacs::to_json(D);
  doc["all"] = all();
  return doc;
}

ChainBounds chain_bounds(const GolfingSchedule& schedule, Index s) {
  ChainBounds out;
  Real prod = 1.0;
  Real total = 0.0;
  Index p = 0;
  for (Index l = 0; l < schedule.L; ++l) {
    const auto ls = static_cast<std::size_t>(l);
    out.cond4 += schedule.b[ls] * prod;
    total += std::sqrt((schedule.a[ls] + 1.0) / static_cast<Real>(schedule.p[ls])) * prod;
    prod *= schedule.a[ls];
    p += schedule.p[ls];
  }
  const Real root_s = std::sqrt(static_cast<Real>(s));
  out.cond3 = root_s * prod;
  out.xi = root_s * std::sqrt(static_cast<Real>(p)) * total;
  return out;
}

CertificateOutcome run_certificate_instance(const CertificateSetup& setup, const SolverConfig& solver) {
  const Index n = setup.n;
  const Index num_sensors = setup.num_sensors;
  if (num_sensors < 1 || setup.s % num_sensors != 0)
    throw DomainError("certificate instance: C must divide s for an equidistributed support");
  const RngStream master(setup.seed);
  const Partition levels = contiguous_partition(n, num_sensors);

  CertificateOutcome out;
  Generator sig = master.substream(0).generator();
  for (Index c = 0; c < num_sensors; ++c) {
    const auto& level = levels.level(c);
    for (Index k : subset_without_replacement(sig, static_cast<Index>(level.size()), setup.s / num_sensors))
      out.delta.push_back(level[static_cast<std::size_t>(k)]);
  }
  std::sort(out.delta.begin(), out.delta.end());
  out.x = CVec::Zero(n);
  const CVec values = unit_circle(sig, setup.s);
  for (std::size_t k = 0; k < out.delta.size(); ++k) out.x(out.delta[k]) = values(static_cast<Index>(k));

  ProfileParams params;
  params.num_sensors = num_sensors;
  params.dimension = n;
  params.mode = SamplingMode::Identical;
  params.partition = levels;
  params.rng = master.substream(1);
  const SensorProfile profile = build_profile(setup.family, params);

  Ensemble ens = Ensemble::gaussian(n);
  if (setup.ensemble == "dft_iid") {
    const Ensemble dft = Ensemble::subsampled_dft(n);
    std::vector<CVec> atoms;
    for (Index k = 0; k < n; ++k) atoms.push_back(dft.atom(k));
    ens = Ensemble::explicit_atoms(std::move(atoms), std::vector<Real>(static_cast<std::size_t>(n), 1.0 / static_cast<Real>(n)));
  } else if (setup.ensemble != "gaussian") {
    throw DomainError("certificate instance: ensemble must be dft_iid or gaussian");
  }
  const ParallelSystem system =
      assemble(SamplingMode::Identical, {ens}, profile, {setup.draws * num_sensors}, master.substream(2));

  out.schedule = golfing_schedule(setup.s, setup.draws);
  const auto blocks = split_blocks(system, out.schedule);
  out.golfing = golfing_construct(blocks, system.rows(), system.num_draws(), out.delta, out.x);
  out.report = check_conditions(system.A, out.delta, out.x, out.golfing.rho, out.golfing.xi, setup.params);
  out.events = check_events(blocks, system.A, out.delta, out.schedule, out.golfing.v);
  out.chains = chain_bounds(out.schedule, setup.s);

  const CVec y = system.A * out.x;
  out.solve = bpdn_solve(system.A, y, 0.0, solver);
  out.recovery_error = (out.solve.x - out.x).norm() / out.x.norm();
  return out;
}

nlohmann::json CertificateOutcome::to_json() const {
  nlohmann::json doc;
  doc["delta"] = delta;
  doc["schedule"] = {{"L", schedule.L}, {"a", schedule.a}, {"b", schedule.b}, {"p", schedule.p}};
  doc["conditions"] = report.to_json();
  doc["events"] = events.to_json();
  doc["chain_bounds"] = {{"iii", chains.cond3}, {"iv", chains.cond4}, {"xi", chains.xi}};
  doc["recovery"] = {{"relative_error", recovery_error}, {"status", to_string(solve.status)}, {"iterations", solve.iterations}};
  return doc;
}

}  // namespace pacs
