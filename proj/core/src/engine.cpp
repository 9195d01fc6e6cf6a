#include "ess/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "ess/solver.hpp"

namespace ess {

namespace {

SolverOptions solver_options(const SolverConfig& config) {
  SolverOptions opts;
  opts.feas_tol = config.feas_tol;
  opts.opt_gap = config.opt_gap;
  opts.node_budget = config.node_budget;
  return opts;
}

// g_i with opponents restricted to the support, as a polynomial over the
// support-position variables. Degree is n-1.
Polynomial response_polynomial(const SymmetricGame& game, const Support& support,
                               int action) {
  const int m = support.size();
  const int opp_slots = game.players() - 1;
  Polynomial poly;
  std::vector<int> pos(static_cast<size_t>(opp_slots), 0);
  std::vector<int> actions(static_cast<size_t>(opp_slots), 0);
  while (true) {
    for (int s = 0; s < opp_slots; ++s)
      actions[static_cast<size_t>(s)] = support.actions[static_cast<size_t>(pos[static_cast<size_t>(s)])];
    poly.add_term(game.entry(action, actions), std::vector<int>(pos.begin(), pos.end()));
    int carry = opp_slots - 1;
    for (; carry >= 0; --carry) {
      if (++pos[static_cast<size_t>(carry)] < m) break;
      pos[static_cast<size_t>(carry)] = 0;
    }
    if (carry < 0) break;
  }
  poly.canonicalize(0.0);
  return poly;
}

MixedStrategy zero_extend(const SymmetricGame& game, const Support& support,
                          std::span<const double> point) {
  std::vector<double> probs(static_cast<size_t>(game.num_actions()), 0.0);
  double sum = 0.0;
  for (int pos = 0; pos < support.size(); ++pos) {
    double p = std::max(point[static_cast<size_t>(pos)], 0.0);
    probs[static_cast<size_t>(support.actions[static_cast<size_t>(pos)])] = p;
    sum += p;
  }
  for (double& p : probs) p /= sum;
  return MixedStrategy(std::move(probs));
}

std::vector<MixedStrategy> one_deviation_profile(const SymmetricGame& game,
                                                 const MixedStrategy& base,
                                                 const MixedStrategy& deviator,
                                                 int slot) {
  std::vector<MixedStrategy> profile;
  profile.reserve(static_cast<size_t>(game.players()));
  for (int s = 0; s < game.players(); ++s)
    profile.push_back(s == slot ? deviator : base);
  return profile;
}

// F(y) = U(x, y, x, ..., x) - U(y, y, x, ..., x) for a K-dim mutant.
double invasion_objective(const SymmetricGame& game, const MixedStrategy& x,
                          const MixedStrategy& y) {
  std::vector<MixedStrategy> resist = one_deviation_profile(game, x, y, 1);
  double u_resident = game.expected_utility(resist);
  std::vector<MixedStrategy> invade = resist;
  invade[0] = y;
  double u_mutant = game.expected_utility(invade);
  return u_resident - u_mutant;
}

}  // namespace

std::vector<Support> enumerate_supports(int num_actions) {
  if (num_actions < 1)
    throw Error(ErrorCode::InvalidConfig, "need at least one action");
  if (num_actions > 24)
    throw Error(ErrorCode::InvalidConfig, "support enumeration beyond K=24");
  std::vector<Support> out;
  out.reserve((size_t{1} << num_actions) - 1);
  for (int size = 1; size <= num_actions; ++size) {
    std::vector<int> combo(static_cast<size_t>(size));
    for (int i = 0; i < size; ++i) combo[static_cast<size_t>(i)] = i;
    while (true) {
      out.emplace_back(combo);
      int i = size - 1;
      while (i >= 0 && combo[static_cast<size_t>(i)] == num_actions - size + i) --i;
      if (i < 0) break;
      ++combo[static_cast<size_t>(i)];
      for (int j = i + 1; j < size; ++j)
        combo[static_cast<size_t>(j)] = combo[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return out;
}

PolynomialProgram build_sne_program(const SymmetricGame& game,
                                    const Support& support, double eps_s) {
  const int m = support.size();
  if (support.actions.back() >= game.num_actions())
    throw Error(ErrorCode::IndexOutOfRange, "support action out of range");

  PolynomialProgram program;
  program.num_vars = m;
  program.lower.assign(static_cast<size_t>(m), eps_s);
  program.upper.assign(static_cast<size_t>(m),
                       1.0 - eps_s * static_cast<double>(m - 1));
  LinearConstraint sum;
  sum.coeffs.assign(static_cast<size_t>(m), 1.0);
  sum.rhs = 1.0;
  program.linear_eqs.push_back(std::move(sum));

  std::vector<Polynomial> g(static_cast<size_t>(game.num_actions()));
  for (int i = 0; i < game.num_actions(); ++i)
    g[static_cast<size_t>(i)] = response_polynomial(game, support, i);

  const int i0 = support.actions.front();
  for (int i : support.actions) {
    if (i == i0) continue;
    Polynomial diff = g[static_cast<size_t>(i)];
    Polynomial neg = g[static_cast<size_t>(i0)];
    neg *= -1.0;
    diff += neg;
    diff.canonicalize(0.0);
    program.poly_eqs.push_back(std::move(diff));
  }
  for (int i = 0; i < game.num_actions(); ++i) {
    if (support.contains(i)) continue;
    Polynomial diff = g[static_cast<size_t>(i)];
    Polynomial neg = g[static_cast<size_t>(i0)];
    neg *= -1.0;
    diff += neg;
    diff.canonicalize(0.0);
    program.poly_ineqs.push_back(std::move(diff));
  }
  program.sense = Sense::Feasibility;
  return program;
}

SneSolve sne_support_qcp(const SymmetricGame& game, const Support& support,
                         const SolverConfig& config) {
  PolynomialProgram program = build_sne_program(game, support, config.eps_s);
  GlobalSolver solver(solver_options(config));
  SolveOutcome outcome = solver.solve_feasibility(program);

  SneSolve result;
  result.nodes = outcome.nodes;
  switch (outcome.status) {
    case SolveStatus::Feasible:
      result.status = QcpStatus::Feasible;
      result.sne = SneResult{support, zero_extend(game, support, outcome.point)};
      break;
    case SolveStatus::Infeasible:
      result.status = QcpStatus::Infeasible;
      break;
    default:
      result.status = QcpStatus::Unresolved;
      break;
  }
  return result;
}

const char* cert_path_name(CertPath path) {
  switch (path) {
    case CertPath::StrictShortcut: return "strict-shortcut";
    case CertPath::PureInvaded: return "pure-invaded";
    case CertPath::MixedInvaded: return "mixed-invaded";
    case CertPath::Neutral: return "neutral";
    case CertPath::MixedPass: return "mixed-pass";
    case CertPath::QcqpInfeasible: return "qcqp-infeasible";
  }
  return "unknown";
}

std::string EssCertificate::path_string() const {
  std::string s = cert_path_name(path);
  if (path == CertPath::PureInvaded)
    s += "(" + std::to_string(invader) + ")";
  return s;
}

QcqpResult ess_qcqp(const SymmetricGame& game, const MixedStrategy& x,
                    const Support& br_set, const SolverConfig& config) {
  const int m = br_set.size();
  const int K = game.num_actions();

  PolynomialProgram program;
  program.num_vars = m;
  program.lower.assign(static_cast<size_t>(m), 0.0);
  program.upper.assign(static_cast<size_t>(m), 1.0);
  LinearConstraint sum;
  sum.coeffs.assign(static_cast<size_t>(m), 1.0);
  sum.rhs = 1.0;
  program.linear_eqs.push_back(std::move(sum));

  // mutants must leave the delta-ball around x
  Polynomial ball(config.delta * config.delta);
  for (int pos = 0; pos < m; ++pos) {
    double xi = x[br_set.actions[static_cast<size_t>(pos)]];
    ball.add_constant(-xi * xi);
    ball.add_term(2.0 * xi, {pos});
    ball.add_term(-1.0, {pos, pos});
  }
  program.poly_ineqs.push_back(std::move(ball));

  // F(y) = c.y - y^T M y with c_j = U(x, e_j, x, ...) and
  // M_ij = U(e_i, e_j, x, ...).
  Polynomial objective;
  std::vector<std::vector<double>> M(static_cast<size_t>(m),
                                     std::vector<double>(static_cast<size_t>(m)));
  for (int j = 0; j < m; ++j) {
    MixedStrategy ej = MixedStrategy::basis(K, br_set.actions[static_cast<size_t>(j)]);
    std::vector<MixedStrategy> profile = one_deviation_profile(game, x, ej, 1);
    objective.add_term(game.expected_utility(profile), {j});
    for (int i = 0; i < m; ++i) {
      std::vector<MixedStrategy> pair = profile;
      pair[0] = MixedStrategy::basis(K, br_set.actions[static_cast<size_t>(i)]);
      M[static_cast<size_t>(i)][static_cast<size_t>(j)] = game.expected_utility(pair);
    }
  }
  for (int i = 0; i < m; ++i) {
    objective.add_term(-M[static_cast<size_t>(i)][static_cast<size_t>(i)], {i, i});
    for (int j = i + 1; j < m; ++j)
      objective.add_term(
          -(M[static_cast<size_t>(i)][static_cast<size_t>(j)] + M[static_cast<size_t>(j)][static_cast<size_t>(i)]),
          {i, j});
  }
  objective.canonicalize(0.0);
  program.objective = std::move(objective);
  program.sense = Sense::Minimize;

  // incumbent hints: the br-simplex vertices
  std::vector<std::vector<double>> hints;
  for (int pos = 0; pos < m; ++pos) {
    std::vector<double> v(static_cast<size_t>(m), 0.0);
    v[static_cast<size_t>(pos)] = 1.0;
    hints.push_back(std::move(v));
  }

  GlobalSolver solver(solver_options(config));
  SolveOutcome outcome = solver.optimize_global(program, hints);

  QcqpResult result;
  result.status = outcome.status;
  result.nodes = outcome.nodes;
  if (outcome.status == SolveStatus::GlobalOpt) {
    std::vector<double> mutant(static_cast<size_t>(K), 0.0);
    double total = 0.0;
    for (int pos = 0; pos < m; ++pos) {
      double v = std::max(outcome.point[static_cast<size_t>(pos)], 0.0);
      mutant[static_cast<size_t>(br_set.actions[static_cast<size_t>(pos)])] = v;
      total += v;
    }
    for (double& v : mutant) v /= total;
    MixedStrategy y(mutant);
    result.minimizer = y.probs();
    result.f_star = invasion_objective(game, x, y);
  }
  return result;
}

EssCheck is_ess(const SymmetricGame& game, const MixedStrategy& x,
                const SolverConfig& config) {
  EssCheck check;
  Support br = game.best_response_set(x, config.eps_p);

  EssCertificate cert{x, false, CertPath::Neutral, -1, std::nullopt, br};

  // strict equilibrium: a pure strategy uniquely best against itself
  if (br.size() == 1 && x.is_pure()) {
    cert.is_ess = true;
    cert.path = CertPath::StrictShortcut;
    check.resolved = true;
    check.certificate = std::move(cert);
    return check;
  }

  // pure-mutant screen
  for (int i : br.actions) {
    MixedStrategy ei = MixedStrategy::basis(game.num_actions(), i);
    std::vector<MixedStrategy> profile = one_deviation_profile(game, x, ei, 1);
    double u1 = game.expected_utility(profile);
    std::vector<MixedStrategy> both = profile;
    both[0] = ei;
    double u2 = game.expected_utility(both);
    if (u1 + config.eps_p <= u2) {
      cert.is_ess = false;
      cert.path = CertPath::PureInvaded;
      cert.invader = i;
      check.resolved = true;
      check.certificate = std::move(cert);
      return check;
    }
  }

  // mixed-mutant screen
  QcqpResult qcqp = ess_qcqp(game, x, br, config);
  if (qcqp.status == SolveStatus::BudgetExceeded) {
    check.resolved = false;
    return check;
  }
  if (qcqp.status == SolveStatus::Infeasible) {
    cert.is_ess = false;
    cert.path = CertPath::QcqpInfeasible;
    check.resolved = true;
    check.certificate = std::move(cert);
    return check;
  }
  cert.margin = qcqp.f_star;
  if (qcqp.f_star < -config.eps_p) {
    cert.is_ess = false;
    cert.path = CertPath::MixedInvaded;
  } else if (qcqp.f_star > config.eps_p) {
    cert.is_ess = true;
    cert.path = CertPath::MixedPass;
  } else {
    cert.is_ess = false;
    cert.path = CertPath::Neutral;
  }
  check.resolved = true;
  check.certificate = std::move(cert);
  return check;
}

MaxDistResult sne_maxdist(const SymmetricGame& game, const Support& support,
                          const MixedStrategy& x, const SolverConfig& config) {
  PolynomialProgram program = build_sne_program(game, support, config.eps_s);
  const int m = support.size();

  Polynomial objective;
  for (int pos = 0; pos < m; ++pos) {
    double xi = x[support.actions[static_cast<size_t>(pos)]];
    objective.add_constant(xi * xi);
    objective.add_term(-2.0 * xi, {pos});
    objective.add_term(1.0, {pos, pos});
  }
  program.objective = std::move(objective);
  program.sense = Sense::Maximize;

  // incumbents: x itself plus the eps_s-clamped vertices of the support
  // simplex (the farthest candidates when a continuum exists)
  std::vector<std::vector<double>> hints;
  {
    std::vector<double> xr(static_cast<size_t>(m));
    for (int pos = 0; pos < m; ++pos)
      xr[static_cast<size_t>(pos)] = x[support.actions[static_cast<size_t>(pos)]];
    hints.push_back(std::move(xr));
  }
  for (int pos = 0; pos < m; ++pos) {
    std::vector<double> v(static_cast<size_t>(m), config.eps_s);
    v[static_cast<size_t>(pos)] = 1.0 - config.eps_s * static_cast<double>(m - 1);
    hints.push_back(std::move(v));
  }

  double gap_target = std::min(config.opt_gap, config.eps_dist / 4.0);
  GlobalSolver solver(solver_options(config));
  SolveOutcome outcome = solver.optimize_global_gap(program, gap_target, hints);

  MaxDistResult result;
  switch (outcome.status) {
    case SolveStatus::GlobalOpt: {
      result.resolved = true;
      double d = 0.0;
      for (int pos = 0; pos < m; ++pos) {
        double diff = outcome.point[static_cast<size_t>(pos)] -
                      x[support.actions[static_cast<size_t>(pos)]];
        d += diff * diff;
      }
      result.d_star = d;
      result.another_sne = d > config.eps_dist;
      break;
    }
    case SolveStatus::Infeasible:
      // cannot happen when x itself satisfied the same constraints
      result.resolved = true;
      result.another_sne = false;
      result.d_star = 0.0;
      break;
    default:
      result.resolved = false;
      break;
  }
  return result;
}

DegeneracyReport degeneracy_check(const SymmetricGame& game,
                                  const SolverConfig& config) {
  config.validate();
  DegeneracyReport report;
  for (const Support& support : enumerate_supports(game.num_actions())) {
    SneSolve solve = sne_support_qcp(game, support, config);
    if (solve.status == QcpStatus::Unresolved) {
      report.fully_resolved = false;
      continue;
    }
    if (solve.status != QcpStatus::Feasible) continue;
    MaxDistResult dist = sne_maxdist(game, support, solve.sne->strategy, config);
    if (!dist.resolved) {
      report.fully_resolved = false;
      continue;
    }
    if (dist.another_sne)
      report.witnesses.push_back(DegeneracyWitness{support, dist.d_star});
  }
  report.degenerate = !report.witnesses.empty();
  return report;
}

std::vector<SneResult> EssRun::sne_list() const {
  std::vector<SneResult> out;
  for (const auto& rec : records)
    if (rec.sne) out.push_back(SneResult{rec.support, *rec.sne});
  return out;
}

namespace {

SupportRecord process_support(const SymmetricGame& game, const Support& support,
                              const SolverConfig& config) {
  SupportRecord rec;
  rec.support = support;
  SneSolve solve = sne_support_qcp(game, support, config);
  rec.qcp_status = solve.status;
  if (solve.status != QcpStatus::Feasible) return rec;

  rec.sne = solve.sne->strategy;
  EssCheck check = is_ess(game, *rec.sne, config);
  if (!check.resolved) {
    rec.ess_unresolved = true;
    return rec;
  }
  rec.certificate = std::move(check.certificate);
  return rec;
}

}  // namespace

EssRun compute_all_ess(const SymmetricGame& game, const SolverConfig& config) {
  config.validate();
  EssRun run;
  std::vector<Support> supports = enumerate_supports(game.num_actions());
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  // completion time per support, taken when its record is finished; the
  // time to the first ESS is the completion time of the earliest ESS in
  // enumeration order
  std::vector<double> done_at;

  const bool sequential = config.threads <= 1 || config.first_only;
  if (sequential) {
    for (const Support& support : supports) {
      SupportRecord rec = process_support(game, support, config);
      bool found_ess = rec.certificate && rec.certificate->is_ess;
      run.records.push_back(std::move(rec));
      done_at.push_back(elapsed());
      if (found_ess && config.first_only) break;
    }
  } else {
    std::vector<SupportRecord> records(supports.size());
    done_at.assign(supports.size(), 0.0);
    std::atomic<size_t> next{0};
    auto worker = [&] {
      while (true) {
        size_t idx = next.fetch_add(1);
        if (idx >= supports.size()) return;
        records[idx] = process_support(game, supports[idx], config);
        done_at[idx] = elapsed();
      }
    };
    std::vector<std::thread> pool;
    int nthreads = std::min<int>(config.threads, static_cast<int>(supports.size()));
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    run.records = std::move(records);
  }

  run.total_seconds = elapsed();

  // aggregate in enumeration order
  double first_seconds = -1.0;
  for (size_t idx = 0; idx < run.records.size(); ++idx) {
    const auto& rec = run.records[idx];
    if (rec.unresolved()) run.fully_resolved = false;
    if (rec.qcp_status == QcpStatus::Feasible) ++run.counts.total_sne;
    if (!rec.certificate) continue;
    const EssCertificate& cert = *rec.certificate;
    switch (cert.path) {
      case CertPath::StrictShortcut:
        ++run.counts.strict;
        break;
      case CertPath::MixedInvaded:
      case CertPath::Neutral:
      case CertPath::MixedPass:
      case CertPath::QcqpInfeasible:
        ++run.counts.pure_pass;
        if (cert.path == CertPath::MixedPass) ++run.counts.mixed_pass;
        break;
      case CertPath::PureInvaded:
        break;
    }
    if (cert.is_ess) {
      bool duplicate = false;
      for (const auto& kept : run.ess)
        if (kept.strategy.linf_distance(cert.strategy) < 1e-6) duplicate = true;
      if (!duplicate) {
        run.ess.push_back(cert);
        if (first_seconds < 0.0) first_seconds = done_at[idx];
      }
    }
  }
  run.complete_enumeration = run.records.size() == supports.size();
  run.first_ess_seconds = first_seconds >= 0.0 ? first_seconds : run.total_seconds;
  return run;
}

}  // namespace ess
