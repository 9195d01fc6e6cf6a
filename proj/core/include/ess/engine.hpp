#ifndef ESS_ENGINE_HPP
#define ESS_ENGINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "ess/game.hpp"
#include "ess/program.hpp"

namespace ess {

/// All 2^K - 1 nonempty supports, ordered by size ascending, then
/// lexicographically by sorted indices.
std::vector<Support> enumerate_supports(int num_actions);

enum class QcpStatus { Infeasible, Feasible, Unresolved };

struct SneResult {
  Support support;
  MixedStrategy strategy;  // zero-extended to K entries
};

struct SneSolve {
  QcpStatus status = QcpStatus::Infeasible;
  std::optional<SneResult> sne;
  long nodes = 0;
};

/// Builds the per-support feasibility program (in-support probabilities
/// >= eps_s summing to one, indifference inside the support, no
/// profitable pure deviation outside it) and solves it globally.
SneSolve sne_support_qcp(const SymmetricGame& game, const Support& support,
                         const SolverConfig& config);

/// The symmetric-equilibrium feasibility program itself, exposed for
/// inspection and testing.
PolynomialProgram build_sne_program(const SymmetricGame& game,
                                    const Support& support, double eps_s);

enum class CertPath {
  StrictShortcut,
  PureInvaded,
  MixedInvaded,
  Neutral,
  MixedPass,
  QcqpInfeasible,
};

const char* cert_path_name(CertPath path);  // "strict-shortcut", ...

/// Per-equilibrium stability verdict with the classification path taken.
struct EssCertificate {
  MixedStrategy strategy;
  bool is_ess = false;
  CertPath path = CertPath::Neutral;
  int invader = -1;                // action, for PureInvaded
  std::optional<double> margin;    // F*, for QCQP-decided paths
  Support br_set;

  std::string path_string() const;  // "pure-invaded(2)" etc.
};

struct EssCheck {
  bool resolved = false;  // false = solver budget exhausted
  std::optional<EssCertificate> certificate;
};

/// Stability test for an SNE candidate: strict-equilibrium shortcut,
/// then the pure-mutant screen, then the global mixed-mutant program.
EssCheck is_ess(const SymmetricGame& game, const MixedStrategy& x,
                const SolverConfig& config);

struct QcqpResult {
  SolveStatus status = SolveStatus::Infeasible;
  double f_star = 0.0;            // recomputed at the minimizer
  std::vector<double> minimizer;  // K-dim zero-extended mutant
  long nodes = 0;
};

/// Globally minimizes the invasion objective F(y) = U(x,y,x,...) -
/// U(y,y,x,...) over mutants supported on br_set with ||y - x||_2 >=
/// delta. F* is recomputed by direct payoff evaluation at the minimizer,
/// never taken from the solver's reported objective.
QcqpResult ess_qcqp(const SymmetricGame& game, const MixedStrategy& x,
                    const Support& br_set, const SolverConfig& config);

struct MaxDistResult {
  bool resolved = false;
  bool another_sne = false;  // D* > eps_dist
  double d_star = 0.0;
};

/// Searches the same support for the equilibrium farthest from x; a
/// squared distance above eps_dist shows the support hosts more than one
/// equilibrium, i.e. the game is degenerate there.
MaxDistResult sne_maxdist(const SymmetricGame& game, const Support& support,
                          const MixedStrategy& x, const SolverConfig& config);

struct DegeneracyWitness {
  Support support;
  double d_star = 0.0;
};

struct DegeneracyReport {
  bool degenerate = false;
  std::vector<DegeneracyWitness> witnesses;
  bool fully_resolved = true;
};

DegeneracyReport degeneracy_check(const SymmetricGame& game,
                                  const SolverConfig& config);

/// One enumerated support's complete outcome.
struct SupportRecord {
  Support support;
  QcpStatus qcp_status = QcpStatus::Infeasible;
  std::optional<MixedStrategy> sne;
  std::optional<EssCertificate> certificate;
  bool ess_unresolved = false;

  bool unresolved() const {
    return qcp_status == QcpStatus::Unresolved || ess_unresolved;
  }
};

/// Screen statistics in the order the classification runs.
struct ScreenCounts {
  long total_sne = 0;
  long strict = 0;     // ESS via the strict shortcut
  long pure_pass = 0;  // non-strict SNE reaching the mixed-mutant program
  long mixed_pass = 0; // of those, certified stable
  long total_ess() const { return strict + mixed_pass; }
};

struct EssRun {
  std::vector<SupportRecord> records;    // in enumeration order
  std::vector<EssCertificate> ess;       // deduplicated, enumeration order
  ScreenCounts counts;
  bool fully_resolved = true;
  bool complete_enumeration = true;      // false when first_only halted early
  double total_seconds = 0.0;
  double first_ess_seconds = 0.0;        // = total_seconds when no ESS

  std::vector<SneResult> sne_list() const;
};

/// Support enumeration end to end: for every support in order, the
/// equilibrium program, then the stability test on success. first_only
/// (config) halts at the first certified ESS; threads > 1 distributes
/// supports across workers with order-deterministic output.
EssRun compute_all_ess(const SymmetricGame& game, const SolverConfig& config);

}  // namespace ess

#endif  // ESS_ENGINE_HPP
