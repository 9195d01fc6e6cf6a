#ifndef ESS_ORACLE_HPP
#define ESS_ORACLE_HPP

#include <vector>

#include "ess/game.hpp"

namespace ess {

/// Simplex grid with step 1/resolution.
struct GridSpec {
  int resolution = 100;
};

struct GridSearchResult {
  double min_f = 0.0;
  MixedStrategy argmin;
  long evaluated = 0;
};

/// Exhaustively evaluates the invasion objective F(y) = U(x,y,x,...) -
/// U(y,y,x,...) at every grid point of the br_set simplex with
/// ||y - x||_2 >= delta. Pure enumeration; throws Error(EmptyGrid) when
/// no grid point clears the distance constraint.
GridSearchResult grid_invasion_search(const SymmetricGame& game,
                                      const MixedStrategy& x,
                                      const Support& br_set, double delta,
                                      const GridSpec& grid);

struct PureAnalysis {
  int action = 0;
  bool is_sne = false;
  bool is_ess = false;  // stability conditions vs pure and grid mutants
};

/// Classifies every pure strategy: equilibrium by exact payoff
/// comparison, stability by checking the two-condition definition
/// against all pure mutants exactly and all grid mutants at resolution
/// 1/50. Payoff ties use a 1e-9 tolerance.
std::vector<PureAnalysis> exhaustive_pure_analysis(const SymmetricGame& game);

enum class TwoActionKind { Roots, Continuum };

struct TwoActionRoot {
  MixedStrategy strategy;     // zero-extended to K entries
  double min_oos_margin = 0;  // min over i outside T of g_ref - g_i; >= 0 ok
};

struct TwoActionSne {
  TwoActionKind kind = TwoActionKind::Roots;
  std::vector<TwoActionRoot> roots;  // only roots satisfying the
                                     // out-of-support inequalities
                                     // within 1e-9
};

/// Closed-form equilibria on a 2-action support of a 3-player game: the
/// indifference condition is a univariate quadratic; its real roots in
/// [eps_s, 1 - eps_s] are filtered by the out-of-support inequalities.
/// An identically-zero quadratic is reported as Continuum.
TwoActionSne two_action_sne_closed_form(const SymmetricGame& game,
                                        const Support& support, double eps_s);

}  // namespace ess

#endif  // ESS_ORACLE_HPP
