#ifndef ESS_GAME_HPP
#define ESS_GAME_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ess/error.hpp"

namespace ess {

/// Ordered set of action indices a mixed strategy plays with positive
/// probability. Indices are strictly increasing.
struct Support {
  std::vector<int> actions;

  Support() = default;
  explicit Support(std::vector<int> acts);

  int size() const { return static_cast<int>(actions.size()); }
  bool empty() const { return actions.empty(); }
  bool contains(int action) const;
  bool operator==(const Support& other) const { return actions == other.actions; }

  /// Sort key: (size, lexicographic indices).
  bool operator<(const Support& other) const;

  std::string to_string() const;  // "{0,2}"
};

/// Probability vector over K actions together with its exact support
/// (the set of strictly positive coordinates).
class MixedStrategy {
 public:
  explicit MixedStrategy(std::vector<double> probs);

  /// Pure strategy placing all mass on `action`.
  static MixedStrategy basis(int num_actions, int action);

  /// Uniform distribution over all K actions.
  static MixedStrategy uniform(int num_actions);

  int num_actions() const { return static_cast<int>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](int i) const { return probs_[static_cast<size_t>(i)]; }
  const Support& support() const { return support_; }
  bool is_pure() const { return support_.size() == 1; }

  double linf_distance(const MixedStrategy& other) const;
  double l2_distance(const MixedStrategy& other) const;

  std::string to_string(int precision = 7) const;  // "(0.5000000, 0.5000000)"

 private:
  std::vector<double> probs_;
  Support support_;
};

/// All numerical tolerances used by the pipeline.
struct SolverConfig {
  double eps_s = 1e-4;     // minimum in-support probability
  double eps_p = 1e-5;     // payoff comparison tolerance
  double delta = 1e-2;     // mutant-distance radius
  double eps_dist = 1e-8;  // degeneracy distance threshold
  double feas_tol = 1e-6;  // constraint violation tolerance
  double opt_gap = 1e-7;   // certified global-optimality gap

  long node_budget = 1'000'000;  // branch-and-bound nodes per solve
  int threads = 1;               // support-level parallelism
  bool first_only = false;       // halt at the first certified ESS

  /// Enforces: all tolerances positive, feas_tol < eps_p < delta^2,
  /// opt_gap < eps_p. Throws Error(InvalidConfig) otherwise.
  void validate() const;
};

/// Symmetric normal-form game with n players and K pure strategies,
/// stored as a dense row-major payoff tensor of shape K^n.
///
/// tensor[i, j1, ..., j_{n-1}] is the focal player's payoff for action i
/// when the opponents play j1..j_{n-1}. Entries are invariant under any
/// permutation of the opponent indices.
class SymmetricGame {
 public:
  /// Validates shape, finiteness, and opponent-index symmetry (within
  /// 1e-12 entrywise) before constructing. Throws Error on violation.
  static SymmetricGame validate(int players, int num_actions,
                                std::vector<double> tensor,
                                std::string name = "");

  int players() const { return players_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& tensor() const { return tensor_; }
  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Entry A[i, opponents...]; `opponents` must have n-1 indices.
  double entry(int action, std::span<const int> opponents) const;

  /// Player 1's multilinear expected payoff for a full profile of n
  /// mixed strategies.
  double expected_utility(std::span<const MixedStrategy> profile) const;

  /// g_i(p): payoff of pure action i when every opponent plays p.
  double pure_response_payoff(int action, const MixedStrategy& p) const;

  /// All g_i(p) at once.
  std::vector<double> response_payoffs(const MixedStrategy& p) const;

  /// BR(x) = { i : g_i(x) >= v - eps_p }, v the equilibrium payoff of x.
  Support best_response_set(const MixedStrategy& x, double eps_p) const;

  /// Entrywise a*A + b with a > 0; preserves symmetry.
  SymmetricGame affine_transform(double scale, double shift) const;

  /// Game with actions relabeled by `perm` (new index perm[i] plays the
  /// role of old index i).
  SymmetricGame permute_actions(std::span<const int> perm) const;

 private:
  SymmetricGame(int players, int num_actions, std::vector<double> tensor,
                std::string name)
      : players_(players),
        num_actions_(num_actions),
        tensor_(std::move(tensor)),
        name_(std::move(name)) {}

  size_t flat_index(int action, std::span<const int> opponents) const;

  int players_ = 0;
  int num_actions_ = 0;
  std::vector<double> tensor_;
  std::string name_;
};

/// Uniform [-1,1] random game. One value is drawn per equivalence class
/// of opponent-index multisets so symmetry holds exactly; deterministic
/// given the seed (mt19937_64, fixed draw order).
SymmetricGame random_game(int players, int num_actions, uint64_t seed);

/// Fixed seed-splitting rule for sweeps: the seed of game `index` under
/// master seed `master`.
uint64_t derive_game_seed(uint64_t master, int index);

}  // namespace ess

#endif  // ESS_GAME_HPP
