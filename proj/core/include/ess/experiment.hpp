#ifndef ESS_EXPERIMENT_HPP
#define ESS_EXPERIMENT_HPP

#include <functional>
#include <string>

#include "ess/report.hpp"

namespace ess {

struct ExperimentSpec {
  int players = 3;
  int num_actions = 3;
  int count = 100;
  uint64_t seed = 1;
  SolverConfig config;
  std::string save_games_dir;  // when set, writes game<i> files there
};

/// Generates `count` uniform [-1,1] random games (per-game seeds derived
/// from the master seed by the fixed splitting rule) and solves each one
/// end to end. `progress`, when given, is called after each game.
SweepResult run_experiment(
    const ExperimentSpec& spec,
    const std::function<void(int done, int total)>& progress = {});

}  // namespace ess

#endif  // ESS_EXPERIMENT_HPP
