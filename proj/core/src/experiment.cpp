#include "ess/experiment.hpp"

#include "ess/game_io.hpp"

namespace ess {

SweepResult run_experiment(
    const ExperimentSpec& spec,
    const std::function<void(int done, int total)>& progress) {
  if (spec.count < 1)
    throw Error(ErrorCode::InvalidConfig, "count must be >= 1");
  if (spec.num_actions < 2)
    throw Error(ErrorCode::InvalidConfig, "experiments need K >= 2");
  spec.config.validate();

  SweepResult sweep;
  sweep.players = spec.players;
  sweep.num_actions = spec.num_actions;
  sweep.count = spec.count;
  sweep.master_seed = spec.seed;
  sweep.config = spec.config;

  for (int i = 0; i < spec.count; ++i) {
    uint64_t game_seed = derive_game_seed(spec.seed, i);
    SymmetricGame game = random_game(spec.players, spec.num_actions, game_seed);
    game.set_name("random-" + std::to_string(spec.num_actions) + "-" +
                  std::to_string(game_seed));
    if (!spec.save_games_dir.empty())
      save_game(game, spec.save_games_dir + "/game" + std::to_string(i));

    SweepGame record;
    record.index = i;
    record.seed = game_seed;
    record.run = compute_all_ess(game, spec.config);
    sweep.games.push_back(std::move(record));
    if (progress) progress(i + 1, spec.count);
  }
  return sweep;
}

}  // namespace ess
