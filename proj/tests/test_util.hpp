#ifndef ESS_TESTS_TEST_UTIL_HPP
#define ESS_TESTS_TEST_UTIL_HPP

#include <string>
#include <vector>

#include "ess/game.hpp"
#include "ess/game_io.hpp"

#ifndef ESS_GAMES_DIR
#define ESS_GAMES_DIR "games"
#endif

namespace ess::testutil {

inline std::string game_path(int index) {
  return std::string(ESS_GAMES_DIR) + "/game" + std::to_string(index);
}

inline SymmetricGame bundled_game(int index) { return load_game(game_path(index)); }

inline SymmetricGame zero_game(int players, int num_actions) {
  size_t size = 1;
  for (int t = 0; t < players; ++t) size *= static_cast<size_t>(num_actions);
  return SymmetricGame::validate(players, num_actions,
                                 std::vector<double>(size, 0.0), "zero");
}

inline MixedStrategy strategy(std::vector<double> probs) {
  return MixedStrategy(std::move(probs));
}

}  // namespace ess::testutil

#endif
