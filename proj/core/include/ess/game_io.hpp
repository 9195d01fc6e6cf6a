#ifndef ESS_GAME_IO_HPP
#define ESS_GAME_IO_HPP

#include <string>

#include "ess/game.hpp"

namespace ess {

/// Game file format: a JSON document with fields
///   n      player count (integer)
///   k      pure-strategy count (integer)
///   tensor nested arrays, depth n; outermost index is the focal action,
///          inner indices are the opponent actions in order
///   name   optional string
/// Symmetry is validated on load.
SymmetricGame load_game(const std::string& path);

/// Parses a game from JSON text (same schema as load_game).
SymmetricGame parse_game(const std::string& text);

/// Writes the game in the load_game format; round-trips all values
/// bit-exactly.
void save_game(const SymmetricGame& game, const std::string& path);

std::string game_to_json(const SymmetricGame& game);

}  // namespace ess

#endif  // ESS_GAME_IO_HPP
