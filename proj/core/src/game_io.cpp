#include "ess/game_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ess {

namespace {

using nlohmann::json;

// Flattens the nested tensor arrays, enforcing rectangular shape K^depth.
void flatten_tensor(const json& node, int depth, int num_actions,
                    std::vector<double>& out) {
  if (depth == 0) {
    if (!node.is_number())
      throw Error(ErrorCode::ParseError, "tensor entry is not a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || static_cast<int>(node.size()) != num_actions)
    throw Error(ErrorCode::ParseError,
                "tensor level has " +
                    std::to_string(node.is_array() ? node.size() : 0) +
                    " entries, expected " + std::to_string(num_actions));
  for (const auto& child : node) flatten_tensor(child, depth - 1, num_actions, out);
}

json nest_tensor(const std::vector<double>& tensor, int depth, int num_actions,
                 size_t& cursor) {
  if (depth == 0) return json(tensor[cursor++]);
  json arr = json::array();
  for (int i = 0; i < num_actions; ++i)
    arr.push_back(nest_tensor(tensor, depth - 1, num_actions, cursor));
  return arr;
}

}  // namespace

SymmetricGame parse_game(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object())
    throw Error(ErrorCode::ParseError, "top-level value must be an object");
  if (!doc.contains("n") || !doc["n"].is_number_integer())
    throw Error(ErrorCode::ParseError, "missing integer field 'n'");
  if (!doc.contains("k") || !doc["k"].is_number_integer())
    throw Error(ErrorCode::ParseError, "missing integer field 'k'");
  if (!doc.contains("tensor"))
    throw Error(ErrorCode::ParseError, "missing field 'tensor'");

  int players = doc["n"].get<int>();
  int num_actions = doc["k"].get<int>();
  if (players < 2 || players > 8 || num_actions < 1 || num_actions > 64)
    throw Error(ErrorCode::ParseError, "implausible n or k");

  std::vector<double> tensor;
  flatten_tensor(doc["tensor"], players, num_actions, tensor);

  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string())
      throw Error(ErrorCode::ParseError, "'name' must be a string");
    name = doc["name"].get<std::string>();
  }
  return SymmetricGame::validate(players, num_actions, std::move(tensor), name);
}

SymmetricGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str());
}

std::string game_to_json(const SymmetricGame& game) {
  json doc;
  if (!game.name().empty()) doc["name"] = game.name();
  doc["n"] = game.players();
  doc["k"] = game.num_actions();
  size_t cursor = 0;
  doc["tensor"] = nest_tensor(game.tensor(), game.players(), game.num_actions(), cursor);
  return doc.dump(2);
}

void save_game(const SymmetricGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << game_to_json(game) << "\n";
  if (!out)
    throw Error(ErrorCode::ParseError, "write failed for " + path);
}

}  // namespace ess
