#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ess/game_io.hpp"
#include "test_util.hpp"

using namespace ess;
using ess::testutil::bundled_game;
using ess::testutil::game_path;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/ess_io_test_") + name;
}

}  // namespace

TEST_CASE("bundled game 8 decodes to the published entries") {
  SymmetricGame g8 = bundled_game(8);
  CHECK(g8.players() == 3);
  CHECK(g8.num_actions() == 3);
  CHECK(g8.name() == "game8");
  std::array<int, 2> i00{0, 0}, i12{1, 2}, i22{2, 2};
  CHECK(g8.entry(0, i00) == -1.3170);
  CHECK(g8.entry(0, i12) == 0.6025);
  CHECK(g8.entry(1, i12) == -0.7390);
  CHECK(g8.entry(2, i22) == -1.5501);
}

TEST_CASE("all eight bundled games load and validate") {
  for (int i = 1; i <= 8; ++i) {
    SymmetricGame g = bundled_game(i);
    CHECK(g.players() == 3);
    CHECK((g.num_actions() == 2 || g.num_actions() == 3));
  }
}

TEST_CASE("save then load round-trips bit-exactly") {
  SymmetricGame g = random_game(3, 5, 42);
  g.set_name("roundtrip");
  std::string path = temp_path("roundtrip");
  save_game(g, path);
  SymmetricGame back = load_game(path);
  CHECK(back.tensor() == g.tensor());
  CHECK(back.name() == "roundtrip");
  CHECK(back.players() == 3);
  CHECK(back.num_actions() == 5);
  std::remove(path.c_str());
}

TEST_CASE("malformed files raise ParseError") {
  std::string path = temp_path("malformed");
  {
    std::ofstream out(path);
    out << "{\"n\": 3, \"k\": 2, \"tensor\": [[[1, 0], [0, 1]], [[1, 0]]]}";
  }
  try {
    load_game(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  {
    std::ofstream out(path);
    out << "not json at all";
  }
  CHECK_THROWS_AS(load_game(path), Error);
  {
    std::ofstream out(path);
    out << "{\"n\": 3, \"tensor\": []}";
  }
  CHECK_THROWS_AS(load_game(path), Error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_game(temp_path("missing")), Error);
}

TEST_CASE("loading validates opponent symmetry") {
  std::string path = temp_path("asym");
  {
    std::ofstream out(path);
    out << "{\"n\": 3, \"k\": 2, \"tensor\": [[[0, 1], [0, 0]], [[0, 0], [0, 0]]]}";
  }
  try {
    load_game(path);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetricTensor);
  }
  std::remove(path.c_str());
}

TEST_CASE("name field is optional") {
  SymmetricGame g = parse_game("{\"n\": 2, \"k\": 2, \"tensor\": [[1, 0], [0, 1]]}");
  CHECK(g.name().empty());
  CHECK(g.players() == 2);
}
