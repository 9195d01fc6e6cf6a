#include <doctest.h>

#include <cmath>
#include <random>

#include "ess/game.hpp"
#include "test_util.hpp"

using namespace ess;
using ess::testutil::bundled_game;
using ess::testutil::strategy;
using ess::testutil::zero_game;

namespace {

// random strategy with exact unit mass (last coordinate takes the rest)
MixedStrategy random_strategy(int num_actions, std::mt19937_64& rng) {
  std::vector<double> p(static_cast<size_t>(num_actions));
  double rest = 1.0;
  for (int i = 0; i + 1 < num_actions; ++i) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p[static_cast<size_t>(i)] = rest * u;
    rest -= p[static_cast<size_t>(i)];
  }
  p[static_cast<size_t>(num_actions - 1)] = rest;
  return MixedStrategy(p);
}

}  // namespace

TEST_CASE("validate accepts the bundled symmetric tensors") {
  SymmetricGame g4 = bundled_game(4);
  CHECK(g4.players() == 3);
  CHECK(g4.num_actions() == 3);
  // slice for action 0 is a symmetric 3x3 matrix
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) {
      std::array<int, 2> a{j, k}, b{k, j};
      CHECK(g4.entry(0, a) == g4.entry(0, b));
    }
}

TEST_CASE("validate rejects an asymmetric tensor") {
  // A[0,0,1]=1 but A[0,1,0]=0
  std::vector<double> t(8, 0.0);
  t[1] = 1.0;
  CHECK_THROWS_WITH_AS(SymmetricGame::validate(3, 2, t), doctest::Contains("Asymmetric"),
                       Error);
  try {
    SymmetricGame::validate(3, 2, t);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AsymmetricTensor);
  }
}

TEST_CASE("validate accepts the all-zero tensor and checks shape/finiteness") {
  CHECK_NOTHROW(zero_game(3, 3));
  CHECK_THROWS_AS(SymmetricGame::validate(3, 2, std::vector<double>(7, 0.0)), Error);
  std::vector<double> bad(8, 0.0);
  bad[0] = std::nan("");
  try {
    SymmetricGame::validate(3, 2, bad);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteEntry);
  }
}

TEST_CASE("expected utility on reference games") {
  SymmetricGame g3 = bundled_game(3);
  MixedStrategy e0 = MixedStrategy::basis(2, 0);
  std::vector<MixedStrategy> profile{e0, e0, e0};
  CHECK(g3.expected_utility(profile) == doctest::Approx(2.0).epsilon(1e-14));

  SymmetricGame g4 = bundled_game(4);
  MixedStrategy u = MixedStrategy::uniform(3);
  std::vector<MixedStrategy> uni{u, u, u};
  CHECK(g4.expected_utility(uni) == doctest::Approx(0.0).epsilon(1e-12));

  SymmetricGame zero = zero_game(3, 3);
  CHECK(zero.expected_utility(uni) == 0.0);
}

TEST_CASE("expected utility validates the profile") {
  SymmetricGame g3 = bundled_game(3);
  std::vector<MixedStrategy> short_profile{MixedStrategy::basis(2, 0)};
  CHECK_THROWS_AS(g3.expected_utility(short_profile), Error);
  std::vector<MixedStrategy> wrong_len{MixedStrategy::basis(3, 0),
                                       MixedStrategy::basis(3, 0),
                                       MixedStrategy::basis(3, 0)};
  CHECK_THROWS_AS(g3.expected_utility(wrong_len), Error);
}

TEST_CASE("pure response payoffs on reference games") {
  SymmetricGame g3 = bundled_game(3);
  MixedStrategy p = strategy({1.0, 0.0});
  CHECK(g3.pure_response_payoff(0, p) == doctest::Approx(2.0));
  CHECK(g3.pure_response_payoff(1, p) == doctest::Approx(0.0));

  SymmetricGame g1 = bundled_game(1);
  MixedStrategy half = strategy({0.5, 0.5});
  CHECK(g1.pure_response_payoff(0, half) == doctest::Approx(-1.5));
  CHECK(g1.pure_response_payoff(1, half) == doctest::Approx(-1.5));

  CHECK_THROWS_AS(g1.pure_response_payoff(2, half), Error);
}

TEST_CASE("g_i at a vertex equals the diagonal tensor entry") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int K = 2 + static_cast<int>(rng() % 4);
    SymmetricGame g = random_game(3, K, rng());
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j) {
        std::array<int, 2> jj{j, j};
        CHECK(g.pure_response_payoff(i, MixedStrategy::basis(K, j)) ==
              doctest::Approx(g.entry(i, jj)).epsilon(1e-14));
      }
  }
}

TEST_CASE("g_i agrees with expected utility of the deviation profile") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    int K = 2 + static_cast<int>(rng() % 5);  // K <= 6
    SymmetricGame g = random_game(3, K, rng());
    MixedStrategy p = random_strategy(K, rng);
    for (int i = 0; i < K; ++i) {
      std::vector<MixedStrategy> profile{MixedStrategy::basis(K, i), p, p};
      CHECK(g.pure_response_payoff(i, p) ==
            doctest::Approx(g.expected_utility(profile)).epsilon(1e-12));
    }
  }
}

TEST_CASE("expected utility is multilinear in each slot") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    int K = 2 + static_cast<int>(rng() % 3);
    SymmetricGame g = random_game(3, K, rng());
    MixedStrategy a = random_strategy(K, rng);
    MixedStrategy b = random_strategy(K, rng);
    MixedStrategy c = random_strategy(K, rng);
    MixedStrategy d = random_strategy(K, rng);
    double alpha = static_cast<double>(rng() >> 11) * 0x1.0p-53;

    std::vector<double> blend_p(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i)
      blend_p[static_cast<size_t>(i)] = alpha * a[i] + (1.0 - alpha) * b[i];
    MixedStrategy blend(blend_p);

    std::vector<MixedStrategy> pa{a, c, d}, pb{b, c, d}, pm{blend, c, d};
    double lhs = g.expected_utility(pm);
    double rhs = alpha * g.expected_utility(pa) + (1.0 - alpha) * g.expected_utility(pb);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("best response sets on reference games") {
  SymmetricGame g3 = bundled_game(3);
  CHECK(g3.best_response_set(strategy({1.0, 0.0}), 1e-5) == Support({0}));

  SymmetricGame g6 = bundled_game(6);
  CHECK(g6.best_response_set(strategy({0.0, 1.0, 0.0}), 1e-5) == Support({0, 1, 2}));

  SymmetricGame zero = zero_game(3, 4);
  CHECK(zero.best_response_set(MixedStrategy::uniform(4), 1e-5) ==
        Support({0, 1, 2, 3}));
}

TEST_CASE("best response set with zero tolerance contains the argmax") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    int K = 2 + static_cast<int>(rng() % 4);
    SymmetricGame g = random_game(3, K, rng());
    MixedStrategy x = random_strategy(K, rng);
    std::vector<double> gv = g.response_payoffs(x);
    int argmax = 0;
    for (int i = 1; i < K; ++i)
      if (gv[static_cast<size_t>(i)] > gv[static_cast<size_t>(argmax)]) argmax = i;
    Support br = g.best_response_set(x, 0.0);
    CHECK(br.contains(argmax));
  }
}

TEST_CASE("affine transform") {
  SymmetricGame g3 = bundled_game(3);
  SymmetricGame same = g3.affine_transform(1.0, 0.0);
  CHECK(same.tensor() == g3.tensor());

  SymmetricGame zero = zero_game(3, 3);
  SymmetricGame c3 = zero.affine_transform(2.0, 3.0);
  for (double v : c3.tensor()) CHECK(v == 3.0);

  SymmetricGame doubled = g3.affine_transform(2.0, 0.0);
  std::array<int, 2> idx{0, 0};
  CHECK(doubled.entry(0, idx) == 4.0);

  CHECK_THROWS_AS(g3.affine_transform(0.0, 1.0), Error);
  CHECK_THROWS_AS(g3.affine_transform(-2.0, 1.0), Error);
}

TEST_CASE("action relabeling maps response payoffs exactly on integer tensors") {
  // integer tensor entries and dyadic strategies make both evaluation
  // orders exact
  SymmetricGame g6 = bundled_game(6);
  std::vector<int> perm{2, 0, 1};
  SymmetricGame relabeled = g6.permute_actions(perm);

  MixedStrategy p = strategy({0.5, 0.25, 0.25});
  std::vector<double> pp(3);
  for (int i = 0; i < 3; ++i) pp[static_cast<size_t>(perm[static_cast<size_t>(i)])] = p[i];
  MixedStrategy permuted(pp);

  for (int i = 0; i < 3; ++i)
    CHECK(g6.pure_response_payoff(i, p) ==
          relabeled.pure_response_payoff(perm[static_cast<size_t>(i)], permuted));
}

TEST_CASE("random games are deterministic, in range, and exactly symmetric") {
  SymmetricGame a = random_game(3, 5, 42);
  SymmetricGame b = random_game(3, 5, 42);
  CHECK(a.tensor() == b.tensor());

  SymmetricGame c = random_game(3, 5, 43);
  CHECK(a.tensor() != c.tensor());

  for (double v : a.tensor()) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
  // symmetry is exact by construction: identical values per class
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 5; ++k) {
        std::array<int, 2> jk{j, k}, kj{k, j};
        CHECK(a.entry(i, jk) == a.entry(i, kj));
      }

  SymmetricGame four = random_game(4, 3, 99);
  std::array<int, 3> o1{0, 1, 2}, o2{2, 0, 1}, o3{1, 2, 0};
  CHECK(four.entry(1, o1) == four.entry(1, o2));
  CHECK(four.entry(1, o1) == four.entry(1, o3));
}

TEST_CASE("mixed strategy validation") {
  CHECK_THROWS_AS(strategy({0.5, 0.6}), Error);
  CHECK_THROWS_AS(strategy({-0.1, 1.1}), Error);
  CHECK_THROWS_AS(strategy({}), Error);
  MixedStrategy ok = strategy({0.25, 0.0, 0.75});
  CHECK(ok.support() == Support({0, 2}));
  CHECK(!ok.is_pure());
  CHECK(MixedStrategy::basis(3, 1).is_pure());
}

TEST_CASE("support ordering and membership") {
  Support s({0, 2});
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  CHECK(Support({1}) < Support({0, 1}));
  CHECK(Support({0, 1}) < Support({0, 2}));
  CHECK_THROWS_AS(Support({2, 1}), Error);
  CHECK_THROWS_AS(Support(std::vector<int>{}), Error);
  CHECK(s.to_string() == "{0,2}");
}

TEST_CASE("solver config invariants") {
  SolverConfig config;
  CHECK_NOTHROW(config.validate());
  SolverConfig bad = config;
  bad.feas_tol = 1e-4;  // not < eps_p
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = config;
  bad.delta = 1e-3;  // eps_p not < delta^2
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = config;
  bad.opt_gap = 1e-4;
  CHECK_THROWS_AS(bad.validate(), Error);
}
