#include "ess/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace ess {

namespace {

constexpr double kEqTol = 1e-9;  // payoff-tie tolerance for the oracle

double invasion_f(const SymmetricGame& game, const MixedStrategy& x,
                  const MixedStrategy& y) {
  std::vector<MixedStrategy> profile;
  profile.reserve(static_cast<size_t>(game.players()));
  profile.push_back(x);
  profile.push_back(y);
  for (int s = 2; s < game.players(); ++s) profile.push_back(x);
  double resident = game.expected_utility(profile);
  profile[0] = y;
  double mutant = game.expected_utility(profile);
  return resident - mutant;
}

// Visits every composition (k_0,...,k_{m-1}) with sum = r in
// lexicographic order.
template <typename Fn>
void for_each_composition(int parts, int total, Fn&& fn) {
  std::vector<int> k(static_cast<size_t>(parts), 0);
  k[0] = total;
  auto emit = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == parts - 1) {
      k[static_cast<size_t>(pos)] = remaining;
      fn(k);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      k[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  emit(emit, 0, total);
}

}  // namespace

GridSearchResult grid_invasion_search(const SymmetricGame& game,
                                      const MixedStrategy& x,
                                      const Support& br_set, double delta,
                                      const GridSpec& grid) {
  if (grid.resolution < 1)
    throw Error(ErrorCode::InvalidConfig, "grid resolution must be >= 1");
  for (int a : br_set.actions)
    if (a >= game.num_actions())
      throw Error(ErrorCode::IndexOutOfRange, "br action out of range");

  const int m = br_set.size();
  const int r = grid.resolution;
  const int K = game.num_actions();

  bool found = false;
  double best = 0.0;
  std::vector<double> best_probs;
  long evaluated = 0;

  for_each_composition(m, r, [&](const std::vector<int>& k) {
    std::vector<double> probs(static_cast<size_t>(K), 0.0);
    for (int pos = 0; pos < m; ++pos)
      probs[static_cast<size_t>(br_set.actions[static_cast<size_t>(pos)])] =
          static_cast<double>(k[static_cast<size_t>(pos)]) / static_cast<double>(r);
    double dist2 = 0.0;
    for (int i = 0; i < K; ++i) {
      double diff = probs[static_cast<size_t>(i)] - x[i];
      dist2 += diff * diff;
    }
    if (dist2 < delta * delta) return;
    MixedStrategy y(probs);
    double f = invasion_f(game, x, y);
    ++evaluated;
    if (!found || f < best) {
      found = true;
      best = f;
      best_probs = y.probs();
    }
  });

  if (!found)
    throw Error(ErrorCode::EmptyGrid, "no grid point outside the delta ball");
  return GridSearchResult{best, MixedStrategy(best_probs), evaluated};
}

std::vector<PureAnalysis> exhaustive_pure_analysis(const SymmetricGame& game) {
  const int K = game.num_actions();
  std::vector<PureAnalysis> out;
  out.reserve(static_cast<size_t>(K));

  // grid mutants shared by all candidates
  std::vector<MixedStrategy> grid_mutants;
  const int r = 50;
  for_each_composition(K, r, [&](const std::vector<int>& k) {
    std::vector<double> probs(static_cast<size_t>(K));
    for (int i = 0; i < K; ++i)
      probs[static_cast<size_t>(i)] = static_cast<double>(k[static_cast<size_t>(i)]) / static_cast<double>(r);
    grid_mutants.push_back(MixedStrategy(std::move(probs)));
  });

  for (int i = 0; i < K; ++i) {
    PureAnalysis row;
    row.action = i;
    MixedStrategy ei = MixedStrategy::basis(K, i);

    std::vector<double> g = game.response_payoffs(ei);
    double v = g[static_cast<size_t>(i)];
    row.is_sne = true;
    for (int j = 0; j < K; ++j)
      if (g[static_cast<size_t>(j)] > v) row.is_sne = false;

    // stability: every mutant must lose outright or tie and then lose
    // against itself
    auto survives = [&](const MixedStrategy& y) {
      double gain = 0.0;
      for (int j = 0; j < K; ++j) gain += y[j] * g[static_cast<size_t>(j)];
      if (gain < v - kEqTol) return true;       // strictly worse vs residents
      if (gain > v + kEqTol) return false;      // profitable deviation
      return invasion_f(game, ei, y) > kEqTol;  // tie: must lose vs itself
    };

    row.is_ess = true;
    for (int j = 0; j < K && row.is_ess; ++j) {
      if (j == i) continue;
      if (!survives(MixedStrategy::basis(K, j))) row.is_ess = false;
    }
    for (const auto& y : grid_mutants) {
      if (!row.is_ess) break;
      if (y.linf_distance(ei) < 1e-12) continue;
      if (!survives(y)) row.is_ess = false;
    }
    out.push_back(row);
  }
  return out;
}

TwoActionSne two_action_sne_closed_form(const SymmetricGame& game,
                                        const Support& support, double eps_s) {
  if (game.players() != 3)
    throw Error(ErrorCode::InvalidConfig, "closed form requires 3 players");
  if (support.size() != 2)
    throw Error(ErrorCode::InvalidConfig, "closed form requires |T| = 2");
  const int a = support.actions[0];
  const int b = support.actions[1];
  const int K = game.num_actions();

  // g_i(t) = A[i,a,a] t^2 + 2 A[i,a,b] t(1-t) + A[i,b,b] (1-t)^2
  auto coeffs = [&](int i) {
    std::array<int, 2> aa{a, a}, ab{a, b}, bb{b, b};
    double caa = game.entry(i, aa);
    double cab = game.entry(i, ab);
    double cbb = game.entry(i, bb);
    // expand into c2 t^2 + c1 t + c0
    return std::array<double, 3>{caa - 2.0 * cab + cbb, 2.0 * (cab - cbb), cbb};
  };
  auto ca = coeffs(a);
  auto cb = coeffs(b);
  double c2 = ca[0] - cb[0], c1 = ca[1] - cb[1], c0 = ca[2] - cb[2];

  double scale = std::max({1.0, std::fabs(ca[0]), std::fabs(ca[1]), std::fabs(ca[2]),
                           std::fabs(cb[0]), std::fabs(cb[1]), std::fabs(cb[2])});
  const double tol = 1e-12 * scale;

  TwoActionSne result;
  if (std::fabs(c2) <= tol && std::fabs(c1) <= tol && std::fabs(c0) <= tol) {
    result.kind = TwoActionKind::Continuum;
    return result;
  }

  std::vector<double> roots;
  if (std::fabs(c2) <= tol) {
    if (std::fabs(c1) > tol) roots.push_back(-c0 / c1);
  } else {
    double disc = c1 * c1 - 4.0 * c2 * c0;
    if (std::fabs(disc) <= tol * tol) {
      roots.push_back(-c1 / (2.0 * c2));
    } else if (disc > 0.0) {
      double sq = std::sqrt(disc);
      double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
      roots.push_back(q / c2);
      if (std::fabs(q) > 0.0) roots.push_back(c0 / q);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double x, double y) { return std::fabs(x - y) < 1e-12; }),
              roots.end());

  for (double t : roots) {
    if (t < eps_s - 1e-12 || t > 1.0 - eps_s + 1e-12) continue;
    std::vector<double> probs(static_cast<size_t>(K), 0.0);
    probs[static_cast<size_t>(a)] = t;
    probs[static_cast<size_t>(b)] = 1.0 - t;
    MixedStrategy p(probs);
    double g_ref = game.pure_response_payoff(a, p);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < K; ++i) {
      if (i == a || i == b) continue;
      margin = std::min(margin, g_ref - game.pure_response_payoff(i, p));
    }
    if (K == 2) margin = std::numeric_limits<double>::infinity();
    if (margin >= -kEqTol) result.roots.push_back(TwoActionRoot{p, margin});
  }
  return result;
}

}  // namespace ess
