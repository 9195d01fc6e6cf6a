#include "ess/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace ess {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kMassTol = 1e-9;

std::string index_string(int action, std::span<const int> opp) {
  std::ostringstream os;
  os << "[" << action;
  for (int j : opp) os << "," << j;
  os << "]";
  return os.str();
}

// Advances a mixed-radix counter with `digits` positions in base `base`.
bool next_tuple(std::vector<int>& t, int base) {
  for (int pos = static_cast<int>(t.size()) - 1; pos >= 0; --pos) {
    if (++t[static_cast<size_t>(pos)] < base) return true;
    t[static_cast<size_t>(pos)] = 0;
  }
  return false;
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::AsymmetricTensor: return "AsymmetricTensor";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::InvalidStrategy: return "InvalidStrategy";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
  }
  return "UnknownError";
}

Support::Support(std::vector<int> acts) : actions(std::move(acts)) {
  if (actions.empty())
    throw Error(ErrorCode::InvalidStrategy, "support must be nonempty");
  for (size_t i = 1; i < actions.size(); ++i) {
    if (actions[i] <= actions[i - 1])
      throw Error(ErrorCode::InvalidStrategy,
                  "support indices must be strictly increasing");
  }
  if (actions.front() < 0)
    throw Error(ErrorCode::IndexOutOfRange, "negative action index in support");
}

bool Support::contains(int action) const {
  return std::binary_search(actions.begin(), actions.end(), action);
}

bool Support::operator<(const Support& other) const {
  if (actions.size() != other.actions.size())
    return actions.size() < other.actions.size();
  return actions < other.actions;
}

std::string Support::to_string() const {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < actions.size(); ++i) {
    if (i) os << ",";
    os << actions[i];
  }
  os << "}";
  return os.str();
}

MixedStrategy::MixedStrategy(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty())
    throw Error(ErrorCode::InvalidStrategy, "empty probability vector");
  double sum = 0.0;
  std::vector<int> support;
  for (size_t i = 0; i < probs_.size(); ++i) {
    double p = probs_[i];
    if (!std::isfinite(p) || p < 0.0)
      throw Error(ErrorCode::InvalidStrategy,
                  "probability " + std::to_string(i) + " is " + std::to_string(p));
    if (p > 0.0) support.push_back(static_cast<int>(i));
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kMassTol)
    throw Error(ErrorCode::InvalidStrategy,
                "probabilities sum to " + std::to_string(sum));
  support_ = Support(std::move(support));
}

MixedStrategy MixedStrategy::basis(int num_actions, int action) {
  if (action < 0 || action >= num_actions)
    throw Error(ErrorCode::IndexOutOfRange,
                "basis action " + std::to_string(action));
  std::vector<double> p(static_cast<size_t>(num_actions), 0.0);
  p[static_cast<size_t>(action)] = 1.0;
  return MixedStrategy(std::move(p));
}

MixedStrategy MixedStrategy::uniform(int num_actions) {
  std::vector<double> p(static_cast<size_t>(num_actions),
                        1.0 / static_cast<double>(num_actions));
  return MixedStrategy(std::move(p));
}

double MixedStrategy::linf_distance(const MixedStrategy& other) const {
  double d = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i)
    d = std::max(d, std::fabs(probs_[i] - other.probs_[i]));
  return d;
}

double MixedStrategy::l2_distance(const MixedStrategy& other) const {
  double d = 0.0;
  for (size_t i = 0; i < probs_.size(); ++i) {
    double diff = probs_[i] - other.probs_[i];
    d += diff * diff;
  }
  return std::sqrt(d);
}

std::string MixedStrategy::to_string(int precision) const {
  std::ostringstream os;
  os << "(";
  char buf[64];
  for (size_t i = 0; i < probs_.size(); ++i) {
    if (i) os << ", ";
    std::snprintf(buf, sizeof(buf), "%.*f", precision, probs_[i]);
    os << buf;
  }
  os << ")";
  return os.str();
}

void SolverConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(eps_s) || !positive(eps_p) || !positive(delta) ||
      !positive(eps_dist) || !positive(feas_tol) || !positive(opt_gap))
    throw Error(ErrorCode::InvalidConfig, "all tolerances must be positive");
  if (!(feas_tol < eps_p))
    throw Error(ErrorCode::InvalidConfig, "feas_tol must be < eps_p");
  if (!(eps_p < delta * delta))
    throw Error(ErrorCode::InvalidConfig, "eps_p must be < delta^2");
  if (!(opt_gap < eps_p))
    throw Error(ErrorCode::InvalidConfig, "opt_gap must be < eps_p");
  if (node_budget <= 0)
    throw Error(ErrorCode::InvalidConfig, "node_budget must be positive");
  if (threads <= 0)
    throw Error(ErrorCode::InvalidConfig, "threads must be positive");
}

SymmetricGame SymmetricGame::validate(int players, int num_actions,
                                      std::vector<double> tensor,
                                      std::string name) {
  if (players < 2)
    throw Error(ErrorCode::ShapeMismatch, "need at least 2 players");
  if (num_actions < 1)
    throw Error(ErrorCode::ShapeMismatch, "need at least 1 action");
  size_t expected = 1;
  for (int t = 0; t < players; ++t) {
    expected *= static_cast<size_t>(num_actions);
    if (expected > (size_t{1} << 40))
      throw Error(ErrorCode::ShapeMismatch, "tensor too large");
  }
  if (tensor.size() != expected)
    throw Error(ErrorCode::ShapeMismatch,
                "tensor has " + std::to_string(tensor.size()) +
                    " entries, expected " + std::to_string(expected));
  for (size_t idx = 0; idx < tensor.size(); ++idx) {
    if (!std::isfinite(tensor[idx]))
      throw Error(ErrorCode::NonFiniteEntry,
                  "entry at flat index " + std::to_string(idx));
  }

  SymmetricGame game(players, num_actions, std::move(tensor), std::move(name));

  // Opponent-index symmetry: each entry must match its sorted-opponents
  // canonical entry.
  const int opp_slots = players - 1;
  std::vector<int> opp(static_cast<size_t>(opp_slots), 0);
  std::vector<int> sorted(static_cast<size_t>(opp_slots), 0);
  for (int i = 0; i < num_actions; ++i) {
    std::fill(opp.begin(), opp.end(), 0);
    do {
      sorted.assign(opp.begin(), opp.end());
      std::sort(sorted.begin(), sorted.end());
      double a = game.tensor_[game.flat_index(i, opp)];
      double b = game.tensor_[game.flat_index(i, sorted)];
      if (std::fabs(a - b) > kSymmetryTol)
        throw Error(ErrorCode::AsymmetricTensor,
                    index_string(i, opp) + "=" + std::to_string(a) + " vs " +
                        index_string(i, sorted) + "=" + std::to_string(b));
    } while (next_tuple(opp, num_actions));
  }
  return game;
}

size_t SymmetricGame::flat_index(int action, std::span<const int> opponents) const {
  size_t idx = static_cast<size_t>(action);
  for (int j : opponents)
    idx = idx * static_cast<size_t>(num_actions_) + static_cast<size_t>(j);
  return idx;
}

double SymmetricGame::entry(int action, std::span<const int> opponents) const {
  if (action < 0 || action >= num_actions_)
    throw Error(ErrorCode::IndexOutOfRange, "action " + std::to_string(action));
  if (static_cast<int>(opponents.size()) != players_ - 1)
    throw Error(ErrorCode::DimensionMismatch, "need n-1 opponent indices");
  for (int j : opponents)
    if (j < 0 || j >= num_actions_)
      throw Error(ErrorCode::IndexOutOfRange, "opponent action " + std::to_string(j));
  return tensor_[flat_index(action, opponents)];
}

double SymmetricGame::expected_utility(std::span<const MixedStrategy> profile) const {
  if (static_cast<int>(profile.size()) != players_)
    throw Error(ErrorCode::DimensionMismatch,
                "profile has " + std::to_string(profile.size()) +
                    " strategies, expected " + std::to_string(players_));
  for (const auto& s : profile)
    if (s.num_actions() != num_actions_)
      throw Error(ErrorCode::DimensionMismatch, "strategy length != K");

  // Dense contraction over all K^n pure profiles, skipping zero-mass
  // branches. Recursion depth is the player count.
  double total = 0.0;
  auto recurse = [&](auto&& self, int slot, size_t idx, double weight) -> void {
    if (weight == 0.0) return;
    if (slot == players_) {
      total += weight * tensor_[idx];
      return;
    }
    const auto& probs = profile[static_cast<size_t>(slot)].probs();
    for (int a = 0; a < num_actions_; ++a) {
      double w = probs[static_cast<size_t>(a)];
      if (w == 0.0) continue;
      self(self, slot + 1,
           idx * static_cast<size_t>(num_actions_) + static_cast<size_t>(a),
           weight * w);
    }
  };
  recurse(recurse, 0, 0, 1.0);
  return total;
}

double SymmetricGame::pure_response_payoff(int action, const MixedStrategy& p) const {
  if (action < 0 || action >= num_actions_)
    throw Error(ErrorCode::IndexOutOfRange, "action " + std::to_string(action));
  if (p.num_actions() != num_actions_)
    throw Error(ErrorCode::DimensionMismatch, "strategy length != K");

  const auto& probs = p.probs();
  double total = 0.0;
  auto recurse = [&](auto&& self, int slot, size_t idx, double weight) -> void {
    if (weight == 0.0) return;
    if (slot == players_ - 1) {
      total += weight * tensor_[idx];
      return;
    }
    for (int a = 0; a < num_actions_; ++a) {
      double w = probs[static_cast<size_t>(a)];
      if (w == 0.0) continue;
      self(self, slot + 1,
           idx * static_cast<size_t>(num_actions_) + static_cast<size_t>(a),
           weight * w);
    }
  };
  recurse(recurse, 0, static_cast<size_t>(action), 1.0);
  return total;
}

std::vector<double> SymmetricGame::response_payoffs(const MixedStrategy& p) const {
  std::vector<double> g(static_cast<size_t>(num_actions_));
  for (int i = 0; i < num_actions_; ++i)
    g[static_cast<size_t>(i)] = pure_response_payoff(i, p);
  return g;
}

Support SymmetricGame::best_response_set(const MixedStrategy& x, double eps_p) const {
  std::vector<double> g = response_payoffs(x);
  double v = 0.0;
  for (int i = 0; i < num_actions_; ++i)
    v += x[i] * g[static_cast<size_t>(i)];
  std::vector<int> br;
  for (int i = 0; i < num_actions_; ++i)
    if (g[static_cast<size_t>(i)] >= v - eps_p) br.push_back(i);
  return Support(std::move(br));
}

SymmetricGame SymmetricGame::affine_transform(double scale, double shift) const {
  if (!(scale > 0.0))
    throw Error(ErrorCode::NonPositiveScale, "scale " + std::to_string(scale));
  std::vector<double> t(tensor_.size());
  for (size_t i = 0; i < tensor_.size(); ++i) t[i] = scale * tensor_[i] + shift;
  return SymmetricGame(players_, num_actions_, std::move(t), name_);
}

SymmetricGame SymmetricGame::permute_actions(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != num_actions_)
    throw Error(ErrorCode::DimensionMismatch, "permutation length != K");
  std::vector<bool> seen(static_cast<size_t>(num_actions_), false);
  for (int v : perm) {
    if (v < 0 || v >= num_actions_ || seen[static_cast<size_t>(v)])
      throw Error(ErrorCode::InvalidConfig, "not a permutation");
    seen[static_cast<size_t>(v)] = true;
  }

  std::vector<double> t(tensor_.size());
  const int opp_slots = players_ - 1;
  std::vector<int> opp(static_cast<size_t>(opp_slots), 0);
  std::vector<int> mapped(static_cast<size_t>(opp_slots), 0);
  for (int i = 0; i < num_actions_; ++i) {
    std::fill(opp.begin(), opp.end(), 0);
    do {
      for (int s = 0; s < opp_slots; ++s)
        mapped[static_cast<size_t>(s)] = perm[static_cast<size_t>(opp[static_cast<size_t>(s)])];
      t[flat_index(perm[static_cast<size_t>(i)], mapped)] = tensor_[flat_index(i, opp)];
    } while (next_tuple(opp, num_actions_));
  }
  return SymmetricGame(players_, num_actions_, std::move(t), name_);
}

uint64_t derive_game_seed(uint64_t master, int index) {
  // splitmix64 finalizer applied to master + (index+1) * golden ratio.
  uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SymmetricGame random_game(int players, int num_actions, uint64_t seed) {
  if (players < 2)
    throw Error(ErrorCode::ShapeMismatch, "need at least 2 players");
  if (num_actions < 1)
    throw Error(ErrorCode::ShapeMismatch, "need at least 1 action");

  std::mt19937_64 rng(seed);
  auto draw = [&]() {
    // 53-bit mantissa in [0,1), mapped to [-1,1]; bit-reproducible
    // across platforms, unlike uniform_real_distribution.
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  };

  const int opp_slots = players - 1;
  size_t size = 1;
  for (int t = 0; t < players; ++t) size *= static_cast<size_t>(num_actions);
  std::vector<double> tensor(size, 0.0);

  // Draw once per (action, sorted opponent multiset) in lexicographic
  // order, then fill every permutation of the class.
  std::vector<int> opp(static_cast<size_t>(opp_slots), 0);
  std::vector<int> sorted(static_cast<size_t>(opp_slots), 0);
  for (int i = 0; i < num_actions; ++i) {
    std::fill(opp.begin(), opp.end(), 0);
    do {
      bool canonical = std::is_sorted(opp.begin(), opp.end());
      if (canonical) {
        size_t idx = static_cast<size_t>(i);
        for (int j : opp)
          idx = idx * static_cast<size_t>(num_actions) + static_cast<size_t>(j);
        tensor[idx] = draw();
      }
    } while (next_tuple(opp, num_actions));
    // second pass: copy canonical value into non-canonical slots
    std::fill(opp.begin(), opp.end(), 0);
    do {
      if (!std::is_sorted(opp.begin(), opp.end())) {
        sorted.assign(opp.begin(), opp.end());
        std::sort(sorted.begin(), sorted.end());
        size_t idx = static_cast<size_t>(i), cidx = static_cast<size_t>(i);
        for (int s = 0; s < opp_slots; ++s) {
          idx = idx * static_cast<size_t>(num_actions) +
                static_cast<size_t>(opp[static_cast<size_t>(s)]);
          cidx = cidx * static_cast<size_t>(num_actions) +
                 static_cast<size_t>(sorted[static_cast<size_t>(s)]);
        }
        tensor[idx] = tensor[cidx];
      }
    } while (next_tuple(opp, num_actions));
  }
  return SymmetricGame::validate(players, num_actions, std::move(tensor));
}

}  // namespace ess
