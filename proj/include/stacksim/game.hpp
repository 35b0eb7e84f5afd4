#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "stacksim/errors.hpp"

namespace stacksim {

inline constexpr double kStrategySumTol = 1e-12;
inline constexpr double kDistributionSumTol = 1e-9;
inline constexpr double kBestReplyTol = 1e-9;

// Finite n-player normal-form game. Player n-1 (0-based) is the optimizer,
// players 0..n-2 are the learners.
//
// Utility tensors are flat, one per player, indexed lexicographically over
// pure profiles with the LAST player's action varying fastest:
//   index(a_0,...,a_{n-1}) = ((a_0*k_1 + a_1)*k_2 + a_2)*... + a_{n-1}.
// The same convention is used by the game file format and by
// JointDistribution.
//
// `utilities` may carry more tensors than players: a game induced by fixing
// the optimizer's mixed strategy keeps the optimizer's payoff as an extra
// trailing row so it stays evaluable over learner profiles.
struct GameSpec {
  int num_players = 0;
  std::vector<std::vector<std::string>> action_labels;  // one list per player
  std::vector<std::vector<double>> utilities;           // >= num_players tensors

  int num_actions(int player) const {
    return static_cast<int>(action_labels[player].size());
  }

  std::int64_t profile_count() const {
    std::int64_t n = 1;
    for (const auto& labels : action_labels) n *= static_cast<std::int64_t>(labels.size());
    return n;
  }

  std::int64_t index_of(const std::vector<int>& profile) const {
    std::int64_t idx = 0;
    for (int i = 0; i < num_players; ++i) idx = idx * num_actions(i) + profile[i];
    return idx;
  }

  std::vector<int> profile_of(std::int64_t index) const {
    std::vector<int> profile(num_players);
    for (int i = num_players - 1; i >= 0; --i) {
      profile[i] = static_cast<int>(index % num_actions(i));
      index /= num_actions(i);
    }
    return profile;
  }

  double utility(int player, const std::vector<int>& profile) const {
    return utilities[player][index_of(profile)];
  }

  // Range (max - min) of one player's utility entries; used as a regret scale.
  double utility_range(int player) const {
    const auto& u = utilities[player];
    auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    return *hi - *lo;
  }

  // Sup norm of one player's utility tensor.
  double utility_sup_norm(int player) const {
    double m = 0.0;
    for (double v : utilities[player]) m = std::max(m, std::abs(v));
    return m;
  }

  int action_index(int player, const std::string& label) const {
    const auto& labels = action_labels[player];
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      throw invalid_input_error("unknown action label '" + label + "' for player " +
                                std::to_string(player + 1));
    return static_cast<int>(it - labels.begin());
  }
};

inline void validate_game(const GameSpec& game) {
  if (game.num_players < 1)
    throw invalid_input_error("game must have at least one player");
  if (static_cast<int>(game.action_labels.size()) != game.num_players)
    throw invalid_input_error("action label lists do not match the number of players");
  for (int i = 0; i < game.num_players; ++i) {
    if (game.action_labels[i].empty())
      throw invalid_input_error("player " + std::to_string(i + 1) + " has no actions");
    std::set<std::string> distinct(game.action_labels[i].begin(), game.action_labels[i].end());
    if (distinct.size() != game.action_labels[i].size())
      throw invalid_input_error("player " + std::to_string(i + 1) + " has duplicate action labels");
  }
  if (static_cast<int>(game.utilities.size()) < game.num_players)
    throw invalid_input_error("missing utility tensors");
  const std::int64_t cells = game.profile_count();
  for (std::size_t r = 0; r < game.utilities.size(); ++r) {
    if (static_cast<std::int64_t>(game.utilities[r].size()) != cells)
      throw invalid_input_error("utility tensor " + std::to_string(r + 1) + " has " +
                                std::to_string(game.utilities[r].size()) + " entries, expected " +
                                std::to_string(cells));
    for (double v : game.utilities[r])
      if (!std::isfinite(v))
        throw invalid_input_error("utility tensor " + std::to_string(r + 1) +
                                  " contains a non-finite entry");
  }
}

inline GameSpec make_game(int num_players, std::vector<std::vector<std::string>> action_labels,
                          std::vector<std::vector<double>> utilities) {
  GameSpec game{num_players, std::move(action_labels), std::move(utilities)};
  validate_game(game);
  return game;
}

inline GameSpec make_game(std::vector<std::vector<std::string>> action_labels,
                          std::vector<std::vector<double>> utilities) {
  const int n = static_cast<int>(action_labels.size());
  return make_game(n, std::move(action_labels), std::move(utilities));
}

// Probability vector over one player's actions.
struct MixedStrategy {
  int player = 0;
  std::vector<double> probs;

  static MixedStrategy uniform(int player, int num_actions) {
    return {player, std::vector<double>(num_actions, 1.0 / num_actions)};
  }

  static MixedStrategy point_mass(int player, int num_actions, int action) {
    std::vector<double> p(num_actions, 0.0);
    p[action] = 1.0;
    return {player, std::move(p)};
  }
};

inline void validate_strategy(const MixedStrategy& s) {
  if (s.probs.empty()) throw invalid_input_error("mixed strategy has no entries");
  double sum = 0.0;
  for (double p : s.probs) {
    if (!(p >= 0.0)) throw invalid_input_error("mixed strategy has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStrategySumTol)
    throw invalid_input_error("mixed strategy entries sum to " + std::to_string(sum));
}

// Clamps small negative entries (LP roundoff) and renormalizes.
inline MixedStrategy normalized_strategy(int player, std::vector<double> probs,
                                         double tol = 1e-9) {
  double sum = 0.0;
  for (double& p : probs) {
    if (p < 0.0) {
      if (p < -tol) throw invalid_input_error("strategy entry is negative beyond tolerance");
      p = 0.0;
    }
    sum += p;
  }
  if (sum <= 0.0) throw invalid_input_error("strategy entries sum to zero");
  for (double& p : probs) p /= sum;
  return {player, std::move(probs)};
}

// A set of mixed strategies for distinct players: a full profile or a partial
// one (e.g. the n-1 learners).
struct MixedProfile {
  std::vector<MixedStrategy> strategies;

  const MixedStrategy* find(int player) const {
    for (const auto& s : strategies)
      if (s.player == player) return &s;
    return nullptr;
  }
};

inline void validate_profile(const MixedProfile& profile, const GameSpec& game) {
  std::set<int> seen;
  for (const auto& s : profile.strategies) {
    if (s.player < 0 || s.player >= game.num_players)
      throw invalid_input_error("strategy for out-of-range player " + std::to_string(s.player + 1));
    if (!seen.insert(s.player).second)
      throw invalid_input_error("duplicate strategy for player " + std::to_string(s.player + 1));
    if (static_cast<int>(s.probs.size()) != game.num_actions(s.player))
      throw invalid_input_error("strategy for player " + std::to_string(s.player + 1) +
                                " has wrong length");
    validate_strategy(s);
  }
}

inline MixedProfile pure_profile_as_mixed(const GameSpec& game, const std::vector<int>& profile) {
  MixedProfile mp;
  for (int i = 0; i < game.num_players; ++i)
    mp.strategies.push_back(MixedStrategy::point_mass(i, game.num_actions(i), profile[i]));
  return mp;
}

// Probability distribution over the product of the scoped players' action
// sets, flattened with the same convention as GameSpec (last scoped player
// fastest). Holds empirical distributions, correlated distributions and
// polytope projections.
struct JointDistribution {
  std::vector<int> scope;  // ordered player indices
  std::vector<double> probs;

  std::int64_t index_of(const GameSpec& game, const std::vector<int>& actions) const {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < scope.size(); ++i)
      idx = idx * game.num_actions(scope[i]) + actions[i];
    return idx;
  }
};

inline void validate_distribution(const JointDistribution& dist, const GameSpec& game) {
  std::int64_t cells = 1;
  std::set<int> seen;
  for (int p : dist.scope) {
    if (p < 0 || p >= game.num_players)
      throw invalid_input_error("distribution scope has out-of-range player");
    if (!seen.insert(p).second)
      throw invalid_input_error("distribution scope has a duplicate player");
    cells *= game.num_actions(p);
  }
  if (static_cast<std::int64_t>(dist.probs.size()) != cells)
    throw invalid_input_error("distribution has " + std::to_string(dist.probs.size()) +
                              " entries, expected " + std::to_string(cells));
  double sum = 0.0;
  for (double p : dist.probs) {
    if (!(p >= 0.0)) throw invalid_input_error("distribution has a negative entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionSumTol)
    throw invalid_input_error("distribution entries sum to " + std::to_string(sum));
}

// Iterates profiles of the product space `counts` in lexicographic order
// (last coordinate fastest). Returns false once exhausted.
inline bool next_profile(std::vector<int>& profile, const std::vector<int>& counts) {
  for (int i = static_cast<int>(profile.size()) - 1; i >= 0; --i) {
    if (++profile[i] < counts[i]) return true;
    profile[i] = 0;
  }
  return false;
}

inline std::vector<int> action_counts(const GameSpec& game) {
  std::vector<int> counts(game.num_players);
  for (int i = 0; i < game.num_players; ++i) counts[i] = game.num_actions(i);
  return counts;
}

// Multilinear extension of u_player to mixed strategies:
//   sum over pure profiles of (prod_i x_i(a_i)) * u_player(a).
// `player` may index a carried trailing utility row of an induced game.
inline double expected_utility(const GameSpec& game, const MixedProfile& profile, int player) {
  if (player < 0 || player >= static_cast<int>(game.utilities.size()))
    throw invalid_input_error("utility row " + std::to_string(player + 1) + " does not exist");
  if (static_cast<int>(profile.strategies.size()) != game.num_players)
    throw invalid_input_error("profile does not cover all players");
  validate_profile(profile, game);

  std::vector<const MixedStrategy*> by_player(game.num_players);
  for (int i = 0; i < game.num_players; ++i) by_player[i] = profile.find(i);

  const std::vector<int> counts = action_counts(game);
  std::vector<int> a(game.num_players, 0);
  const std::vector<double>& u = game.utilities[player];
  double total = 0.0;
  std::int64_t idx = 0;
  do {
    double w = 1.0;
    for (int i = 0; i < game.num_players; ++i) w *= by_player[i]->probs[a[i]];
    total += w * u[idx];
    ++idx;
  } while (next_profile(a, counts));
  return total;
}

// u_player(Phi, alpha): joint distribution over the learners, independent
// optimizer mix alpha over player n's actions.
inline double expected_utility_joint(const GameSpec& game, const JointDistribution& learner_dist,
                                     const MixedStrategy& alpha, int player) {
  const int n = game.num_players;
  if (static_cast<int>(learner_dist.scope.size()) != n - 1)
    throw invalid_input_error("learner distribution must cover players 1.." + std::to_string(n - 1));
  for (int i = 0; i < n - 1; ++i)
    if (learner_dist.scope[i] != i)
      throw invalid_input_error("learner distribution scope must be players 1.." +
                                std::to_string(n - 1) + " in order");
  validate_distribution(learner_dist, game);
  if (alpha.player != n - 1 || static_cast<int>(alpha.probs.size()) != game.num_actions(n - 1))
    throw invalid_input_error("alpha is not a strategy of the last player");
  validate_strategy(alpha);

  const std::vector<double>& u = game.utilities[player];
  const int kn = game.num_actions(n - 1);
  double total = 0.0;
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(learner_dist.probs.size()); ++j) {
    const double pj = learner_dist.probs[j];
    if (pj == 0.0) continue;
    // Learner cells are the leading index block, so the full-profile index is
    // j * kn + a_n.
    for (int an = 0; an < kn; ++an) total += pj * alpha.probs[an] * u[j * kn + an];
  }
  return total;
}

// Expected utility of pure action `action` for `player` against the others'
// mixed strategies.
inline double action_value(const GameSpec& game, int player, int action,
                           const MixedProfile& others) {
  std::vector<const MixedStrategy*> by_player(game.num_players, nullptr);
  for (const auto& s : others.strategies) by_player[s.player] = &s;

  std::vector<int> counts = action_counts(game);
  counts[player] = 1;  // pinned
  std::vector<int> a(game.num_players, 0);
  const std::vector<double>& u = game.utilities[player];
  double total = 0.0;
  do {
    double w = 1.0;
    std::vector<int> full = a;
    full[player] = action;
    for (int i = 0; i < game.num_players; ++i)
      if (i != player) w *= by_player[i]->probs[a[i]];
    total += w * u[game.index_of(full)];
  } while (next_profile(a, counts));
  return total;
}

// Pure actions of `player` attaining the maximum payoff against `others`,
// within kBestReplyTol. A mixed strategy is a best reply iff it is supported
// inside this set.
inline std::vector<int> best_reply_set(const GameSpec& game, int player,
                                       const MixedProfile& others) {
  if (player < 0 || player >= game.num_players)
    throw invalid_input_error("best reply for out-of-range player");
  std::set<int> covered;
  for (const auto& s : others.strategies) covered.insert(s.player);
  if (covered.count(player) || static_cast<int>(covered.size()) != game.num_players - 1)
    throw invalid_input_error("opponent profile must cover exactly the other players");
  validate_profile(others, game);

  const int k = game.num_actions(player);
  std::vector<double> values(k);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) {
    values[a] = action_value(game, player, a, others);
    best = std::max(best, values[a]);
  }
  std::vector<int> reply;
  for (int a = 0; a < k; ++a)
    if (values[a] >= best - kBestReplyTol) reply.push_back(a);
  return reply;
}

// The (n-1)-player game G_alpha obtained by fixing the optimizer's mixed
// strategy: every utility row is averaged over the optimizer's actions, and
// the optimizer's own row is kept as a trailing carried row.
inline GameSpec induce_game(const GameSpec& game, const MixedStrategy& alpha) {
  const int n = game.num_players;
  if (n < 2) throw invalid_input_error("cannot induce from a one-player game");
  if (alpha.player != n - 1 || static_cast<int>(alpha.probs.size()) != game.num_actions(n - 1))
    throw invalid_input_error("alpha is not a strategy of the last player");
  validate_strategy(alpha);

  GameSpec induced;
  induced.num_players = n - 1;
  induced.action_labels.assign(game.action_labels.begin(), game.action_labels.end() - 1);

  const int kn = game.num_actions(n - 1);
  const std::int64_t learner_cells = game.profile_count() / kn;
  induced.utilities.resize(game.utilities.size());
  for (std::size_t r = 0; r < game.utilities.size(); ++r) {
    induced.utilities[r].resize(learner_cells);
    for (std::int64_t j = 0; j < learner_cells; ++j) {
      double v = 0.0;
      for (int an = 0; an < kn; ++an) v += alpha.probs[an] * game.utilities[r][j * kn + an];
      induced.utilities[r][j] = v;
    }
  }
  return induced;
}

}  // namespace stacksim
