#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <stacksim/game.hpp>
#include <stacksim/simulation.hpp>

namespace testutil {

// Deterministic random game with utilities in [lo, hi); the same seed and
// shape always produce the same tensors, so fixtures can be frozen by seed.
inline stacksim::GameSpec random_game(std::uint64_t seed, const std::vector<int>& shape,
                                      double lo = 0.0, double hi = 1.0) {
  static const std::vector<std::string> alphabet = {"a", "b", "c", "d", "e",
                                                    "f", "g", "h", "i", "j"};
  const int n = static_cast<int>(shape.size());

  std::vector<std::vector<std::string>> labels(n);
  std::int64_t cells = 1;
  for (int i = 0; i < n; ++i) {
    labels[i].assign(alphabet.begin(), alphabet.begin() + shape[i]);
    cells *= shape[i];
  }

  std::vector<std::vector<double>> utilities(n, std::vector<double>(cells));
  std::int64_t t = 0;
  const std::uint64_t stream = stacksim::rng::stream_seed(seed, 0);
  for (int i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < cells; ++j)
      utilities[i][j] = lo + (hi - lo) * stacksim::rng::unit_draw(stream, t++);

  return stacksim::make_game(labels, utilities);
}

// Whether no player can gain more than tol by a unilateral pure deviation.
inline bool is_nash(const stacksim::GameSpec& game, const stacksim::MixedProfile& profile,
                    double tol) {
  for (int i = 0; i < game.num_players; ++i) {
    const double here = stacksim::expected_utility(game, profile, i);
    for (int a = 0; a < game.num_actions(i); ++a) {
      stacksim::MixedProfile deviated = profile;
      deviated.strategies[i] = stacksim::MixedStrategy::point_mass(i, game.num_actions(i), a);
      if (stacksim::expected_utility(game, deviated, i) > here + tol) return false;
    }
  }
  return true;
}

}  // namespace testutil
