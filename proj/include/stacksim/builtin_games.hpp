#pragma once

#include <optional>
#include <string>

#include "stacksim/game.hpp"

namespace stacksim {

// Three players: learners 1 and 2 with actions {T,B} and {L,R}, optimizer
// with the single action E. Profile cells in index order: (T,L,E), (T,R,E),
// (B,L,E), (B,R,E). Both learners are paid 1 for coordinating on (T,L) or
// (B,R) and 0 otherwise; the games differ only in the optimizer's row.
//
// Game one: optimizer gains only at (B,R), loses at (B,L). Regret matching
// locks the learners on (T,L) forever, so the optimizer never collects.
inline GameSpec counterexample_one() {
  return make_game({{"T", "B"}, {"L", "R"}, {"E"}},
                   {{1, 0, 0, 1},     // player 1
                    {1, 0, 0, 1},     // player 2
                    {0, 0, -1, 1}});  // optimizer
}

// Game two: optimizer gains at (T,R), loses at (B,L). A regret-matching
// pair can cycle (T,L) -> (B,R) -> (B,L) and hold the optimizer to -1/3
// on average, strictly below its mixed-commitment value of 0.
inline GameSpec counterexample_two() {
  return make_game({{"T", "B"}, {"L", "R"}, {"E"}},
                   {{1, 0, 0, 1},
                    {1, 0, 0, 1},
                    {0, 1, -1, 0}});
}

inline std::optional<GameSpec> builtin_game(const std::string& name) {
  if (name == "ce1") return counterexample_one();
  if (name == "ce2") return counterexample_two();
  return std::nullopt;
}

// Scripted learner kinds demand the exact tensor they were written against.
inline bool same_tensors(const GameSpec& a, const GameSpec& b) {
  return a.num_players == b.num_players && a.action_labels == b.action_labels &&
         a.utilities == b.utilities;
}

}  // namespace stacksim
