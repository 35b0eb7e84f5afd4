#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "stacksim/builtin_games.hpp"
#include "stacksim/errors.hpp"
#include "stacksim/game.hpp"

namespace stacksim {

enum class LearnerKind {
  internal_regret_matching,
  external_regret_matching,
  scripted_ce1,
  scripted_ce2,
};

// Applied when the next-strategy rule leaves the mix undetermined (all
// positive regret parts zero). Default: repeat the previous action, uniform
// on round one. The scripted learners carry their own fixed rules instead.
enum class TieBreak { repeat_previous, first_action, uniform };

inline std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::internal_regret_matching: return "internal-regret-matching";
    case LearnerKind::external_regret_matching: return "external-regret-matching";
    case LearnerKind::scripted_ce1: return "scripted-ce1";
    case LearnerKind::scripted_ce2: return "scripted-ce2";
  }
  throw internal_error("unknown learner kind");
}

inline LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "internal-regret-matching") return LearnerKind::internal_regret_matching;
  if (s == "external-regret-matching") return LearnerKind::external_regret_matching;
  if (s == "scripted-ce1") return LearnerKind::scripted_ce1;
  if (s == "scripted-ce2") return LearnerKind::scripted_ce2;
  throw invalid_config_error("unknown learner kind '" + s + "'");
}

inline std::string to_string(TieBreak t) {
  switch (t) {
    case TieBreak::repeat_previous: return "repeat-previous";
    case TieBreak::first_action: return "first-action";
    case TieBreak::uniform: return "uniform";
  }
  throw internal_error("unknown tie break");
}

inline TieBreak tie_break_from_string(const std::string& s) {
  if (s == "repeat-previous") return TieBreak::repeat_previous;
  // "always-T" is the natural name in the two-action games.
  if (s == "first-action" || s == "always-T") return TieBreak::first_action;
  if (s == "uniform") return TieBreak::uniform;
  throw invalid_config_error("unknown tie break '" + s + "'");
}

struct LearnerPolicy {
  LearnerKind kind = LearnerKind::internal_regret_matching;
  TieBreak tie_break = TieBreak::repeat_previous;
  std::optional<double> mu;  // inertia denominator for > 2 actions
};

// Running-average conditional regrets
//   r_{a,b}^t = (1/t) sum_{m <= t, a_i^m = a} (u_i(b, a_-i^m) - u_i(a, a_-i^m)),
// diagonal identically zero. Averages, not sums: magnitudes stay bounded by
// the player's utility range and the entries match hand traces literally.
struct InternalRegretState {
  int player = 0;
  int t = 0;
  std::vector<std::vector<double>> regret_matrix;

  static InternalRegretState zero(int player, int num_actions) {
    return {player, 0,
            std::vector<std::vector<double>>(num_actions, std::vector<double>(num_actions, 0.0))};
  }
  int num_actions() const { return static_cast<int>(regret_matrix.size()); }
};

// Running-average external regrets R_a = (1/t) sum_t (u_i(a, a_-i^t) - u_i(a^t)).
struct ExternalRegretState {
  int player = 0;
  int t = 0;
  std::vector<double> regret_vector;

  static ExternalRegretState zero(int player, int num_actions) {
    return {player, 0, std::vector<double>(num_actions, 0.0)};
  }
  int num_actions() const { return static_cast<int>(regret_vector.size()); }
};

namespace detail {

inline void check_realized_profile(const GameSpec& game, const std::vector<int>& profile) {
  if (static_cast<int>(profile.size()) != game.num_players)
    throw invalid_input_error("realized profile does not cover all players");
  for (int i = 0; i < game.num_players; ++i)
    if (profile[i] < 0 || profile[i] >= game.num_actions(i))
      throw invalid_input_error("realized profile has an out-of-range action");
}

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace detail

inline InternalRegretState update_internal_regret(const InternalRegretState& state,
                                                  const GameSpec& game,
                                                  const std::vector<int>& realized_profile) {
  detail::check_realized_profile(game, realized_profile);
  const int i = state.player;
  const int k = game.num_actions(i);
  if (state.num_actions() != k) throw invalid_input_error("regret state has wrong shape");

  const int played = realized_profile[i];
  const double t = state.t;
  InternalRegretState next = state;
  next.t = state.t + 1;

  std::vector<int> deviated = realized_profile;
  const double u_played = game.utility(i, realized_profile);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      double gain = 0.0;
      if (a == played) {
        deviated[i] = b;
        gain = game.utility(i, deviated) - u_played;
        deviated[i] = played;
      }
      next.regret_matrix[a][b] = (t * state.regret_matrix[a][b] + gain) / (t + 1.0);
    }
  }
  return next;
}

inline ExternalRegretState update_external_regret(const ExternalRegretState& state,
                                                  const GameSpec& game,
                                                  const std::vector<int>& realized_profile) {
  detail::check_realized_profile(game, realized_profile);
  const int i = state.player;
  const int k = game.num_actions(i);
  if (state.num_actions() != k) throw invalid_input_error("regret state has wrong shape");

  const double t = state.t;
  ExternalRegretState next = state;
  next.t = state.t + 1;

  std::vector<int> deviated = realized_profile;
  const double u_played = game.utility(i, realized_profile);
  for (int a = 0; a < k; ++a) {
    deviated[i] = a;
    const double gain = game.utility(i, deviated) - u_played;
    next.regret_vector[a] = (t * state.regret_vector[a] + gain) / (t + 1.0);
  }
  return next;
}

namespace detail {

inline MixedStrategy break_tie(int player, int num_actions, TieBreak tie_break, int last_action) {
  switch (tie_break) {
    case TieBreak::first_action:
      return MixedStrategy::point_mass(player, num_actions, 0);
    case TieBreak::uniform:
      return MixedStrategy::uniform(player, num_actions);
    case TieBreak::repeat_previous:
      if (last_action < 0) return MixedStrategy::uniform(player, num_actions);
      return MixedStrategy::point_mass(player, num_actions, last_action);
  }
  throw internal_error("unknown tie break");
}

}  // namespace detail

// Two-action regret matching: play the first action with the probability p
// solving  p * (r_{TB})_+ = (1 - p) * (r_{BT})_+  where T, B name the two
// actions. Both positive parts zero leaves p undetermined and the tie break
// decides; exactly one nonzero forces p in {0, 1}.
inline MixedStrategy next_strategy_regret_matching_2action(const InternalRegretState& state,
                                                           TieBreak tie_break,
                                                           int last_action = -1) {
  if (state.num_actions() != 2)
    throw invalid_input_error("two-action regret matching needs exactly 2 actions");
  const double r_tb = detail::positive_part(state.regret_matrix[0][1]);
  const double r_bt = detail::positive_part(state.regret_matrix[1][0]);
  if (r_tb == 0.0 && r_bt == 0.0) return detail::break_tie(state.player, 2, tie_break, last_action);
  const double p = r_bt / (r_tb + r_bt);
  return {state.player, {p, 1.0 - p}};
}

// Inertia form for more than two actions: stay on the previous action,
// switching to b with probability (r_{last,b})_+ / mu. The caller picks mu
// larger than (k-1) * utility range so the switch mass cannot exceed one.
inline MixedStrategy next_strategy_internal_regret_matching(const InternalRegretState& state,
                                                            int last_action, double mu) {
  const int k = state.num_actions();
  if (last_action < 0 || last_action >= k)
    throw invalid_input_error("inertia rule needs the previous action");
  if (!(mu > 0.0)) throw invalid_config_error("inertia mu must be positive");

  std::vector<double> probs(k, 0.0);
  double switch_mass = 0.0;
  for (int b = 0; b < k; ++b) {
    if (b == last_action) continue;
    probs[b] = detail::positive_part(state.regret_matrix[last_action][b]) / mu;
    switch_mass += probs[b];
  }
  if (switch_mass > 1.0)
    throw invalid_config_error("inertia mu too small: switch probabilities exceed 1");
  probs[last_action] = 1.0 - switch_mass;
  return {state.player, std::move(probs)};
}

// External regret matching: play proportionally to the positive parts of the
// average regret vector; all nonpositive leaves the mix to the tie break.
inline MixedStrategy next_strategy_external_regret_matching(const ExternalRegretState& state,
                                                            TieBreak tie_break,
                                                            int last_action = -1) {
  const int k = state.num_actions();
  std::vector<double> probs(k);
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    probs[a] = detail::positive_part(state.regret_vector[a]);
    total += probs[a];
  }
  if (total <= 0.0) return detail::break_tie(state.player, k, tie_break, last_action);
  for (double& p : probs) p /= total;
  return {state.player, std::move(probs)};
}

// The scripted pairs keep their counterexample sequences alive by detecting
// the "p is undetermined" case. On script the running-average regrets cancel
// to exact zero in rational arithmetic, but the float averages leave dust on
// the order of 1e-16 which would spuriously force a switch. Entries this far
// below any genuine average regret (at least 1/t for integer payoffs) read
// as zero.
inline constexpr double kScriptedRegretTolerance = 1e-9;

namespace detail {

inline InternalRegretState without_dust(const InternalRegretState& state) {
  InternalRegretState cleaned = state;
  for (auto& row : cleaned.regret_matrix)
    for (double& r : row)
      if (r < kScriptedRegretTolerance) r = std::min(r, 0.0);
  return cleaned;
}

}  // namespace detail

// Scripted learner of the first counterexample: open with the first action
// (T for player 0, L under player 1's role swap) and resolve every
// undetermined p as 1, i.e. keep playing it. On that game the pair locks on
// (T,L) forever.
inline int scripted_ce1_step(int player, const InternalRegretState& state) {
  if (player != 0 && player != 1)
    throw invalid_config_error("scripted learners exist only for the two 2-action players");
  if (state.num_actions() != 2) throw invalid_config_error("scripted learner needs 2 actions");
  MixedStrategy s = next_strategy_regret_matching_2action(detail::without_dust(state),
                                                          TieBreak::first_action, -1);
  if (s.probs[0] == 1.0) return 0;
  if (s.probs[1] == 1.0) return 1;
  throw internal_error("scripted play reached a state with a fractional prescription");
}

// Scripted learner of the second counterexample. Whenever p is undetermined
// it is read off the previous learner profile:
//   player 0: p = 1 after (B,L); p = 0 after (T,L) or (B,R)
//   player 1: p = 1 after (B,R) or (B,L); p = 0 after (T,L)
// with p the probability of T (player 0) or of L (player 1). Round one plays
// (T,L). The profile (T,R) never occurs on script; for totality it resolves
// to p = 0. The pair cycles (T,L), (B,R), (B,L) forever.
inline int scripted_ce2_step(int player, const InternalRegretState& state,
                             const std::vector<int>& previous_profile) {
  if (player != 0 && player != 1)
    throw invalid_config_error("scripted learners exist only for the two 2-action players");
  if (state.num_actions() != 2) throw invalid_config_error("scripted learner needs 2 actions");
  if (state.t == 0) return 0;
  if (previous_profile.size() < 2)
    throw invalid_input_error("scripted step needs the previous learner profile");

  const InternalRegretState cleaned = detail::without_dust(state);
  const double r_tb = detail::positive_part(cleaned.regret_matrix[0][1]);
  const double r_bt = detail::positive_part(cleaned.regret_matrix[1][0]);
  if (r_tb > 0.0 || r_bt > 0.0) {
    MixedStrategy s = next_strategy_regret_matching_2action(cleaned, TieBreak::first_action, -1);
    if (s.probs[0] == 1.0) return 0;
    if (s.probs[1] == 1.0) return 1;
    throw internal_error("scripted play reached a state with a fractional prescription");
  }

  const int a1 = previous_profile[0], a2 = previous_profile[1];
  bool play_first;  // T for player 0, L for player 1
  if (player == 0)
    play_first = (a1 == 1 && a2 == 0);               // only after (B,L)
  else
    play_first = (a1 == 1 && (a2 == 0 || a2 == 1));  // after (B,L) or (B,R)
  return play_first ? 0 : 1;
}

struct RegretPair {
  double external = 0.0;
  double internal = 0.0;
};

// Both regret measures recomputed from scratch over a full history of pure
// profiles; the simulation's incremental states must agree with this.
inline RegretPair measure_regrets(const GameSpec& game, const std::vector<std::vector<int>>& history,
                                  int player) {
  if (history.empty()) throw invalid_input_error("cannot measure regrets of an empty history");
  const int k = game.num_actions(player);
  const double T = static_cast<double>(history.size());

  std::vector<double> external_sum(k, 0.0);
  std::vector<std::vector<double>> internal_sum(k, std::vector<double>(k, 0.0));
  for (const std::vector<int>& profile : history) {
    detail::check_realized_profile(game, profile);
    const int played = profile[player];
    const double u_played = game.utility(player, profile);
    std::vector<int> deviated = profile;
    for (int b = 0; b < k; ++b) {
      deviated[player] = b;
      const double gain = game.utility(player, deviated) - u_played;
      external_sum[b] += gain;
      internal_sum[played][b] += gain;
    }
  }

  RegretPair out;
  double best_external = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < k; ++a) best_external = std::max(best_external, external_sum[a] / T);
  out.external = detail::positive_part(best_external);
  double best_internal = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (a != b) best_internal = std::max(best_internal, internal_sum[a][b] / T);
  out.internal = detail::positive_part(best_internal);
  return out;
}

// Default inertia denominator for the k > 2 rule.
inline double default_inertia_mu(const GameSpec& game, int player) {
  const int k = game.num_actions(player);
  return 2.0 * (k - 1) * game.utility_range(player);
}

// Rejects policies that cannot run on this game: scripted kinds demand the
// exact counterexample tensors, and an explicit mu must leave the switch
// probabilities of the inertia rule below one.
inline void validate_learner_policy(const GameSpec& game, int player, const LearnerPolicy& policy) {
  if (player < 0 || player >= game.num_players - 1)
    throw invalid_config_error("learner policies apply to players 1.." +
                               std::to_string(game.num_players - 1));
  const int k = game.num_actions(player);
  if (policy.kind == LearnerKind::scripted_ce1 || policy.kind == LearnerKind::scripted_ce2) {
    const GameSpec wanted = policy.kind == LearnerKind::scripted_ce1 ? counterexample_one()
                                                                     : counterexample_two();
    if (!same_tensors(game, wanted))
      throw invalid_config_error("scripted learner '" + to_string(policy.kind) +
                                 "' requires its exact built-in game");
    if (player > 1) throw invalid_config_error("scripted learners are players 1 and 2 only");
  }
  if (policy.mu) {
    const double lower = (k - 1) * game.utility_range(player);
    if (!(*policy.mu > lower))
      throw invalid_config_error("mu must exceed (actions-1) * utility range = " +
                                 std::to_string(lower));
  }
}

// One round of the policy: the mixed strategy to sample this round, given
// the previous realized action and (for the second scripted learner) the
// previous learner profile.
inline MixedStrategy learner_next_strategy(const GameSpec& game, int player,
                                           const LearnerPolicy& policy,
                                           const InternalRegretState& internal_state,
                                           const ExternalRegretState& external_state,
                                           int last_action,
                                           const std::vector<int>& previous_learner_profile) {
  const int k = game.num_actions(player);
  switch (policy.kind) {
    case LearnerKind::internal_regret_matching:
      if (k == 2)
        return next_strategy_regret_matching_2action(internal_state, policy.tie_break, last_action);
      if (last_action < 0) return MixedStrategy::uniform(player, k);
      return next_strategy_internal_regret_matching(
          internal_state, last_action, policy.mu ? *policy.mu : default_inertia_mu(game, player));
    case LearnerKind::external_regret_matching:
      return next_strategy_external_regret_matching(external_state, policy.tie_break, last_action);
    case LearnerKind::scripted_ce1:
      return MixedStrategy::point_mass(player, k, scripted_ce1_step(player, internal_state));
    case LearnerKind::scripted_ce2:
      return MixedStrategy::point_mass(
          player, k, scripted_ce2_step(player, internal_state, previous_learner_profile));
  }
  throw internal_error("unknown learner kind");
}

}  // namespace stacksim
