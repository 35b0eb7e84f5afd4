#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stacksim/equilibria.hpp"
#include "stacksim/errors.hpp"
#include "stacksim/game.hpp"
#include "stacksim/learners.hpp"

namespace stacksim {

namespace rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Each player draws from an independent counter-based stream: round t of
// player i is a pure function of (master seed, i, t). Sampling one action
// consumes exactly one draw, so trajectories are reproducible byte for byte
// and metrics computation cannot perturb play.
inline std::uint64_t stream_seed(std::uint64_t master, int player) {
  return mix64(master ^ (kGolden * static_cast<std::uint64_t>(player + 1)));
}

inline double unit_draw(std::uint64_t stream, std::int64_t t) {
  const std::uint64_t x = mix64(stream + kGolden * static_cast<std::uint64_t>(t));
  return static_cast<double>(x >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace rng

inline int sample_action(const MixedStrategy& strategy, double u) {
  double cum = 0.0;
  int last_positive = 0;
  for (int a = 0; a < static_cast<int>(strategy.probs.size()); ++a) {
    if (strategy.probs[a] <= 0.0) continue;
    cum += strategy.probs[a];
    last_positive = a;
    if (u < cum) return a;
  }
  return last_positive;  // u landed in the roundoff tail
}

struct OptimizerPolicy {
  enum class Kind { fixed_mixed, scripted };
  Kind kind = Kind::fixed_mixed;
  MixedStrategy alpha;        // fixed_mixed
  std::vector<int> sequence;  // scripted: cycled over rounds

  static OptimizerPolicy fixed(MixedStrategy a) {
    OptimizerPolicy p;
    p.kind = Kind::fixed_mixed;
    p.alpha = std::move(a);
    return p;
  }
  static OptimizerPolicy scripted(std::vector<int> seq) {
    OptimizerPolicy p;
    p.kind = Kind::scripted;
    p.sequence = std::move(seq);
    return p;
  }
};

inline std::string describe(const OptimizerPolicy& policy) {
  if (policy.kind == OptimizerPolicy::Kind::fixed_mixed) {
    std::string s = "fixed-mixed [";
    for (std::size_t i = 0; i < policy.alpha.probs.size(); ++i)
      s += (i ? ", " : "") + std::to_string(policy.alpha.probs[i]);
    return s + "]";
  }
  std::string s = "scripted [";
  for (std::size_t i = 0; i < policy.sequence.size(); ++i)
    s += (i ? ", " : "") + std::to_string(policy.sequence[i]);
  return s + "]";
}

inline std::string describe(const LearnerPolicy& policy) {
  std::string s = to_string(policy.kind) + " tie_break=" + to_string(policy.tie_break);
  if (policy.mu) s += " mu=" + std::to_string(*policy.mu);
  return s;
}

// Realized play of one seeded run: profile t occupies
// actions[t*n .. t*n + n).
struct Trajectory {
  GameSpec game;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<std::int32_t> actions;
  std::vector<std::string> policy_descriptors;

  std::vector<int> profile(int t) const {
    const int n = game.num_players;
    return std::vector<int>(actions.begin() + static_cast<std::size_t>(t) * n,
                            actions.begin() + static_cast<std::size_t>(t + 1) * n);
  }
};

inline void validate_optimizer_policy(const GameSpec& game, const OptimizerPolicy& policy) {
  const int n = game.num_players;
  if (policy.kind == OptimizerPolicy::Kind::fixed_mixed) {
    if (policy.alpha.player != n - 1 ||
        static_cast<int>(policy.alpha.probs.size()) != game.num_actions(n - 1))
      throw invalid_config_error("optimizer strategy does not match the last player");
    validate_strategy(policy.alpha);
    return;
  }
  if (policy.sequence.empty())
    throw invalid_config_error("scripted optimizer needs a nonempty action sequence");
  for (int a : policy.sequence)
    if (a < 0 || a >= game.num_actions(n - 1))
      throw invalid_config_error("scripted optimizer sequence has an out-of-range action");
}

// Plays M rounds. Every round: each learner's next mixed strategy is
// computed from its current regret state, every player samples
// independently from its own stream, then the realized profile updates all
// learner states.
inline Trajectory run(const GameSpec& game, const OptimizerPolicy& optimizer,
                      const std::vector<LearnerPolicy>& learners, int M, std::uint64_t seed) {
  validate_game(game);
  const int n = game.num_players;
  if (n < 2) throw invalid_config_error("simulation needs an optimizer and at least one learner");
  if (static_cast<int>(learners.size()) != n - 1)
    throw invalid_config_error("expected " + std::to_string(n - 1) + " learner policies, got " +
                               std::to_string(learners.size()));
  if (M < 1) throw invalid_config_error("horizon must be at least 1");
  validate_optimizer_policy(game, optimizer);
  for (int i = 0; i < n - 1; ++i) validate_learner_policy(game, i, learners[i]);

  std::vector<InternalRegretState> internal;
  std::vector<ExternalRegretState> external;
  std::vector<std::uint64_t> streams;
  for (int i = 0; i < n; ++i) streams.push_back(rng::stream_seed(seed, i));
  for (int i = 0; i < n - 1; ++i) {
    internal.push_back(InternalRegretState::zero(i, game.num_actions(i)));
    external.push_back(ExternalRegretState::zero(i, game.num_actions(i)));
  }

  Trajectory traj;
  traj.game = game;
  traj.seed = seed;
  traj.horizon = M;
  traj.actions.reserve(static_cast<std::size_t>(M) * n);
  traj.policy_descriptors.push_back("optimizer " + describe(optimizer));
  for (int i = 0; i < n - 1; ++i)
    traj.policy_descriptors.push_back("learner " + std::to_string(i + 1) + " " +
                                      describe(learners[i]));

  std::vector<int> last_action(n - 1, -1);
  std::vector<int> prev_learner_profile;
  std::vector<int> profile(n);
  for (int t = 0; t < M; ++t) {
    for (int i = 0; i < n - 1; ++i) {
      const MixedStrategy s = learner_next_strategy(game, i, learners[i], internal[i],
                                                    external[i], last_action[i],
                                                    prev_learner_profile);
      profile[i] = sample_action(s, rng::unit_draw(streams[i], t));
    }
    if (optimizer.kind == OptimizerPolicy::Kind::fixed_mixed)
      profile[n - 1] = sample_action(optimizer.alpha, rng::unit_draw(streams[n - 1], t));
    else
      profile[n - 1] = optimizer.sequence[t % optimizer.sequence.size()];

    for (int i = 0; i < n - 1; ++i) {
      internal[i] = update_internal_regret(internal[i], game, profile);
      external[i] = update_external_regret(external[i], game, profile);
      last_action[i] = profile[i];
    }
    prev_learner_profile.assign(profile.begin(), profile.end() - 1);
    for (int i = 0; i < n; ++i) traj.actions.push_back(profile[i]);
  }
  return traj;
}

// Frequencies of the restricted profiles over the first `upto` rounds
// (defaults to the whole trajectory). Entries are exact multiples of 1/t.
inline JointDistribution empirical_distribution(const Trajectory& traj,
                                                const std::vector<int>& players, int upto = -1) {
  const int n = traj.game.num_players;
  const int t = upto < 0 ? traj.horizon : upto;
  if (t < 1 || t > traj.horizon) throw invalid_input_error("empirical prefix out of range");
  if (players.empty()) throw invalid_input_error("empirical distribution needs a player subset");

  JointDistribution dist;
  dist.scope = players;
  std::int64_t cells = 1;
  for (int p : players) {
    if (p < 0 || p >= n) throw invalid_input_error("empirical scope has an unknown player");
    cells *= traj.game.num_actions(p);
  }
  std::vector<std::int64_t> counts(cells, 0);
  std::vector<int> restricted(players.size());
  for (int s = 0; s < t; ++s) {
    for (std::size_t j = 0; j < players.size(); ++j)
      restricted[j] = traj.actions[static_cast<std::size_t>(s) * n + players[j]];
    ++counts[dist.index_of(traj.game, restricted)];
  }
  dist.probs.resize(cells);
  for (std::int64_t j = 0; j < cells; ++j)
    dist.probs[j] = static_cast<double>(counts[j]) / static_cast<double>(t);
  return dist;
}

inline std::vector<int> learner_indices(const GameSpec& game) {
  std::vector<int> ids(game.num_players - 1);
  for (int i = 0; i < game.num_players - 1; ++i) ids[i] = i;
  return ids;
}

struct MetricsRecord {
  int t = 0;
  double avg_opt_payoff = 0.0;
  double dist_ced = 0.0;
  double dist_hannan = 0.0;
  std::vector<double> ext_regret;  // one per learner
  std::vector<double> int_regret;
};

using MetricsSeries = std::vector<MetricsRecord>;

// Checkpoint metrics: running average of the optimizer's realized payoff,
// L1 distances of the learners' empirical distribution to CED(G_alpha) and
// H(G_alpha), and each learner's external/internal regret over the prefix.
// Distances cost an LP each, hence checkpoints instead of every round.
inline MetricsSeries compute_metrics(const Trajectory& traj, const MixedStrategy& alpha,
                                     const std::vector<int>& checkpoints) {
  const int n = traj.game.num_players;
  int prev = 0;
  for (int t : checkpoints) {
    if (t <= prev || t > traj.horizon)
      throw invalid_input_error("checkpoints must increase and stay within the horizon");
    prev = t;
  }

  std::vector<std::vector<int>> history;
  history.reserve(traj.horizon);
  MetricsSeries series;
  double payoff_sum = 0.0;
  std::size_t next_cp = 0;
  for (int t = 0; t < traj.horizon && next_cp < checkpoints.size(); ++t) {
    history.push_back(traj.profile(t));
    payoff_sum += traj.game.utility(n - 1, history.back());
    if (t + 1 != checkpoints[next_cp]) continue;
    ++next_cp;

    MetricsRecord rec;
    rec.t = t + 1;
    rec.avg_opt_payoff = payoff_sum / rec.t;
    const JointDistribution emp = empirical_distribution(traj, learner_indices(traj.game), rec.t);
    rec.dist_ced = l1_distance_to_set(emp, traj.game, alpha, SetKind::ced).distance;
    rec.dist_hannan = l1_distance_to_set(emp, traj.game, alpha, SetKind::hannan).distance;
    for (int i = 0; i < n - 1; ++i) {
      const RegretPair r = measure_regrets(traj.game, history, i);
      rec.ext_regret.push_back(r.external);
      rec.int_regret.push_back(r.internal);
    }
    series.push_back(std::move(rec));
  }
  return series;
}

// Strong-law sanity check for a fixed-mixed run: the average gap between the
// realized payoff of `player` and its expectation over the optimizer's mix,
//   (1/M) sum_t (u_i(a^t) - u_i(a_-n^t, alpha)).
// Zero in expectation; vanishes almost surely as M grows.
inline double check_slln_drift(const Trajectory& traj, const MixedStrategy& alpha, int player) {
  const int n = traj.game.num_players;
  if (alpha.player != n - 1 || static_cast<int>(alpha.probs.size()) != traj.game.num_actions(n - 1))
    throw invalid_input_error("drift check needs the optimizer's mixed strategy");
  validate_strategy(alpha);

  double drift_sum = 0.0;
  std::vector<int> profile(n);
  for (int t = 0; t < traj.horizon; ++t) {
    profile = traj.profile(t);
    const double realized = traj.game.utility(player, profile);
    double expected = 0.0;
    for (int an = 0; an < traj.game.num_actions(n - 1); ++an) {
      profile[n - 1] = an;
      expected += alpha.probs[an] * traj.game.utility(player, profile);
    }
    drift_sum += realized - expected;
  }
  return drift_sum / traj.horizon;
}

struct GuaranteeReport {
  std::string value_name;  // "v_corr" or "v_h"
  double value = 0.0;
  MixedStrategy alpha;
  double epsilon = 0.0;
  int horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> per_seed_avg;
  double mean_avg = 0.0;  // expectation proxy
  double min_avg = 0.0;   // almost-sure proxy
  bool mean_pass = false;
  bool min_pass = false;
};

// Empirical check of the commitment guarantees: compute the pessimistic
// value matching the learner class (v_corr for internal-regret learners,
// v_h for external), commit to its witness alpha, and compare the realized
// averages against value - epsilon. The mean over seeds stands in for the
// expectation statement, the minimum for the almost-sure one.
inline GuaranteeReport verify_guarantee(const GameSpec& game, LearnerKind learner_kind, int M,
                                        const std::vector<std::uint64_t>& seeds, double epsilon,
                                        double grid_resolution = kDefaultGridResolution) {
  if (!(epsilon > 0.0)) throw invalid_config_error("epsilon must be positive");
  if (seeds.empty()) throw invalid_config_error("guarantee check needs at least one seed");
  if (learner_kind != LearnerKind::internal_regret_matching &&
      learner_kind != LearnerKind::external_regret_matching)
    throw invalid_config_error(
        "guarantees concern regret-matching learner classes, not scripted play");

  GuaranteeReport report;
  if (learner_kind == LearnerKind::internal_regret_matching) {
    StackelbergValue v = correlated_stackelberg_value(game, grid_resolution);
    report.value_name = "v_corr";
    report.value = v.value;
    report.alpha = std::move(v.alpha);
  } else {
    StackelbergValue v = hannan_stackelberg_value(game, grid_resolution);
    report.value_name = "v_h";
    report.value = v.value;
    report.alpha = std::move(v.alpha);
  }
  report.epsilon = epsilon;
  report.horizon = M;
  report.seeds = seeds;

  const int n = game.num_players;
  std::vector<LearnerPolicy> learners(n - 1, LearnerPolicy{learner_kind, TieBreak::repeat_previous,
                                                           std::nullopt});
  const OptimizerPolicy optimizer = OptimizerPolicy::fixed(report.alpha);
  double sum = 0.0, worst = 0.0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const Trajectory traj = run(game, optimizer, learners, M, seeds[s]);
    double payoff = 0.0;
    for (int t = 0; t < M; ++t) payoff += game.utility(n - 1, traj.profile(t));
    const double avg = payoff / M;
    report.per_seed_avg.push_back(avg);
    sum += avg;
    if (s == 0 || avg < worst) worst = avg;
  }
  report.mean_avg = sum / seeds.size();
  report.min_avg = worst;
  report.mean_pass = report.mean_avg >= report.value - epsilon;
  report.min_pass = report.min_avg >= report.value - epsilon;
  return report;
}

}  // namespace stacksim
