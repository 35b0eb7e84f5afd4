#pragma once

#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "stacksim/builtin_games.hpp"
#include "stacksim/equilibria.hpp"
#include "stacksim/errors.hpp"
#include "stacksim/io.hpp"
#include "stacksim/learners.hpp"
#include "stacksim/simulation.hpp"

namespace stacksim {

inline std::string format_compact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_probs(const std::vector<double>& probs) {
  std::string s = "[";
  for (std::size_t i = 0; i < probs.size(); ++i) s += (i ? ", " : "") + format_compact(probs[i]);
  return s + "]";
}

inline void print_values_report(std::ostream& os, const StackelbergReport& report) {
  auto line = [&](const char* name, const StackelbergValue& v) {
    os << "  " << name << " = " << format_sig12(v.value) << "  method=" << v.method
       << "  alpha=" << format_probs(v.alpha.probs) << "\n";
  };
  os << "stackelberg values (grid resolution " << format_compact(report.grid_resolution) << ")\n";
  if (report.pure_optimistic)
    line("V_pure ", *report.pure_optimistic);
  else
    os << "  V_pure  = nonexistent\n";
  if (report.pure_pessimistic)
    line("v_pure ", *report.pure_pessimistic);
  else
    os << "  v_pure  = nonexistent\n";
  line("V_mixed", report.mixed_optimistic);
  line("v_mixed", report.mixed_pessimistic);
  line("v_corr ", report.correlated);
  line("v_h    ", report.hannan);
  os << "chain v_h <= v_corr <= v_mixed <= v_pure <= V_pure <= V_mixed: "
     << (report.chain_ok ? "OK" : "VIOLATED") << " (tolerance "
     << format_compact(report.chain_tolerance) << ")\n";
  if (report.pure_pessimistic && !report.pure_link_applicable)
    os << "  note: v_mixed and v_pure are not compared; the v_mixed commitment"
          " admits no pure response\n";
}

struct CounterexampleResult {
  Trajectory traj;
  double cumulative = 0.0;
  double average = 0.0;
  std::string reference_name;  // V_pure for the first game, v_mixed for the second
  double reference_value = 0.0;
  std::string headline;
};

// Replays a counterexample with its scripted learners against the built-in
// single-action optimizer, and compares the realized average against the
// value the play undercuts.
inline CounterexampleResult run_counterexample(const std::string& which, int rounds) {
  if (which != "ce1" && which != "ce2")
    throw invalid_config_error("counterexample must be ce1 or ce2");
  if (rounds < 1) throw invalid_config_error("rounds must be at least 1");

  const bool first = which == "ce1";
  const GameSpec game = first ? counterexample_one() : counterexample_two();
  const LearnerKind kind = first ? LearnerKind::scripted_ce1 : LearnerKind::scripted_ce2;
  const std::vector<LearnerPolicy> learners(2, LearnerPolicy{kind, TieBreak::repeat_previous, {}});
  const OptimizerPolicy optimizer = OptimizerPolicy::fixed(MixedStrategy::point_mass(2, 1, 0));

  CounterexampleResult result;
  result.traj = run(game, optimizer, learners, rounds, 0);
  for (int t = 0; t < rounds; ++t)
    result.cumulative += game.utility(2, result.traj.profile(t));
  result.average = result.cumulative / rounds;

  if (first) {
    result.reference_name = "V_pure";
    result.reference_value = pure_stackelberg_values(game).optimistic->value;
  } else {
    result.reference_name = "v_mixed";
    result.reference_value = mixed_stackelberg_values(game).pessimistic.value;
  }
  const char* rel = result.average < result.reference_value   ? "<"
                    : result.average > result.reference_value ? ">"
                                                               : "=";
  result.headline = "avg " + format_compact(result.average) + " " + rel + " " +
                    result.reference_name + " " + format_compact(result.reference_value);
  return result;
}

inline void print_trajectory(std::ostream& os, const Trajectory& traj) {
  const int n = traj.game.num_players;
  for (int t = 0; t < traj.horizon; ++t) {
    os << (t + 1);
    for (int i = 0; i < n; ++i)
      os << " " << traj.game.action_labels[i][traj.actions[static_cast<std::size_t>(t) * n + i]];
    os << "\n";
  }
}

inline void print_counterexample(std::ostream& os, const CounterexampleResult& result) {
  print_trajectory(os, result.traj);
  os << "cumulative optimizer utility " << format_compact(result.cumulative) << "\n";
  os << result.headline << "\n";
}

// Exactly one policy block per learner, or a single block for all of them.
inline std::vector<LearnerPolicy> expand_learners(const std::vector<LearnerPolicy>& blocks,
                                                  const GameSpec& game) {
  const int wanted = game.num_players - 1;
  if (static_cast<int>(blocks.size()) == wanted) return blocks;
  if (blocks.size() == 1) return std::vector<LearnerPolicy>(wanted, blocks.front());
  throw invalid_config_error("expected 1 or " + std::to_string(wanted) +
                             " learner blocks, got " + std::to_string(blocks.size()));
}

inline void cmd_values(const std::string& game_ref, double grid_resolution, std::ostream& os) {
  const GameSpec game = load_game(game_ref);
  print_values_report(os, compute_stackelberg_report(game, grid_resolution));
}

inline void cmd_counterexample(const std::string& which, int rounds, std::ostream& os,
                               const std::string& trajectory_path = "",
                               const std::string& metrics_path = "") {
  const CounterexampleResult result = run_counterexample(which, rounds);
  print_counterexample(os, result);
  if (!trajectory_path.empty()) {
    std::ofstream out(trajectory_path);
    if (!out) throw invalid_config_error("cannot write '" + trajectory_path + "'");
    print_trajectory(out, result.traj);
  }
  if (!metrics_path.empty()) {
    std::ofstream out(metrics_path);
    if (!out) throw invalid_config_error("cannot write '" + metrics_path + "'");
    const MixedStrategy alpha = MixedStrategy::point_mass(2, 1, 0);
    std::vector<std::pair<std::uint64_t, MetricsSeries>> runs;
    runs.emplace_back(result.traj.seed,
                      compute_metrics(result.traj, alpha, default_checkpoints(rounds)));
    write_metrics_csv(out, 2, runs);
  }
}

inline void cmd_simulate(const ExperimentConfig& cfg, std::ostream& fallback) {
  validate_config(cfg);
  const GameSpec game = load_game(cfg.game_ref);
  const OptimizerPolicy optimizer = resolve_optimizer(*cfg.optimizer, game);
  const std::vector<LearnerPolicy> learners = expand_learners(cfg.learners, game);
  const std::vector<int> checkpoints =
      cfg.checkpoints.empty() ? default_checkpoints(cfg.rounds) : cfg.checkpoints;

  std::vector<std::pair<std::uint64_t, MetricsSeries>> runs;
  for (std::uint64_t seed : cfg.seeds) {
    const Trajectory traj = run(game, optimizer, learners, cfg.rounds, seed);
    runs.emplace_back(seed, compute_metrics(traj, optimizer.alpha, checkpoints));
  }

  if (cfg.output.empty()) {
    write_metrics_csv(fallback, game.num_players - 1, runs);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw invalid_config_error("cannot write '" + cfg.output + "'");
  write_metrics_csv(out, game.num_players - 1, runs);
}

inline void print_guarantee_report(std::ostream& os, const GuaranteeReport& report) {
  const double threshold = report.value - report.epsilon;
  os << "guarantee target " << report.value_name << " = " << format_sig12(report.value)
     << "  commitment alpha = " << format_probs(report.alpha.probs) << "\n";
  os << "horizon " << report.horizon << ", " << report.seeds.size() << " seeds, epsilon "
     << format_compact(report.epsilon) << "\n";
  for (std::size_t s = 0; s < report.seeds.size(); ++s)
    os << "seed " << report.seeds[s] << ": avg " << format_sig12(report.per_seed_avg[s]) << "\n";
  os << "mean over seeds " << format_sig12(report.mean_avg) << " vs " << format_sig12(threshold)
     << ": " << (report.mean_pass ? "PASS" : "FAIL") << " (expected-value proxy)\n";
  os << "min over seeds " << format_sig12(report.min_avg) << " vs " << format_sig12(threshold)
     << ": " << (report.min_pass ? "PASS" : "FAIL") << " (almost-sure proxy)\n";
}

inline void cmd_guarantee(const ExperimentConfig& cfg, std::ostream& os) {
  validate_config(cfg);
  const GameSpec game = load_game(cfg.game_ref);
  const GuaranteeReport report = verify_guarantee(game, cfg.learners.front().kind, cfg.rounds,
                                                  cfg.seeds, cfg.epsilon, cfg.grid_resolution);
  print_guarantee_report(os, report);
}

}  // namespace stacksim
