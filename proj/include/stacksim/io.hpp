#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stacksim/builtin_games.hpp"
#include "stacksim/errors.hpp"
#include "stacksim/game.hpp"
#include "stacksim/learners.hpp"
#include "stacksim/simulation.hpp"

namespace stacksim {

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::string stripped = line;
  const std::size_t hash = stripped.find('#');
  if (hash != std::string::npos) stripped.erase(hash);
  std::istringstream in(stripped);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

inline double parse_real(const std::string& tok, const std::string& file, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw parse_error(file, line, "expected a number, got '" + tok + "'");
  return v;
}

inline long long parse_integer(const std::string& tok, const std::string& file, int line) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw parse_error(file, line, "expected an integer, got '" + tok + "'");
  return v;
}

inline std::uint64_t parse_seed(const std::string& tok, const std::string& file, int line) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw parse_error(file, line, "expected a seed, got '" + tok + "'");
  return v;
}

}  // namespace detail

// Game file: comments start with '#'; then
//   players N
//   N 'actions' lines listing each player's labels
//   N 'utilities' lines, each a flat tensor over pure profiles in
//   lexicographic order with the LAST player's action varying fastest.
inline GameSpec parse_game(std::istream& in, const std::string& file) {
  GameSpec game;
  int line_no = 0, actions_seen = 0, utilities_seen = 0;
  bool players_seen = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> tok = detail::tokenize(line);
    if (tok.empty()) continue;

    if (tok[0] == "players") {
      if (players_seen) throw parse_error(file, line_no, "duplicate 'players' line");
      if (tok.size() != 2) throw parse_error(file, line_no, "'players' takes one integer");
      const long long n = detail::parse_integer(tok[1], file, line_no);
      if (n < 2) throw parse_error(file, line_no, "a game needs at least 2 players");
      if (n > 16) throw parse_error(file, line_no, "too many players");
      game.num_players = static_cast<int>(n);
      players_seen = true;
    } else if (tok[0] == "actions") {
      if (!players_seen) throw parse_error(file, line_no, "'actions' before 'players'");
      if (actions_seen >= game.num_players)
        throw parse_error(file, line_no, "more 'actions' lines than players");
      if (tok.size() < 2) throw parse_error(file, line_no, "a player needs at least one action");
      std::vector<std::string> labels(tok.begin() + 1, tok.end());
      for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
          if (labels[i] == labels[j])
            throw parse_error(file, line_no, "duplicate action label '" + labels[i] + "'");
      game.action_labels.push_back(std::move(labels));
      ++actions_seen;
    } else if (tok[0] == "utilities") {
      if (actions_seen != game.num_players)
        throw parse_error(file, line_no, "'utilities' before all 'actions' lines");
      if (utilities_seen >= game.num_players)
        throw parse_error(file, line_no, "more 'utilities' lines than players");
      const std::int64_t cells = game.profile_count();
      if (static_cast<std::int64_t>(tok.size()) - 1 != cells)
        throw parse_error(file, line_no,
                          "expected " + std::to_string(cells) + " utilities, got " +
                              std::to_string(tok.size() - 1));
      std::vector<double> u(cells);
      for (std::int64_t j = 0; j < cells; ++j)
        u[j] = detail::parse_real(tok[j + 1], file, line_no);
      game.utilities.push_back(std::move(u));
      ++utilities_seen;
    } else {
      throw parse_error(file, line_no, "unknown directive '" + tok[0] + "'");
    }
  }
  if (!players_seen) throw parse_error(file, line_no + 1, "missing 'players' line");
  if (actions_seen != game.num_players)
    throw parse_error(file, line_no + 1, "missing 'actions' lines");
  if (utilities_seen != game.num_players)
    throw parse_error(file, line_no + 1, "missing 'utilities' lines");
  validate_game(game);
  return game;
}

inline GameSpec parse_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input_error("cannot open game file '" + path + "'");
  return parse_game(in, path);
}

// %.17g: doubles survive the round trip exactly.
inline std::string serialize_game(const GameSpec& game) {
  std::string out = "players " + std::to_string(game.num_players) + "\n";
  for (int i = 0; i < game.num_players; ++i) {
    out += "actions";
    for (const std::string& label : game.action_labels[i]) out += " " + label;
    out += "\n";
  }
  char buf[40];
  for (int i = 0; i < game.num_players; ++i) {
    out += "utilities";
    for (double v : game.utilities[i]) {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline void write_game_file(const std::string& path, const GameSpec& game) {
  std::ofstream out(path);
  if (!out) throw invalid_input_error("cannot write game file '" + path + "'");
  out << serialize_game(game);
}

// A game reference is a built-in name or a file path.
inline GameSpec load_game(const std::string& ref) {
  if (std::optional<GameSpec> builtin = builtin_game(ref)) return *builtin;
  return parse_game_file(ref);
}

struct OptimizerSpec {
  std::string kind;               // "fixed-mixed" or "scripted"
  std::vector<std::string> args;  // probabilities / action labels
};

// Experiment file, one directive per line:
//   game <path or builtin>     mode <simulate|values|counterexample|guarantee>
//   learner <kind> [tie_break=<rule>] [mu=<real>]     (one line per learner)
//   optimizer fixed-mixed <p1 p2 ...> | scripted <label...>
//   rounds <M>    seeds <s1 s2 ...>    epsilon <e>    grid <resolution>
//   checkpoints <t1 t2 ...>    output <csv path>    which <ce1|ce2>
struct ExperimentConfig {
  std::string source;  // file name, for error messages
  std::string game_ref;
  std::string mode;
  std::vector<LearnerPolicy> learners;
  std::optional<OptimizerSpec> optimizer;
  int rounds = 0;
  std::vector<std::uint64_t> seeds;
  double epsilon = 0.0;
  double grid_resolution = kDefaultGridResolution;
  std::vector<int> checkpoints;  // empty: powers of ten up to the horizon
  std::string output;
  std::string which;
};

// Accepts a mesh (0.02) or a denominator (50); both mean a 1/50 lattice.
inline double normalize_grid_resolution(double value) {
  if (!(value > 0.0)) throw invalid_config_error("grid resolution must be positive");
  return value > 1.0 ? 1.0 / value : value;
}

inline LearnerPolicy parse_learner_tokens(const std::vector<std::string>& tok,
                                          const std::string& file, int line_no) {
  if (tok.size() < 2) throw parse_error(file, line_no, "'learner' needs a kind");
  LearnerPolicy policy;
  try {
    policy.kind = learner_kind_from_string(tok[1]);
  } catch (const invalid_config_error& e) {
    throw parse_error(file, line_no, e.what());
  }
  for (std::size_t j = 2; j < tok.size(); ++j) {
    const std::size_t eq = tok[j].find('=');
    if (eq == std::string::npos)
      throw parse_error(file, line_no, "learner options look like key=value, got '" + tok[j] + "'");
    const std::string key = tok[j].substr(0, eq), value = tok[j].substr(eq + 1);
    if (key == "tie_break") {
      try {
        policy.tie_break = tie_break_from_string(value);
      } catch (const invalid_config_error& e) {
        throw parse_error(file, line_no, e.what());
      }
    } else if (key == "mu") {
      policy.mu = detail::parse_real(value, file, line_no);
    } else {
      throw parse_error(file, line_no, "unknown learner option '" + key + "'");
    }
  }
  return policy;
}

inline ExperimentConfig parse_config(std::istream& in, const std::string& file) {
  ExperimentConfig cfg;
  cfg.source = file;
  int line_no = 0;
  std::string line;
  auto single = [&](const std::vector<std::string>& tok) -> const std::string& {
    if (tok.size() != 2)
      throw parse_error(file, line_no, "'" + tok[0] + "' takes exactly one value");
    return tok[1];
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<std::string> tok = detail::tokenize(line);
    if (tok.empty()) continue;
    const std::string& key = tok[0];

    if (key == "game") {
      cfg.game_ref = single(tok);
    } else if (key == "mode") {
      cfg.mode = single(tok);
    } else if (key == "learner") {
      cfg.learners.push_back(parse_learner_tokens(tok, file, line_no));
    } else if (key == "optimizer") {
      if (tok.size() < 3)
        throw parse_error(file, line_no, "'optimizer' needs a kind and arguments");
      cfg.optimizer = OptimizerSpec{tok[1], {tok.begin() + 2, tok.end()}};
    } else if (key == "rounds") {
      cfg.rounds = static_cast<int>(detail::parse_integer(single(tok), file, line_no));
    } else if (key == "seeds") {
      if (tok.size() < 2) throw parse_error(file, line_no, "'seeds' needs at least one value");
      for (std::size_t j = 1; j < tok.size(); ++j)
        cfg.seeds.push_back(detail::parse_seed(tok[j], file, line_no));
    } else if (key == "epsilon") {
      cfg.epsilon = detail::parse_real(single(tok), file, line_no);
    } else if (key == "grid" || key == "grid_resolution") {
      cfg.grid_resolution =
          normalize_grid_resolution(detail::parse_real(single(tok), file, line_no));
    } else if (key == "checkpoints") {
      if (tok.size() < 2) throw parse_error(file, line_no, "'checkpoints' needs values");
      for (std::size_t j = 1; j < tok.size(); ++j)
        cfg.checkpoints.push_back(
            static_cast<int>(detail::parse_integer(tok[j], file, line_no)));
    } else if (key == "output") {
      cfg.output = single(tok);
    } else if (key == "which") {
      cfg.which = single(tok);
    } else {
      throw parse_error(file, line_no, "unknown directive '" + key + "'");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_config_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

inline OptimizerPolicy resolve_optimizer(const OptimizerSpec& spec, const GameSpec& game) {
  const int n = game.num_players;
  if (spec.kind == "fixed-mixed") {
    std::vector<double> probs;
    for (const std::string& tok : spec.args) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw invalid_config_error("optimizer probability '" + tok + "' is not a number");
      probs.push_back(v);
    }
    if (static_cast<int>(probs.size()) != game.num_actions(n - 1))
      throw invalid_config_error("optimizer mix needs one probability per action");
    MixedStrategy alpha{n - 1, std::move(probs)};
    validate_strategy(alpha);
    return OptimizerPolicy::fixed(std::move(alpha));
  }
  if (spec.kind == "scripted") {
    std::vector<int> seq;
    for (const std::string& label : spec.args) seq.push_back(game.action_index(n - 1, label));
    return OptimizerPolicy::scripted(std::move(seq));
  }
  throw invalid_config_error("unknown optimizer kind '" + spec.kind + "'");
}

inline void validate_config(const ExperimentConfig& cfg) {
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw invalid_config_error(cfg.source + ": " + what);
  };
  need(!cfg.mode.empty(), "missing 'mode'");
  need(cfg.mode == "simulate" || cfg.mode == "values" || cfg.mode == "counterexample" ||
           cfg.mode == "guarantee",
       "unknown mode '" + cfg.mode + "'");
  if (cfg.mode == "values") {
    need(!cfg.game_ref.empty(), "mode values needs 'game'");
    return;
  }
  if (cfg.mode == "counterexample") {
    need(cfg.which == "ce1" || cfg.which == "ce2", "mode counterexample needs 'which ce1|ce2'");
    need(cfg.rounds >= 1, "'rounds' must be at least 1");
    return;
  }
  need(!cfg.game_ref.empty(), "mode " + cfg.mode + " needs 'game'");
  need(cfg.rounds >= 1, "'rounds' must be at least 1");
  need(!cfg.seeds.empty(), "mode " + cfg.mode + " needs 'seeds'");
  need(!cfg.learners.empty(), "mode " + cfg.mode + " needs at least one 'learner'");
  if (cfg.mode == "simulate") {
    need(cfg.optimizer.has_value(), "mode simulate needs 'optimizer'");
    need(cfg.optimizer->kind == "fixed-mixed",
         "mode simulate measures distances to the polytopes of a fixed commitment; "
         "use 'optimizer fixed-mixed'");
  }
  if (cfg.mode == "guarantee") {
    need(cfg.epsilon > 0.0, "mode guarantee needs 'epsilon' > 0");
    for (const LearnerPolicy& p : cfg.learners)
      need(p.kind == cfg.learners.front().kind,
           "mode guarantee needs all learners of one regret-matching kind");
  }
  int prev = 0;
  for (int t : cfg.checkpoints) {
    need(t > prev, "'checkpoints' must be strictly increasing");
    need(t <= cfg.rounds, "a checkpoint exceeds 'rounds'");
    prev = t;
  }
}

// Powers of ten up to the horizon, then the horizon itself.
inline std::vector<int> default_checkpoints(int rounds) {
  std::vector<int> out;
  for (long long t = 10; t < rounds; t *= 10) out.push_back(static_cast<int>(t));
  out.push_back(rounds);
  return out;
}

inline std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// One CSV row per (seed, checkpoint); floats carry 12 significant digits.
inline void write_metrics_csv(std::ostream& os, int num_learners,
                              const std::vector<std::pair<std::uint64_t, MetricsSeries>>& runs) {
  os << "seed,t,avg_opt_payoff,dist_ced,dist_hannan";
  for (int i = 1; i <= num_learners; ++i) os << ",ext_regret_p" << i;
  for (int i = 1; i <= num_learners; ++i) os << ",int_regret_p" << i;
  os << "\n";
  for (const auto& [seed, series] : runs) {
    for (const MetricsRecord& rec : series) {
      os << seed << "," << rec.t << "," << format_sig12(rec.avg_opt_payoff) << ","
         << format_sig12(rec.dist_ced) << "," << format_sig12(rec.dist_hannan);
      for (double r : rec.ext_regret) os << "," << format_sig12(r);
      for (double r : rec.int_regret) os << "," << format_sig12(r);
      os << "\n";
    }
  }
}

}  // namespace stacksim
