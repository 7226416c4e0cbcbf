// hmgame: command-line front end for the hidden Markov game library.
//
// Exit codes: 0 success, 2 input error, 3 I/O error. Results go to stdout
// only after a command has fully succeeded; diagnostics go to stderr.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hmgame/experiments.hpp"
#include "hmgame/game.hpp"
#include "hmgame/hmg.hpp"
#include "hmgame/hmm.hpp"
#include "hmgame/io.hpp"

namespace fs = std::filesystem;
using namespace hmgame;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

void configure_logging() {
  auto logger = spdlog::stderr_color_st("hmgame");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("HMG_LOG");
  const std::string level = env ? env : "off";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::off);
  }
}

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

template <typename Derived>
std::string tuple_of(const Eigen::DenseBase<Derived>& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + fixed(v(i));
  return out + ")";
}

std::string labelled(const Eigen::VectorXd& v, const std::vector<std::string>& labels) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out += fmt::format("{}{}={}", i ? " " : "", labels.empty() ? std::to_string(idx) : labels[idx],
                       fixed(v(i)));
  }
  return out;
}

std::size_t argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

void solve_game(std::ostream& out, const fs::path& game_path, bool mixed) {
  const auto game = io::game_from_json(io::read_json_file(game_path));
  const auto pure = pure_nash_equilibria(game);
  if (pure.empty()) out << "pure: none\n";
  for (const auto& cell : pure) {
    const auto r = static_cast<Eigen::Index>(cell.row);
    const auto c = static_cast<Eigen::Index>(cell.col);
    out << fmt::format("pure: ({},{}) values=({},{})\n", game.row_strategies().label(cell.row),
                       game.col_strategies().label(cell.col), fixed(game.row_payoffs()(r, c)),
                       fixed(game.col_payoffs()(r, c)));
  }
  if (mixed) {
    const auto profile = mixed_equilibrium_2x2(game);
    out << fmt::format("mixed: p={} q={}\n", tuple_of(profile.row.probabilities()),
                       tuple_of(profile.col.probabilities()));
    out << fmt::format("values: row={} col={} kind={}\n", fixed(profile.row_value),
                       fixed(profile.col_value),
                       profile.kind == EquilibriumKind::Mixed ? "mixed" : "pure");
  }
}

HiddenMarkovModeld build_model(const HiddenMarkovGame& hmg, const std::string& transitions,
                               std::uint64_t seed) {
  if (transitions == "uniform-init") return to_hmm(hmg, UniformInit{seed});
  return to_hmm(hmg, io::matrix_from_json(io::read_json_file(transitions)));
}

void emit_json(std::ostream& out, const io::json& j, const std::string& path) {
  if (path.empty()) {
    out << j.dump(2) << "\n";
  } else {
    io::write_text_file(path, j.dump(2) + "\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Hidden Markov games: equilibria, clamped Baum-Welch, policies, scenarios"};
  app.require_subcommand(1, 1);

  std::string game_path;
  bool mixed = false;
  auto* solve = app.add_subcommand("solve-game", "List pure equilibria (and the 2x2 mixed one)");
  solve->add_option("--game", game_path, "Game JSON file")->required();
  solve->add_flag("--mixed", mixed, "Also compute the 2x2 mixed equilibrium");

  std::string hmg_path, transitions = "uniform-init", out_path;
  std::uint64_t seed = 0;
  auto* build = app.add_subcommand("build-hmg", "Reduce a hidden Markov game to an HMM");
  build->add_option("--hmg", hmg_path, "HMG JSON file")->required();
  build->add_option("--transitions", transitions,
                    "Transition matrix JSON file, or 'uniform-init'")
      ->capture_default_str();
  build->add_option("--seed", seed, "Seed for uniform-init")->capture_default_str();
  build->add_option("--out", out_path, "Write the HMM here instead of stdout");

  std::string obs_path, trace_path;
  TrainingConfig training;
  auto* train = app.add_subcommand("train", "Learn type transitions from observed actions");
  train->add_option("--hmg", hmg_path, "HMG JSON file")->required();
  train->add_option("--observations", obs_path, "Observed opponent actions")->required();
  train->add_option("--max-iterations", training.max_iterations)->capture_default_str();
  train->add_option("--tolerance", training.log_likelihood_tolerance)->capture_default_str();
  train->add_option("--seed", training.seed, "Seed for the initial transitions")
      ->capture_default_str();
  train->add_option("--out", out_path, "Write the trained HMM here instead of stdout");
  train->add_option("--trace", trace_path, "Write the log-likelihood trace as CSV");

  std::string model_path;
  auto* predict = app.add_subcommand("predict", "Type posterior and next-action prediction");
  predict->add_option("--model", model_path, "HMM JSON file")->required();
  predict->add_option("--observations", obs_path, "Observed opponent actions")->required();
  predict->add_option("--hmg", hmg_path, "HMG JSON file; adds the best response");

  std::string a_path, b_path;
  std::size_t length = 10000;
  auto* distance = app.add_subcommand("distance", "Symmetrized cross-likelihood model distance");
  distance->add_option("--a", a_path, "First HMM JSON file")->required();
  distance->add_option("--b", b_path, "Second HMM JSON file")->required();
  distance->add_option("--length", length, "Sampled sequence length")->capture_default_str();
  distance->add_option("--seed", seed)->capture_default_str();

  std::string scenario_path, out_dir;
  unsigned jobs = 1;
  auto* scenario = app.add_subcommand("run-scenario", "Run a seeded experiment scenario");
  scenario->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  scenario->add_option("--out", out_dir, "Output directory")->required();
  scenario->add_option("--jobs", jobs, "Seeds run concurrently")->capture_default_str()
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  std::ostringstream out;
  try {
    if (*solve) {
      solve_game(out, game_path, mixed);
    } else if (*build) {
      const auto hmg = io::hmg_from_json(io::read_json_file(hmg_path));
      emit_json(out, io::hmm_to_json(build_model(hmg, transitions, seed)), out_path);
    } else if (*train) {
      const auto hmg = io::hmg_from_json(io::read_json_file(hmg_path));
      const auto obs = io::read_observations(obs_path, hmg.observations().labels());
      const auto result = infer_transitions(hmg, obs, training);
      spdlog::info("trained on {} observations: {} EM iterations, log-likelihood {}", obs.size(),
                   result.trace.size() - 1, result.trace.back());
      if (!trace_path.empty()) io::write_text_file(trace_path, io::trace_to_csv(result.trace));
      emit_json(out, io::hmm_to_json(result.model), out_path);
    } else if (*predict) {
      const auto model = io::hmm_from_json(io::read_json_file(model_path));
      const auto obs = io::read_observations(obs_path, model.observation_labels());
      const auto next = predict_opponent_action(model, obs);
      const auto& symbols = model.observation_labels();
      if (!obs.empty()) {
        const auto posterior = type_posterior(model, obs);
        out << "type_posterior: " << labelled(posterior.probabilities, model.state_labels()) << "\n";
        out << "most_probable_type: " << posterior.argmax_type << "\n";
      }
      out << "next_action: " << labelled(next, symbols) << "\n";
      const auto best = argmax(next);
      out << "predicted: " << (symbols.empty() ? std::to_string(best) : symbols[best]) << "\n";
      if (!hmg_path.empty()) {
        const auto hmg = io::hmg_from_json(io::read_json_file(hmg_path));
        const Eigen::VectorXd belief =
            obs.empty() ? model.initial()
                        : Eigen::VectorXd(model.transitions().transpose() * filter(model, obs));
        const auto response = best_response(hmg, next, make_type_posterior(hmg.types(), belief));
        out << "best_response: " << hmg.own_strategies().label(response) << "\n";
      }
    } else if (*distance) {
      const auto a = io::hmm_from_json(io::read_json_file(a_path));
      const auto b = io::hmm_from_json(io::read_json_file(b_path));
      out << fixed(model_distance(a, b, length, seed)) << "\n";
    } else if (*scenario) {
      const auto config = load_scenario(scenario_path);
      spdlog::info("scenario '{}': {} seeds, horizon {}", config.name, config.seeds.size(),
                   config.horizon);
      const auto result = run_scenario(config, jobs);
      export_result(result, out_dir);
      spdlog::info("finished in {:.2f}s on {} thread(s)", result.elapsed_seconds, result.jobs);
      out << fmt::format("scenario: {}\n", result.name);
      for (const auto kind : result.ranking()) {
        const auto p = static_cast<std::size_t>(
            std::find(std::begin(kAllPolicies), std::end(kAllPolicies), kind) -
            std::begin(kAllPolicies));
        out << fmt::format("{:<10}{}\n", to_string(kind), fixed(result.mean_final_hit_rate[p]));
      }
      out << fmt::format("model_distance: {}\n", fixed(result.mean_model_distance));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kExitIo : kExitInput;
  }
  std::cout << out.str();
  return 0;
}
