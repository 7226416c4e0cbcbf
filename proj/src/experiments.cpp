#include "hmgame/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <memory>
#include <numeric>
#include <optional>
#include <thread>
#include <utility>

#include <fmt/format.h>

#include "hmgame/io.hpp"

namespace hmgame {

namespace {

constexpr std::size_t kPolicyCount = std::size(kAllPolicies);

enum SeedStream : std::uint64_t { kSampling = 1, kTrainingInit = 2, kDistance = 3, kPolicyBase = 16 };

std::shared_ptr<const HiddenMarkovModeld> train_on(const ScenarioConfig& config,
                                                   std::span<const std::size_t> prefix,
                                                   std::uint64_t init_seed) {
  TrainingConfig training = config.training;
  training.seed = init_seed;
  return std::make_shared<const HiddenMarkovModeld>(
      infer_transitions(config.hmg, prefix, training).model);
}

SeedRun run_seed(const ScenarioConfig& config, const HiddenMarkovModeld& generator,
                 std::uint64_t seed) {
  SeedRun run{seed, {}, {}, generator, {}, 0.0};
  const auto stream = sample(generator, config.horizon, mix_seed(seed, kSampling)).observations;
  const std::uint64_t init_seed = mix_seed(mix_seed(seed, kTrainingInit), config.training.seed);
  const std::size_t n_actions = config.hmg.observations().size();

  std::vector<PolicyState> policies;
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    policies.emplace_back(kAllPolicies[p], n_actions, mix_seed(seed, kPolicyBase + p));
  }

  std::shared_ptr<const HiddenMarkovModeld> model;
  if (config.schedule == TrainingSchedule::FullSequence) {
    TrainingConfig training = config.training;
    training.seed = init_seed;
    auto trained = infer_transitions(config.hmg, stream, training);
    run.trace = std::move(trained.trace);
    model = std::make_shared<const HiddenMarkovModeld>(std::move(trained.model));
  } else {
    model = std::make_shared<const HiddenMarkovModeld>(to_hmm(config.hmg, UniformInit{init_seed}));
  }
  for (auto& policy : policies) {
    if (policy.needs_model()) policy.attach_model(model);
  }

  std::vector<std::vector<RoundRecord>> records(kPolicyCount);
  std::vector<std::size_t> hits(kPolicyCount, 0);
  std::vector<std::size_t> window_hits(kPolicyCount, 0);
  run.series.assign(kPolicyCount, {});
  for (auto& r : records) r.reserve(config.horizon);

  for (std::size_t t = 0; t < config.horizon; ++t) {
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      auto& policy = policies[p];
      RoundRecord record;
      try {
        record.round_index = t;
        record.opponent_action = stream[t];
        record.predicted_action = policy.predict();
        record.own_action = policy.respond(config.hmg, record.predicted_action);
        policy.update(record);
      } catch (const Error& e) {
        throw Error(e.code(), fmt::format("seed {} round {}: {}", seed, t, e.what()));
      }
      if (record.predicted_action == record.opponent_action) {
        ++hits[p];
        ++window_hits[p];
      }
      records[p].push_back(record);
    }

    if ((t + 1) % config.eval_interval == 0) {
      for (std::size_t p = 0; p < kPolicyCount; ++p) {
        const double rate =
            config.hit_rate_mode == HitRateMode::Cumulative
                ? static_cast<double>(hits[p]) / static_cast<double>(t + 1)
                : static_cast<double>(window_hits[p]) / static_cast<double>(config.eval_interval);
        run.series[p].push_back(rate);
        window_hits[p] = 0;
      }
      if (config.schedule == TrainingSchedule::RetrainAtCheckpoints) {
        TrainingConfig training = config.training;
        training.seed = init_seed;
        auto trained = infer_transitions(config.hmg, std::span(stream).first(t + 1), training);
        run.trace = std::move(trained.trace);
        model = std::make_shared<const HiddenMarkovModeld>(std::move(trained.model));
        for (auto& policy : policies) {
          if (policy.needs_model()) policy.attach_model(model);
        }
      }
    }
  }
  if (config.schedule == TrainingSchedule::RetrainAtCheckpoints &&
      config.horizon % config.eval_interval != 0) {
    model = train_on(config, stream, init_seed);
  }

  for (std::size_t p = 0; p < kPolicyCount; ++p) run.final_hit_rate.push_back(hit_rate(records[p]));
  run.trained = *model;
  run.model_distance =
      model_distance(generator, run.trained, config.horizon, mix_seed(seed, kDistance));
  return run;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (horizon == 0) throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  if (eval_interval == 0 || eval_interval > horizon) {
    throw Error(ErrorCode::InvalidArgument, "eval_interval must be in [1, horizon]");
  }
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "at least one seed is required");
  if (horizon < 2) throw Error(ErrorCode::InvalidArgument, "horizon must be at least 2");
  training.validate();
  // Throws on a non-stochastic or mis-sized table.
  to_hmm(hmg, true_transitions);
}

std::vector<PolicyKind> ScenarioResult::ranking() const {
  std::vector<std::size_t> order(kPolicyCount);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mean_final_hit_rate[a] > mean_final_hit_rate[b];
  });
  std::vector<PolicyKind> kinds;
  for (const auto i : order) kinds.push_back(kAllPolicies[i]);
  return kinds;
}

ScenarioResult run_scenario(const ScenarioConfig& config, unsigned jobs) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const HiddenMarkovModeld generator = to_hmm(config.hmg, config.true_transitions);

  std::vector<std::optional<SeedRun>> slots(config.seeds.size());
  std::vector<std::exception_ptr> failures(config.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < config.seeds.size(); i = next++) {
      try {
        slots[i] = run_seed(config, generator, config.seeds[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(config.seeds.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  ScenarioResult result{config.name, config.horizon, config.eval_interval, generator, {}, {}, 0.0,
                        0.0, threads};
  for (auto& slot : slots) result.runs.push_back(std::move(*slot));
  const auto n_runs = static_cast<double>(result.runs.size());
  result.mean_final_hit_rate.assign(kPolicyCount, 0.0);
  for (const auto& run : result.runs) {
    for (std::size_t p = 0; p < kPolicyCount; ++p) result.mean_final_hit_rate[p] += run.final_hit_rate[p];
    result.mean_model_distance += run.model_distance;
  }
  for (auto& v : result.mean_final_hit_rate) v /= n_runs;
  result.mean_model_distance /= n_runs;
  result.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string hit_rates_csv(const ScenarioResult& result) {
  std::string out = "checkpoint,seed,policy,hit_rate\n";
  for (const auto& run : result.runs) {
    for (std::size_t p = 0; p < kPolicyCount; ++p) {
      for (std::size_t c = 0; c < run.series[p].size(); ++c) {
        out += fmt::format("{},{},{},{}\n", (c + 1) * result.eval_interval, run.seed,
                           to_string(kAllPolicies[p]), io::format_exact(run.series[p][c]));
      }
    }
  }
  return out;
}

nlohmann::json summary_json(const ScenarioResult& result) {
  nlohmann::json means = nlohmann::json::object();
  nlohmann::json by_seed = nlohmann::json::object();
  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    const std::string name(to_string(kAllPolicies[p]));
    means[name] = result.mean_final_hit_rate[p];
    nlohmann::json per = nlohmann::json::array();
    for (const auto& run : result.runs) per.push_back(run.final_hit_rate[p]);
    by_seed[name] = std::move(per);
  }
  nlohmann::json seeds = nlohmann::json::array();
  nlohmann::json distances = nlohmann::json::array();
  for (const auto& run : result.runs) {
    seeds.push_back(run.seed);
    distances.push_back(run.model_distance);
  }
  nlohmann::json ranking = nlohmann::json::array();
  for (const auto kind : result.ranking()) ranking.push_back(std::string(to_string(kind)));
  return {{"name", result.name},
          {"horizon", result.horizon},
          {"eval_interval", result.eval_interval},
          {"seeds", std::move(seeds)},
          {"mean_final_hit_rate", std::move(means)},
          {"final_hit_rate_by_seed", std::move(by_seed)},
          {"model_distance", result.mean_model_distance},
          {"model_distance_by_seed", std::move(distances)},
          {"ranking", std::move(ranking)}};
}

std::string hit_rate_chart_svg(const ScenarioResult& result) {
  constexpr double kWidth = 720, kHeight = 420, kLeft = 60, kRight = 140, kTop = 30, kBottom = 50;
  constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#7f7f7f", "#2ca02c", "#9467bd"};
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t checkpoints = result.checkpoints();
  auto x_of = [&](std::size_t c) {
    return kLeft + (checkpoints <= 1 ? 0.0 : plot_w * static_cast<double>(c) /
                                                 static_cast<double>(checkpoints - 1));
  };
  auto y_of = [&](double rate) { return kTop + plot_h * (1.0 - rate); };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{3}: mean hit rate "
      "over {4} seed(s)</text>\n",
      kWidth, kHeight, kLeft, result.name, result.runs.size());
  svg += fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n",
      kLeft, kTop, kTop + plot_h, kLeft + plot_w);
  for (int tick = 0; tick <= 4; ++tick) {
    const double rate = tick * 0.25;
    svg += fmt::format(
        "<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" "
        "text-anchor=\"end\">{:.2f}</text>\n",
        kLeft - 6, y_of(rate) + 3, rate);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" "
      "text-anchor=\"middle\">rounds (checkpoint every {})</text>\n",
      kLeft + plot_w / 2, kHeight - 15, result.eval_interval);

  for (std::size_t p = 0; p < kPolicyCount; ++p) {
    std::string points;
    for (std::size_t c = 0; c < checkpoints; ++c) {
      double mean = 0.0;
      for (const auto& run : result.runs) mean += run.series[p][c];
      mean /= static_cast<double>(result.runs.size());
      points += fmt::format("{}{:.2f},{:.2f}", c == 0 ? "" : " ", x_of(c), y_of(mean));
    }
    svg += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", kColors[p],
        points);
    const double legend_y = kTop + 16.0 * static_cast<double>(p);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n"
        "<text x=\"{4}\" y=\"{5}\" font-family=\"sans-serif\" font-size=\"11\">{6} "
        "({7:.3f})</text>\n",
        kLeft + plot_w + 10, legend_y, kLeft + plot_w + 30, kColors[p], kLeft + plot_w + 35,
        legend_y + 4, to_string(kAllPolicies[p]), result.mean_final_hit_rate[p]);
  }
  svg += "</svg>\n";
  return svg;
}

void export_result(const ScenarioResult& result, const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw Error(ErrorCode::Io, "cannot create '" + directory.string() + "': " + ec.message());
  }
  io::write_text_file(directory / "hit_rates.csv", hit_rates_csv(result));
  io::write_text_file(directory / "summary.json", summary_json(result).dump(2) + "\n");
  io::write_text_file(directory / "trained_model.json",
                      io::hmm_to_json(result.trained_model()).dump(2) + "\n");
  io::write_text_file(directory / "hit_rates.svg", hit_rate_chart_svg(result));
}

HiddenMarkovGame tennis_hmg() {
  const StrategySet receiver({"Open", "Center"});
  const StrategySet server({"Open", "Center"});
  auto game = [&](double oo_r, double oo_c, double oc_r, double oc_c, double co_r, double co_c,
                  double cc_r, double cc_c) {
    Eigen::MatrixXd row(2, 2), col(2, 2);
    row << oo_r, oc_r, co_r, cc_r;
    col << oo_c, oc_c, co_c, cc_c;
    return BimatrixGame<double>(receiver, server, row, col);
  };
  std::vector<BimatrixGame<double>> games;
  games.push_back(game(0.65, 0.35, 0.89, 0.11, 0.98, 0.02, 0.15, 0.85));  // aggressive
  games.push_back(game(0.15, 0.85, 0.80, 0.20, 0.90, 0.10, 0.15, 0.85));  // moderate
  games.push_back(game(0.10, 0.90, 0.55, 0.45, 0.85, 0.15, 0.05, 0.95));  // defensive
  return HiddenMarkovGame({"Aggressive", "Moderate", "Defensive"}, std::move(games),
                          Eigen::Vector3d::Constant(1.0 / 3.0));
}

Eigen::MatrixXd aggressive_transitions() {
  Eigen::MatrixXd a(3, 3);
  a << 0.80, 0.15, 0.05,
       0.20, 0.60, 0.20,
       0.10, 0.30, 0.60;
  return a;
}

Eigen::MatrixXd defensive_transitions() {
  Eigen::MatrixXd a(3, 3);
  a << 0.60, 0.30, 0.10,
       0.20, 0.60, 0.20,
       0.05, 0.15, 0.80;
  return a;
}

ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  try {
    const auto& hmg_node = j.at("hmg");
    HiddenMarkovGame hmg = hmg_node.is_string()
                               ? io::hmg_from_json(io::read_json_file(
                                     base_dir / hmg_node.get<std::string>()))
                               : io::hmg_from_json(hmg_node);
    ScenarioConfig config{j.value("name", std::string("scenario")), std::move(hmg),
                          io::matrix_from_json(j.at("true_transitions"))};
    config.horizon = j.value("horizon", config.horizon);
    config.eval_interval = j.value("eval_interval", config.eval_interval);
    config.seeds = j.contains("seeds") ? j.at("seeds").get<std::vector<std::uint64_t>>()
                                       : default_seeds();
    if (j.contains("training")) config.training = io::training_from_json(j.at("training"));
    config.training.clamp_emissions = true;
    const auto schedule = j.value("schedule", std::string("full"));
    if (schedule == "full") {
      config.schedule = TrainingSchedule::FullSequence;
    } else if (schedule == "checkpoint") {
      config.schedule = TrainingSchedule::RetrainAtCheckpoints;
    } else {
      throw Error(ErrorCode::Parse, "scenario: unknown schedule '" + schedule + "'");
    }
    const auto mode = j.value("hit_rate_mode", std::string("cumulative"));
    if (mode == "cumulative") {
      config.hit_rate_mode = HitRateMode::Cumulative;
    } else if (mode == "windowed") {
      config.hit_rate_mode = HitRateMode::Windowed;
    } else {
      throw Error(ErrorCode::Parse, "scenario: unknown hit_rate_mode '" + mode + "'");
    }
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("scenario: ") + e.what());
  }
}

nlohmann::json scenario_to_json(const ScenarioConfig& config) {
  return {{"name", config.name},
          {"hmg", io::hmg_to_json(config.hmg)},
          {"true_transitions", io::matrix_to_json(config.true_transitions)},
          {"horizon", config.horizon},
          {"eval_interval", config.eval_interval},
          {"seeds", config.seeds},
          {"training", io::training_to_json(config.training)},
          {"schedule", config.schedule == TrainingSchedule::FullSequence ? "full" : "checkpoint"},
          {"hit_rate_mode", config.hit_rate_mode == HitRateMode::Cumulative ? "cumulative" : "windowed"}};
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(io::read_json_file(path), path.parent_path());
}

std::vector<std::uint64_t> default_seeds() {
  return {11, 23, 37, 41, 53, 67, 79, 83, 97, 101};
}

ScenarioConfig aggressive_scenario() {
  ScenarioConfig config{"aggressive", tennis_hmg(), aggressive_transitions()};
  config.seeds = default_seeds();
  config.training.clamp_emissions = true;
  return config;
}

ScenarioConfig defensive_scenario() {
  ScenarioConfig config{"defensive", tennis_hmg(), defensive_transitions()};
  config.seeds = default_seeds();
  config.training.clamp_emissions = true;
  return config;
}

}  // namespace hmgame
