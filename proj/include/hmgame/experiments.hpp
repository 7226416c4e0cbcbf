#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hmgame/hmg.hpp"
#include "hmgame/hmm.hpp"
#include "hmgame/policies.hpp"

namespace hmgame {

enum class TrainingSchedule {
  FullSequence,          // train once on the whole stream, then replay
  RetrainAtCheckpoints,  // retrain on the observed prefix at every checkpoint
};

enum class HitRateMode { Cumulative, Windowed };

struct ScenarioConfig {
  std::string name;
  HiddenMarkovGame hmg;
  Eigen::MatrixXd true_transitions;
  std::size_t horizon = 10000;
  std::size_t eval_interval = 200;
  std::vector<std::uint64_t> seeds;
  TrainingConfig training;
  TrainingSchedule schedule = TrainingSchedule::FullSequence;
  HitRateMode hit_rate_mode = HitRateMode::Cumulative;

  void validate() const;
};

struct SeedRun {
  std::uint64_t seed = 0;
  /// One hit rate per checkpoint, per policy (indexed like kAllPolicies).
  std::vector<std::vector<double>> series;
  std::vector<double> final_hit_rate;
  HiddenMarkovModeld trained;
  std::vector<double> trace;
  double model_distance = 0.0;
};

struct ScenarioResult {
  std::string name;
  std::size_t horizon = 0;
  std::size_t eval_interval = 0;
  HiddenMarkovModeld generator;
  std::vector<SeedRun> runs;  // in config seed order
  std::vector<double> mean_final_hit_rate;  // indexed like kAllPolicies
  double mean_model_distance = 0.0;
  double elapsed_seconds = 0.0;  // not exported
  unsigned jobs = 1;

  std::size_t checkpoints() const { return horizon / eval_interval; }
  const HiddenMarkovModeld& trained_model() const { return runs.front().trained; }
  /// Policies sorted by mean final hit rate, best first (stable on ties).
  std::vector<PolicyKind> ranking() const;
};

/// Per seed: sample the stream from the ground-truth HMM, learn transitions
/// with clamped emissions, replay the stream scoring every policy, and
/// measure the distance between generator and learned model. Seeds may run
/// on up to `jobs` threads; results do not depend on `jobs`.
ScenarioResult run_scenario(const ScenarioConfig& config, unsigned jobs = 1);

/// Writes hit_rates.csv, summary.json, trained_model.json and hit_rates.svg.
void export_result(const ScenarioResult& result, const std::filesystem::path& directory);

std::string hit_rates_csv(const ScenarioResult& result);
nlohmann::json summary_json(const ScenarioResult& result);
std::string hit_rate_chart_svg(const ScenarioResult& result);

/// Tennis server/receiver game with aggressive, moderate and defensive
/// server types and a uniform prior.
HiddenMarkovGame tennis_hmg();

/// Reconstructed ground truth: the true matrices are not published, these
/// only reproduce the "sticky aggressive" / "sticky defensive" shape.
Eigen::MatrixXd aggressive_transitions();
Eigen::MatrixXd defensive_transitions();

/// Scenario file. "hmg" is an inline HMG object or a path resolved against
/// `base_dir`; "schedule" is "full" or "checkpoint"; "hit_rate_mode" is
/// "cumulative" or "windowed".
ScenarioConfig scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json scenario_to_json(const ScenarioConfig& config);
ScenarioConfig load_scenario(const std::filesystem::path& path);

std::vector<std::uint64_t> default_seeds();
ScenarioConfig aggressive_scenario();
ScenarioConfig defensive_scenario();

}  // namespace hmgame
