#include "hmgame/hmg.hpp"

#include <cmath>
#include <utility>

namespace hmgame {

HiddenMarkovGame::HiddenMarkovGame(std::vector<std::string> types,
                                   std::vector<BimatrixGame<double>> type_games,
                                   Eigen::VectorXd prior)
    : types_(std::move(types)), games_(std::move(type_games)), prior_(std::move(prior)) {
  if (types_.empty()) throw Error(ErrorCode::InvalidArgument, "at least one type is required");
  StrategySet unique_types(types_);  // validates uniqueness
  if (games_.size() != types_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one game per type is required");
  }
  if (prior_.size() != static_cast<Eigen::Index>(types_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "prior must have one entry per type");
  }
  for (std::size_t t = 1; t < games_.size(); ++t) {
    if (games_[t].row_strategies() != games_[0].row_strategies() ||
        games_[t].col_strategies() != games_[0].col_strategies()) {
      throw Error(ErrorCode::InvalidArgument,
                  "game of type '" + types_[t] + "' uses different strategy sets");
    }
  }
  for (Eigen::Index i = 0; i < prior_.size(); ++i) {
    if (!(prior_(i) >= 0.0 && prior_(i) <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "prior entry outside [0, 1]");
    }
  }
  if (std::abs(prior_.sum() - 1.0) > kPriorTolerance) {
    throw Error(ErrorCode::InvalidArgument, "prior does not sum to 1");
  }
}

Eigen::MatrixXd build_emission_matrix(const HiddenMarkovGame& hmg) {
  const auto n = static_cast<Eigen::Index>(hmg.n_types());
  const auto k = static_cast<Eigen::Index>(hmg.observations().size());
  Eigen::MatrixXd emissions(n, k);
  for (Eigen::Index t = 0; t < n; ++t) {
    try {
      const auto profile = mixed_equilibrium_2x2(hmg.game(static_cast<std::size_t>(t)));
      emissions.row(t) = profile.col.probabilities().transpose();
    } catch (const Error& e) {
      throw Error(e.code(), "type '" + hmg.types()[static_cast<std::size_t>(t)] + "': " + e.what());
    }
  }
  return emissions;
}

HiddenMarkovModeld to_hmm(const HiddenMarkovGame& hmg, const Eigen::MatrixXd& transitions) {
  const auto n = static_cast<Eigen::Index>(hmg.n_types());
  if (transitions.rows() != n || transitions.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "transition table must be |types| x |types|");
  }
  return HiddenMarkovModeld(transitions, build_emission_matrix(hmg), hmg.prior(), hmg.types(),
                            hmg.observations().labels());
}

HiddenMarkovModeld to_hmm(const HiddenMarkovGame& hmg, UniformInit init) {
  return to_hmm(hmg, perturbed_uniform_transitions(hmg.n_types(), init.seed));
}

TrainingResult<double> infer_transitions(const HiddenMarkovGame& hmg,
                                         std::span<const std::size_t> obs,
                                         const TrainingConfig& config) {
  TrainingConfig clamped = config;
  clamped.clamp_emissions = true;
  clamped.clamp_initial = true;
  const auto initial = to_hmm(hmg, UniformInit{config.seed});
  check_symbols(initial, obs);
  return baum_welch(obs, hmg.n_types(), initial, clamped);
}

TypePosterior make_type_posterior(const std::vector<std::string>& labels,
                                  Eigen::VectorXd probabilities) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probabilities.size(); ++i) {
    if (probabilities(i) > probabilities(best)) best = i;
  }
  const auto index = static_cast<std::size_t>(best);
  std::string label =
      labels.empty() ? std::to_string(index) : labels.at(index);
  return {std::move(probabilities), index, std::move(label)};
}

TypePosterior type_posterior(const HiddenMarkovModeld& model, std::span<const std::size_t> obs) {
  return make_type_posterior(model.state_labels(), filter(model, obs));
}

Eigen::VectorXd predict_opponent_action(const HiddenMarkovModeld& model,
                                        std::span<const std::size_t> obs) {
  return predict_next_observation(model, obs);
}

std::size_t best_response(const HiddenMarkovGame& hmg, const Eigen::VectorXd& predicted,
                          const TypePosterior& believed_type) {
  const auto rows = static_cast<Eigen::Index>(hmg.own_strategies().size());
  const auto cols = static_cast<Eigen::Index>(hmg.observations().size());
  if (predicted.size() != cols ||
      believed_type.probabilities.size() != static_cast<Eigen::Index>(hmg.n_types())) {
    throw Error(ErrorCode::DimensionMismatch, "belief dimensions do not match the game");
  }
  Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t t = 0; t < hmg.n_types(); ++t) {
    mixed += believed_type.probabilities(static_cast<Eigen::Index>(t)) * hmg.game(t).row_payoffs();
  }
  const Eigen::VectorXd values = mixed * predicted;
  Eigen::Index best = 0;
  for (Eigen::Index r = 1; r < rows; ++r) {
    if (values(r) > values(best)) best = r;
  }
  return static_cast<std::size_t>(best);
}

MixedStrategy<double> equilibrium_response(const HiddenMarkovGame& hmg,
                                           const TypePosterior& believed_type) {
  return mixed_equilibrium_2x2(hmg.game(believed_type.argmax)).row;
}

}  // namespace hmgame
