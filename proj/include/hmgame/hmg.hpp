#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmgame/game.hpp"
#include "hmgame/hmm.hpp"

namespace hmgame {

/// Two-player hidden Markov game. The informed player is the column player
/// and switches among `types`; each type has its own payoff bimatrix. The
/// uninformed (row) player observes the informed player's actions, so the
/// observation alphabet is the column strategy set.
class HiddenMarkovGame {
 public:
  static constexpr double kPriorTolerance = 1e-12;

  HiddenMarkovGame(std::vector<std::string> types, std::vector<BimatrixGame<double>> type_games,
                   Eigen::VectorXd prior);

  std::size_t n_types() const { return types_.size(); }
  const std::vector<std::string>& types() const { return types_; }
  const BimatrixGame<double>& game(std::size_t type) const { return games_.at(type); }
  const std::vector<BimatrixGame<double>>& games() const { return games_; }
  const Eigen::VectorXd& prior() const { return prior_; }
  const StrategySet& observations() const { return games_.front().col_strategies(); }
  const StrategySet& own_strategies() const { return games_.front().row_strategies(); }

 private:
  std::vector<std::string> types_;
  std::vector<BimatrixGame<double>> games_;
  Eigen::VectorXd prior_;
};

struct TypePosterior {
  Eigen::VectorXd probabilities;
  std::size_t argmax;
  std::string argmax_type;
};

/// Tag requesting a seeded near-uniform transition table.
struct UniformInit {
  std::uint64_t seed = 0;
};

/// Row t is the informed player's equilibrium mix in type t's game.
Eigen::MatrixXd build_emission_matrix(const HiddenMarkovGame& hmg);

HiddenMarkovModeld to_hmm(const HiddenMarkovGame& hmg, const Eigen::MatrixXd& transitions);
HiddenMarkovModeld to_hmm(const HiddenMarkovGame& hmg, UniformInit init);

/// Clamped-emission Baum-Welch starting from to_hmm(hmg, UniformInit{config.seed}).
/// Emissions and the prior are held fixed; only transitions are learned.
TrainingResult<double> infer_transitions(const HiddenMarkovGame& hmg,
                                         std::span<const std::size_t> obs,
                                         const TrainingConfig& config);

/// Labels may be empty, in which case the argmax index is used as label.
TypePosterior make_type_posterior(const std::vector<std::string>& labels,
                                  Eigen::VectorXd probabilities);
TypePosterior type_posterior(const HiddenMarkovModeld& model, std::span<const std::size_t> obs);

Eigen::VectorXd predict_opponent_action(const HiddenMarkovModeld& model,
                                        std::span<const std::size_t> obs);

/// Row maximizing the uninformed player's payoff against `predicted`, with
/// payoff tables mixed by the type belief. Ties go to the lowest index.
std::size_t best_response(const HiddenMarkovGame& hmg, const Eigen::VectorXd& predicted,
                          const TypePosterior& believed_type);

/// Repeated-game response: the row player's equilibrium mix in the game of
/// the most probable type.
MixedStrategy<double> equilibrium_response(const HiddenMarkovGame& hmg,
                                           const TypePosterior& believed_type);

}  // namespace hmgame
