#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hmgame/hmg.hpp"
#include "hmgame/hmm.hpp"
#include "hmgame/random.hpp"

namespace hmgame {

enum class PolicyKind { Proposed, Bayesian, Random, MoreFrequently, TitForTat };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Proposed, PolicyKind::Bayesian,
                                              PolicyKind::Random, PolicyKind::MoreFrequently,
                                              PolicyKind::TitForTat};

/// CLI-facing names: proposed, bayesian, random, frequent, tft.
std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

struct RoundRecord {
  std::size_t round_index = 0;
  std::size_t opponent_action = 0;
  std::size_t own_action = 0;
  std::size_t predicted_action = 0;
};

enum class ResponseMode {
  BestResponse,    // one-move rule: best reply to the predicted action distribution
  EquilibriumMix,  // repeated-game rule: sample the row equilibrium mix of the likeliest type
};

/// One decision rule and everything it has learned from the rounds so far.
///
/// The model-based kinds (proposed, bayesian) keep the filtered type
/// posterior incrementally; the bayesian kind does so with the trained
/// transitions replaced by the identity, i.e. emission evidence only.
class PolicyState {
 public:
  PolicyState(PolicyKind kind, std::size_t n_actions, std::uint64_t seed);

  PolicyKind kind() const { return kind_; }
  bool needs_model() const;
  const std::vector<RoundRecord>& history() const { return history_; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  /// Installs (or replaces) the trained model; the belief is recomputed from
  /// the full history under the new model.
  void attach_model(std::shared_ptr<const HiddenMarkovModeld> trained);
  const HiddenMarkovModeld* model() const { return model_.get(); }

  /// Filtered type posterior; empty before the first observation or for
  /// model-free kinds.
  const std::optional<Eigen::VectorXd>& posterior() const { return posterior_; }

  /// Predicted distribution over the opponent's next action (model kinds).
  Eigen::VectorXd predicted_distribution() const;

  /// Predicted opponent action. Advances the internal generator for the
  /// random kind (every call) and for tit-for-tat (first round only).
  std::size_t predict();

  /// Own action for the coming round given the prediction just made.
  std::size_t respond(const HiddenMarkovGame& hmg, std::size_t predicted,
                      ResponseMode mode = ResponseMode::BestResponse);

  void update(const RoundRecord& record);

 private:
  void absorb(std::size_t opponent_action);

  PolicyKind kind_;
  std::size_t n_actions_;
  Rng rng_;
  std::vector<RoundRecord> history_;
  std::vector<std::size_t> counts_;
  std::shared_ptr<const HiddenMarkovModeld> model_;
  std::optional<Eigen::VectorXd> posterior_;
};

/// Fraction of rounds whose prediction matched the opponent's action.
double hit_rate(std::span<const RoundRecord> records);

}  // namespace hmgame
