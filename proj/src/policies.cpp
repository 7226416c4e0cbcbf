#include "hmgame/policies.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace hmgame {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Proposed: return "proposed";
    case PolicyKind::Bayesian: return "bayesian";
    case PolicyKind::Random: return "random";
    case PolicyKind::MoreFrequently: return "frequent";
    case PolicyKind::TitForTat: return "tft";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (const PolicyKind kind : kAllPolicies) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

std::size_t argmax_lowest(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return static_cast<std::size_t>(best);
}

}  // namespace

PolicyState::PolicyState(PolicyKind kind, std::size_t n_actions, std::uint64_t seed)
    : kind_(kind), n_actions_(n_actions), rng_(seed), counts_(n_actions, 0) {
  if (n_actions == 0) throw Error(ErrorCode::InvalidArgument, "policy needs at least one action");
}

bool PolicyState::needs_model() const {
  return kind_ == PolicyKind::Proposed || kind_ == PolicyKind::Bayesian;
}

void PolicyState::attach_model(std::shared_ptr<const HiddenMarkovModeld> trained) {
  if (!trained) throw Error(ErrorCode::MissingModel, "null model");
  if (trained->n_observations() != n_actions_) {
    throw Error(ErrorCode::DimensionMismatch, "model alphabet does not match the action count");
  }
  if (kind_ == PolicyKind::Bayesian) {
    const auto n = static_cast<Eigen::Index>(trained->n_states());
    model_ = std::make_shared<const HiddenMarkovModeld>(
        trained->with_transitions(Eigen::MatrixXd::Identity(n, n)));
  } else {
    model_ = std::move(trained);
  }
  posterior_.reset();
  if (!needs_model()) return;
  for (const auto& record : history_) absorb(record.opponent_action);
}

Eigen::VectorXd PolicyState::predicted_distribution() const {
  if (!model_) {
    throw Error(ErrorCode::MissingModel,
                std::string("policy '") + std::string(to_string(kind_)) + "' needs a trained model");
  }
  if (!posterior_) return model_->emissions().transpose() * model_->initial();
  return predict_from_posterior(*model_, *posterior_);
}

std::size_t PolicyState::predict() {
  switch (kind_) {
    case PolicyKind::Random:
      return rng_.uniform_index(n_actions_);
    case PolicyKind::TitForTat:
      if (history_.empty()) return rng_.uniform_index(n_actions_);
      return history_.back().opponent_action;
    case PolicyKind::MoreFrequently:
      return static_cast<std::size_t>(std::max_element(counts_.begin(), counts_.end()) -
                                      counts_.begin());
    case PolicyKind::Proposed:
    case PolicyKind::Bayesian:
      return argmax_lowest(predicted_distribution());
  }
  return 0;
}

std::size_t PolicyState::respond(const HiddenMarkovGame& hmg, std::size_t predicted,
                                 ResponseMode mode) {
  if (model_ && needs_model()) {
    const Eigen::VectorXd belief =
        posterior_ ? Eigen::VectorXd(model_->transitions().transpose() * *posterior_)
                   : model_->initial();
    const auto believed = make_type_posterior(model_->state_labels(), belief);
    if (mode == ResponseMode::EquilibriumMix) {
      return rng_.categorical(equilibrium_response(hmg, believed).probabilities());
    }
    return best_response(hmg, predicted_distribution(), believed);
  }
  Eigen::VectorXd point = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_actions_));
  point(static_cast<Eigen::Index>(predicted)) = 1.0;
  return best_response(hmg, point, make_type_posterior(hmg.types(), hmg.prior()));
}

void PolicyState::absorb(std::size_t opponent_action) {
  const Eigen::VectorXd predicted =
      posterior_ ? Eigen::VectorXd(model_->transitions().transpose() * *posterior_)
                 : model_->initial();
  Eigen::VectorXd next;
  const double scale = forward_step(*model_, predicted, opponent_action, next);
  if (scale <= 0.0) {
    throw Error(ErrorCode::ZeroProbabilityObservation,
                "opponent action " + std::to_string(opponent_action) +
                    " has probability zero under the trained model");
  }
  posterior_ = std::move(next);
}

void PolicyState::update(const RoundRecord& record) {
  if (record.opponent_action >= n_actions_) {
    throw Error(ErrorCode::SymbolOutOfRange, "opponent action out of range");
  }
  history_.push_back(record);
  ++counts_[record.opponent_action];
  if (needs_model() && model_) absorb(record.opponent_action);
}

double hit_rate(std::span<const RoundRecord> records) {
  if (records.empty()) throw Error(ErrorCode::EmptyHistory, "no rounds to score");
  const auto hits = std::count_if(records.begin(), records.end(), [](const RoundRecord& r) {
    return r.predicted_action == r.opponent_action;
  });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

}  // namespace hmgame
