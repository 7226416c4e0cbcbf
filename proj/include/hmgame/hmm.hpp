#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hmgame/error.hpp"
#include "hmgame/game.hpp"
#include "hmgame/random.hpp"

namespace hmgame {

using ObservationSequence = std::vector<std::size_t>;

/// Discrete HMM. transitions(i, j) = P(next = j | current = i),
/// emissions(j, h) = P(symbol h | state j), initial(i) = P(first = i).
template <typename Scalar = double>
class HiddenMarkovModel {
 public:
  static constexpr double kRowTolerance = 1e-9;

  HiddenMarkovModel(Matrix<Scalar> transitions, Matrix<Scalar> emissions, Vector<Scalar> initial,
                    std::vector<std::string> state_labels = {},
                    std::vector<std::string> observation_labels = {})
      : transitions_(std::move(transitions)),
        emissions_(std::move(emissions)),
        initial_(std::move(initial)),
        state_labels_(std::move(state_labels)),
        observation_labels_(std::move(observation_labels)) {
    const Eigen::Index n = transitions_.rows();
    if (n == 0 || transitions_.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "transition table must be square and non-empty");
    }
    if (emissions_.rows() != n || emissions_.cols() == 0) {
      throw Error(ErrorCode::DimensionMismatch, "emission table must have one row per state");
    }
    if (initial_.size() != n) {
      throw Error(ErrorCode::DimensionMismatch, "initial distribution must have one entry per state");
    }
    if (!state_labels_.empty() && static_cast<Eigen::Index>(state_labels_.size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "state label count does not match states");
    }
    if (!observation_labels_.empty() &&
        static_cast<Eigen::Index>(observation_labels_.size()) != emissions_.cols()) {
      throw Error(ErrorCode::DimensionMismatch, "observation label count does not match symbols");
    }
    check_stochastic(transitions_, "transition");
    check_stochastic(emissions_, "emission");
    check_stochastic(initial_.transpose(), "initial");
  }

  std::size_t n_states() const { return static_cast<std::size_t>(transitions_.rows()); }
  std::size_t n_observations() const { return static_cast<std::size_t>(emissions_.cols()); }
  const Matrix<Scalar>& transitions() const { return transitions_; }
  const Matrix<Scalar>& emissions() const { return emissions_; }
  const Vector<Scalar>& initial() const { return initial_; }
  const std::vector<std::string>& state_labels() const { return state_labels_; }
  const std::vector<std::string>& observation_labels() const { return observation_labels_; }

  HiddenMarkovModel with_transitions(Matrix<Scalar> transitions) const {
    return HiddenMarkovModel(std::move(transitions), emissions_, initial_, state_labels_,
                             observation_labels_);
  }

 private:
  template <typename Derived>
  static void check_stochastic(const Eigen::MatrixBase<Derived>& table, const char* what) {
    using std::abs;
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
      for (Eigen::Index c = 0; c < table.cols(); ++c) {
        const Scalar v = table(r, c);
        if (!(v >= Scalar(0) && v <= Scalar(1))) {
          throw Error(ErrorCode::InvalidArgument,
                      std::string(what) + " entry outside [0, 1] in row " + std::to_string(r));
        }
      }
      if (abs(table.row(r).sum() - Scalar(1)) > Scalar(kRowTolerance)) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string(what) + " row " + std::to_string(r) + " does not sum to 1");
      }
    }
  }

  Matrix<Scalar> transitions_;
  Matrix<Scalar> emissions_;
  Vector<Scalar> initial_;
  std::vector<std::string> state_labels_;
  std::vector<std::string> observation_labels_;
};

using HiddenMarkovModeld = HiddenMarkovModel<double>;

struct TrainingConfig {
  std::size_t max_iterations = 200;
  double log_likelihood_tolerance = 1e-6;
  bool clamp_emissions = false;
  bool clamp_initial = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
    if (!(log_likelihood_tolerance > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "log_likelihood_tolerance must be > 0");
    }
  }
};

template <typename Scalar>
struct TrainingResult {
  HiddenMarkovModel<Scalar> model;
  /// Log-likelihood of the data under each successive model; the last entry
  /// belongs to the returned model.
  std::vector<Scalar> trace;
};

struct SampledSequence {
  ObservationSequence observations;
  std::vector<std::size_t> states;
};

template <typename Scalar>
void check_symbols(const HiddenMarkovModel<Scalar>& model, std::span<const std::size_t> obs) {
  for (std::size_t t = 0; t < obs.size(); ++t) {
    if (obs[t] >= model.n_observations()) {
      throw Error(ErrorCode::SymbolOutOfRange, "symbol " + std::to_string(obs[t]) +
                                                   " at position " + std::to_string(t) +
                                                   " is out of range");
    }
  }
}

template <typename Scalar>
SampledSequence sample(const HiddenMarkovModel<Scalar>& model, std::size_t length,
                       std::uint64_t seed) {
  Rng rng(seed);
  SampledSequence out;
  out.observations.reserve(length);
  out.states.reserve(length);
  if (length == 0) return out;
  std::size_t state = rng.categorical(model.initial());
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) state = rng.categorical(model.transitions().row(static_cast<Eigen::Index>(state)));
    out.states.push_back(state);
    out.observations.push_back(
        rng.categorical(model.emissions().row(static_cast<Eigen::Index>(state))));
  }
  return out;
}

/// One normalized forward step: prior-to-observation state distribution
/// `predicted` is reweighted by the emission column of `symbol`. Returns the
/// normalizer (zero when the symbol is impossible; `posterior` is then left
/// unnormalized).
template <typename Scalar>
Scalar forward_step(const HiddenMarkovModel<Scalar>& model, const Vector<Scalar>& predicted,
                    std::size_t symbol, Vector<Scalar>& posterior) {
  posterior = predicted.cwiseProduct(model.emissions().col(static_cast<Eigen::Index>(symbol)));
  const Scalar scale = posterior.sum();
  if (scale > Scalar(0)) posterior /= scale;
  return scale;
}

/// Scaled forward pass. Row t of `alpha` is P(state_t | obs_0..t).
template <typename Scalar>
struct ForwardPass {
  Matrix<Scalar> alpha;
  Vector<Scalar> scale;
  Scalar log_likelihood;
  bool zero_probability;
};

template <typename Scalar>
ForwardPass<Scalar> forward(const HiddenMarkovModel<Scalar>& model,
                            std::span<const std::size_t> obs) {
  check_symbols(model, obs);
  const auto n = static_cast<Eigen::Index>(model.n_states());
  const auto T = static_cast<Eigen::Index>(obs.size());
  ForwardPass<Scalar> pass{Matrix<Scalar>(T, n), Vector<Scalar>(T), Scalar(0), false};
  Vector<Scalar> predicted = model.initial();
  Vector<Scalar> posterior(n);
  using std::log;
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t > 0) predicted = model.transitions().transpose() * posterior;
    const Scalar c = forward_step(model, predicted, obs[static_cast<std::size_t>(t)], posterior);
    pass.scale(t) = c;
    if (c <= Scalar(0)) {
      pass.zero_probability = true;
      pass.log_likelihood = -std::numeric_limits<Scalar>::infinity();
      pass.alpha.conservativeResize(t, n);
      pass.scale.conservativeResize(t + 1);
      return pass;
    }
    pass.alpha.row(t) = posterior.transpose();
    pass.log_likelihood += log(c);
  }
  return pass;
}

/// log P(obs | model); -infinity when the sequence has probability zero.
template <typename Scalar>
Scalar log_likelihood(const HiddenMarkovModel<Scalar>& model, std::span<const std::size_t> obs) {
  if (obs.empty()) throw Error(ErrorCode::InvalidArgument, "observation sequence is empty");
  return forward(model, obs).log_likelihood;
}

/// Posterior over hidden states at the last time step.
template <typename Scalar>
Vector<Scalar> filter(const HiddenMarkovModel<Scalar>& model, std::span<const std::size_t> obs) {
  if (obs.empty()) throw Error(ErrorCode::InvalidArgument, "observation sequence is empty");
  const auto pass = forward(model, obs);
  if (pass.zero_probability) {
    throw Error(ErrorCode::ZeroProbabilityObservation,
                "observation sequence has probability zero at position " +
                    std::to_string(pass.alpha.rows()));
  }
  return pass.alpha.row(pass.alpha.rows() - 1).transpose();
}

/// Distribution of the next symbol given a filtered state posterior.
template <typename Scalar>
Vector<Scalar> predict_from_posterior(const HiddenMarkovModel<Scalar>& model,
                                      const Vector<Scalar>& posterior) {
  return model.emissions().transpose() * (model.transitions().transpose() * posterior);
}

/// P(O_{m+1} | O_1..m). With no observations, the distribution of the first
/// symbol (initial distribution pushed through the emissions).
template <typename Scalar>
Vector<Scalar> predict_next_observation(const HiddenMarkovModel<Scalar>& model,
                                        std::span<const std::size_t> obs) {
  if (obs.empty()) return model.emissions().transpose() * model.initial();
  return predict_from_posterior(model, filter(model, obs));
}

/// Seeded near-uniform stochastic matrix: 1/n + U(-magnitude, magnitude),
/// rows renormalized.
template <typename Scalar = double>
Matrix<Scalar> perturbed_uniform_transitions(std::size_t n, std::uint64_t seed,
                                             double magnitude = 0.05) {
  Rng rng(seed);
  const auto size = static_cast<Eigen::Index>(n);
  Matrix<Scalar> a(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      a(i, j) = Scalar(1.0 / static_cast<double>(n) + magnitude * (2.0 * rng.uniform() - 1.0));
    }
    a.row(i) /= a.row(i).sum();
  }
  return a;
}

namespace detail {

template <typename Scalar>
struct ExpectedCounts {
  Matrix<Scalar> transitions;   // sum_t xi_t(i, j)
  Vector<Scalar> from_state;    // sum_{t < T-1} gamma_t(i)
  Matrix<Scalar> emissions;     // sum_t gamma_t(j) [o_t = h]
  Vector<Scalar> occupancy;     // sum_t gamma_t(j)
  Vector<Scalar> first;         // gamma_0
  Scalar log_likelihood;
};

template <typename Scalar>
ExpectedCounts<Scalar> expected_counts(const HiddenMarkovModel<Scalar>& model,
                                       std::span<const std::size_t> obs) {
  const auto pass = forward(model, obs);
  if (pass.zero_probability) {
    throw Error(ErrorCode::ZeroProbabilityObservation,
                "training data has probability zero under the current model at position " +
                    std::to_string(pass.alpha.rows()));
  }
  const auto n = static_cast<Eigen::Index>(model.n_states());
  const auto k = static_cast<Eigen::Index>(model.n_observations());
  const auto T = static_cast<Eigen::Index>(obs.size());
  const auto& A = model.transitions();
  const auto& B = model.emissions();

  ExpectedCounts<Scalar> counts{Matrix<Scalar>::Zero(n, n), Vector<Scalar>::Zero(n),
                                Matrix<Scalar>::Zero(n, k), Vector<Scalar>::Zero(n),
                                Vector<Scalar>::Zero(n), pass.log_likelihood};

  // Backward variables scaled by the forward normalizers so that
  // alpha_t .* beta_t is the smoothed posterior gamma_t.
  Vector<Scalar> beta = Vector<Scalar>::Ones(n);
  Matrix<Scalar> outer = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const Vector<Scalar> alpha = pass.alpha.row(t).transpose();
    const Vector<Scalar> gamma = alpha.cwiseProduct(beta);
    const auto symbol = static_cast<Eigen::Index>(obs[static_cast<std::size_t>(t)]);
    counts.emissions.col(symbol) += gamma;
    counts.occupancy += gamma;
    if (t == 0) counts.first = gamma;
    if (t > 0) {
      const Vector<Scalar> weighted = B.col(symbol).cwiseProduct(beta) / pass.scale(t);
      const Vector<Scalar> prev = pass.alpha.row(t - 1).transpose();
      outer.noalias() += prev * weighted.transpose();
      beta = A * weighted;
      counts.from_state += prev.cwiseProduct(beta);
    }
  }
  counts.transitions = A.cwiseProduct(outer);
  return counts;
}

template <typename Scalar>
void normalize_rows(Matrix<Scalar>& table) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) table.row(r) /= table.row(r).sum();
}

}  // namespace detail

/// Baum-Welch (EM) re-estimation with scaled forward-backward. With
/// clamp_emissions the emission table is never touched; with clamp_initial
/// the initial distribution is kept.
template <typename Scalar>
TrainingResult<Scalar> baum_welch(std::span<const std::size_t> obs, std::size_t n_states,
                                  const HiddenMarkovModel<Scalar>& initial_model,
                                  const TrainingConfig& config) {
  config.validate();
  if (initial_model.n_states() != n_states) {
    throw Error(ErrorCode::InvalidInitialModel,
                "initial model has " + std::to_string(initial_model.n_states()) +
                    " states, expected " + std::to_string(n_states));
  }
  if (obs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "training needs at least two observations");
  }
  check_symbols(initial_model, obs);

  HiddenMarkovModel<Scalar> model = initial_model;
  std::vector<Scalar> trace;
  for (std::size_t iteration = 0;; ++iteration) {
    auto counts = detail::expected_counts(model, obs);
    trace.push_back(counts.log_likelihood);
    if (trace.size() > 1 &&
        trace.back() - trace[trace.size() - 2] < Scalar(config.log_likelihood_tolerance)) {
      break;
    }
    if (iteration == config.max_iterations) break;

    Matrix<Scalar> A = model.transitions();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      // States with no expected departures keep their previous row.
      if (counts.from_state(i) > Scalar(0) && counts.transitions.row(i).sum() > Scalar(0)) {
        A.row(i) = counts.transitions.row(i) / counts.transitions.row(i).sum();
      }
    }
    Matrix<Scalar> B = model.emissions();
    if (!config.clamp_emissions) {
      for (Eigen::Index j = 0; j < B.rows(); ++j) {
        if (counts.occupancy(j) > Scalar(0)) B.row(j) = counts.emissions.row(j) / counts.occupancy(j);
      }
      detail::normalize_rows(B);
    }
    Vector<Scalar> pi = model.initial();
    if (!config.clamp_initial) pi = counts.first / counts.first.sum();

    model = HiddenMarkovModel<Scalar>(std::move(A), std::move(B), std::move(pi),
                                      model.state_labels(), model.observation_labels());
  }
  return {std::move(model), std::move(trace)};
}

/// Symmetrized cross-likelihood dissimilarity between two HMMs. Both
/// reference sequences are drawn with the same seed, which makes the value
/// exactly symmetric in its arguments. Finite-length estimates may come out
/// slightly negative; they are returned unclipped.
template <typename Scalar>
Scalar model_distance(const HiddenMarkovModel<Scalar>& a, const HiddenMarkovModel<Scalar>& b,
                      std::size_t sequence_length, std::uint64_t seed) {
  if (a.n_observations() != b.n_observations()) {
    throw Error(ErrorCode::DimensionMismatch, "models must share the observation alphabet");
  }
  if (sequence_length == 0) {
    throw Error(ErrorCode::InvalidArgument, "sequence_length must be positive");
  }
  const auto T = static_cast<Scalar>(sequence_length);
  auto deficit = [&](const HiddenMarkovModel<Scalar>& scored, const HiddenMarkovModel<Scalar>& source) {
    const auto reference = sample(source, sequence_length, seed).observations;
    const Scalar cross = forward(scored, reference).log_likelihood;
    const Scalar self = forward(source, reference).log_likelihood;
    if (!std::isfinite(static_cast<double>(cross))) {
      throw Error(ErrorCode::ZeroProbabilityObservation,
                  "a sequence sampled from one model is impossible under the other");
    }
    return (cross - self) / T;
  };
  const Scalar ab = deficit(a, b);
  const Scalar ba = deficit(b, a);
  return Scalar(0) - (ab + ba) / Scalar(2);
}

}  // namespace hmgame
