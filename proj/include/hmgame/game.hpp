#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hmgame/error.hpp"

namespace hmgame {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Ordered, uniquely labelled strategies of one player.
class StrategySet {
 public:
  StrategySet() = default;

  explicit StrategySet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
      throw Error(ErrorCode::InvalidArgument, "strategy set must not be empty");
    }
    std::set<std::string> seen;
    for (const auto& label : labels_) {
      if (!seen.insert(label).second) {
        throw Error(ErrorCode::InvalidArgument, "duplicate strategy label '" + label + "'");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> index_of(std::string_view label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels_.begin());
  }

  bool operator==(const StrategySet&) const = default;

 private:
  std::vector<std::string> labels_;
};

enum class Player { Row, Col };

/// Two-player normal-form game. Entry (r, c) of row_payoffs / col_payoffs is
/// what the row / column player receives when row plays r and column plays c.
template <typename Scalar = double>
class BimatrixGame {
 public:
  BimatrixGame(StrategySet rows, StrategySet cols, Matrix<Scalar> row_payoffs,
               Matrix<Scalar> col_payoffs)
      : rows_(std::move(rows)),
        cols_(std::move(cols)),
        row_payoffs_(std::move(row_payoffs)),
        col_payoffs_(std::move(col_payoffs)) {
    const auto r = static_cast<Eigen::Index>(rows_.size());
    const auto c = static_cast<Eigen::Index>(cols_.size());
    if (row_payoffs_.rows() != r || row_payoffs_.cols() != c || col_payoffs_.rows() != r ||
        col_payoffs_.cols() != c) {
      throw Error(ErrorCode::DimensionMismatch, "payoff tables must be |rows| x |cols|");
    }
    if (!row_payoffs_.allFinite() || !col_payoffs_.allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "payoffs must be finite");
    }
  }

  const StrategySet& row_strategies() const { return rows_; }
  const StrategySet& col_strategies() const { return cols_; }
  const Matrix<Scalar>& row_payoffs() const { return row_payoffs_; }
  const Matrix<Scalar>& col_payoffs() const { return col_payoffs_; }
  Eigen::Index n_rows() const { return row_payoffs_.rows(); }
  Eigen::Index n_cols() const { return row_payoffs_.cols(); }

  const Matrix<Scalar>& payoffs(Player player) const {
    return player == Player::Row ? row_payoffs_ : col_payoffs_;
  }

 private:
  StrategySet rows_;
  StrategySet cols_;
  Matrix<Scalar> row_payoffs_;
  Matrix<Scalar> col_payoffs_;
};

template <typename Scalar = double>
class MixedStrategy {
 public:
  static constexpr double kSumTolerance = 1e-12;

  MixedStrategy(Player owner, Vector<Scalar> probabilities)
      : owner_(owner), probabilities_(std::move(probabilities)) {
    if (probabilities_.size() == 0) {
      throw Error(ErrorCode::InvalidArgument, "mixed strategy must not be empty");
    }
    for (Eigen::Index i = 0; i < probabilities_.size(); ++i) {
      const Scalar p = probabilities_(i);
      if (!(p >= Scalar(0) && p <= Scalar(1))) {
        throw Error(ErrorCode::InvalidArgument, "mixed strategy entry outside [0, 1]");
      }
    }
    using std::abs;
    if (abs(probabilities_.sum() - Scalar(1)) > Scalar(kSumTolerance)) {
      throw Error(ErrorCode::InvalidArgument, "mixed strategy does not sum to 1");
    }
  }

  static MixedStrategy pure(Player owner, Eigen::Index size, Eigen::Index index) {
    Vector<Scalar> p = Vector<Scalar>::Zero(size);
    p(index) = Scalar(1);
    return MixedStrategy(owner, std::move(p));
  }

  Player owner() const { return owner_; }
  const Vector<Scalar>& probabilities() const { return probabilities_; }
  Scalar operator[](Eigen::Index i) const { return probabilities_(i); }
  Eigen::Index size() const { return probabilities_.size(); }

 private:
  Player owner_;
  Vector<Scalar> probabilities_;
};

enum class EquilibriumKind { Pure, Mixed };

template <typename Scalar = double>
struct EquilibriumProfile {
  MixedStrategy<Scalar> row;
  MixedStrategy<Scalar> col;
  Scalar row_value;
  Scalar col_value;
  EquilibriumKind kind;
};

struct Cell {
  std::size_t row;
  std::size_t col;
  bool operator==(const Cell&) const = default;
};

/// Pure Nash equilibria in row-major order. Weak equilibria (ties) count.
template <typename Scalar>
std::vector<Cell> pure_nash_equilibria(const BimatrixGame<Scalar>& game) {
  const auto& R = game.row_payoffs();
  const auto& C = game.col_payoffs();
  std::vector<Cell> cells;
  for (Eigen::Index r = 0; r < game.n_rows(); ++r) {
    for (Eigen::Index c = 0; c < game.n_cols(); ++c) {
      const bool row_best = R(r, c) >= R.col(c).maxCoeff();
      const bool col_best = C(r, c) >= C.row(r).maxCoeff();
      if (row_best && col_best) {
        cells.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
      }
    }
  }
  return cells;
}

/// (row value, col value) of a mixed profile: p' R q and p' C q.
template <typename Scalar>
std::pair<Scalar, Scalar> expected_payoffs(const BimatrixGame<Scalar>& game,
                                           const MixedStrategy<Scalar>& row,
                                           const MixedStrategy<Scalar>& col) {
  if (row.size() != game.n_rows() || col.size() != game.n_cols()) {
    throw Error(ErrorCode::DimensionMismatch, "strategy dimensions do not match the game");
  }
  const auto& p = row.probabilities();
  const auto& q = col.probabilities();
  return {p.dot(game.row_payoffs() * q), p.dot(game.col_payoffs() * q)};
}

/// Equilibrium of a 2x2 game. The completely mixed equilibrium is preferred
/// when it exists; otherwise the first pure equilibrium is returned.
template <typename Scalar>
EquilibriumProfile<Scalar> mixed_equilibrium_2x2(const BimatrixGame<Scalar>& game) {
  if (game.n_rows() != 2 || game.n_cols() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "mixed_equilibrium_2x2 needs a 2x2 game");
  }
  const auto& R = game.row_payoffs();
  const auto& C = game.col_payoffs();

  // q = P(col 0) equalizing the row player's two rows; p = P(row 0)
  // equalizing the column player's two columns.
  const Scalar q_den = R(0, 0) - R(0, 1) - R(1, 0) + R(1, 1);
  const Scalar p_den = C(0, 0) - C(1, 0) - C(0, 1) + C(1, 1);
  if (q_den != Scalar(0) && p_den != Scalar(0)) {
    const Scalar q = (R(1, 1) - R(0, 1)) / q_den;
    const Scalar p = (C(1, 1) - C(1, 0)) / p_den;
    if (p > Scalar(0) && p < Scalar(1) && q > Scalar(0) && q < Scalar(1)) {
      Vector<Scalar> pv(2);
      pv << p, Scalar(1) - p;
      Vector<Scalar> qv(2);
      qv << q, Scalar(1) - q;
      MixedStrategy<Scalar> row(Player::Row, std::move(pv));
      MixedStrategy<Scalar> col(Player::Col, std::move(qv));
      const auto [rv, cv] = expected_payoffs(game, row, col);
      return {std::move(row), std::move(col), rv, cv, EquilibriumKind::Mixed};
    }
  }

  const auto pure = pure_nash_equilibria(game);
  if (pure.empty()) {
    throw Error(ErrorCode::DegenerateGame,
                "indifference system is singular and no pure equilibrium exists");
  }
  const Cell cell = pure.front();
  auto row = MixedStrategy<Scalar>::pure(Player::Row, 2, static_cast<Eigen::Index>(cell.row));
  auto col = MixedStrategy<Scalar>::pure(Player::Col, 2, static_cast<Eigen::Index>(cell.col));
  const auto r = static_cast<Eigen::Index>(cell.row);
  const auto c = static_cast<Eigen::Index>(cell.col);
  return {std::move(row), std::move(col), R(r, c), C(r, c), EquilibriumKind::Pure};
}

}  // namespace hmgame
