#include <doctest.h>

#include <random>
#include <vector>

#include "hmgame/game.hpp"
#include "oracles.hpp"

using namespace hmgame;

namespace {

BimatrixGame<double> make_2x2(std::vector<std::pair<double, double>> cells,
                              std::vector<std::string> labels = {"s1", "s2"}) {
  Eigen::MatrixXd R(2, 2), C(2, 2);
  for (int i = 0; i < 4; ++i) {
    R(i / 2, i % 2) = cells[static_cast<std::size_t>(i)].first;
    C(i / 2, i % 2) = cells[static_cast<std::size_t>(i)].second;
  }
  return BimatrixGame<double>(StrategySet(labels), StrategySet(labels), R, C);
}

BimatrixGame<double> normal_form_example() { return make_2x2({{3, 3}, {2, 5}, {5, 2}, {1, 1}}); }

BimatrixGame<double> tennis(int profile) {
  switch (profile) {
    case 0: return make_2x2({{0.65, 0.35}, {0.89, 0.11}, {0.98, 0.02}, {0.15, 0.85}});
    case 1: return make_2x2({{0.15, 0.85}, {0.80, 0.20}, {0.90, 0.10}, {0.15, 0.85}});
    default: return make_2x2({{0.10, 0.90}, {0.55, 0.45}, {0.85, 0.15}, {0.05, 0.95}});
  }
}

oracle::Table table_of(const Eigen::MatrixXd& m) {
  oracle::Table t(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) t[static_cast<std::size_t>(r)].push_back(m(r, c));
  return t;
}

// Exhaustive unilateral-deviation check for a pure profile.
bool survives_deviation(const BimatrixGame<double>& g, Eigen::Index r, Eigen::Index c) {
  for (Eigen::Index r2 = 0; r2 < g.n_rows(); ++r2)
    if (g.row_payoffs()(r2, c) > g.row_payoffs()(r, c)) return false;
  for (Eigen::Index c2 = 0; c2 < g.n_cols(); ++c2)
    if (g.col_payoffs()(r, c2) > g.col_payoffs()(r, c)) return false;
  return true;
}

BimatrixGame<double> random_game(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols,
                                 bool integer_payoffs) {
  std::uniform_real_distribution<double> real(-5.0, 5.0);
  std::uniform_int_distribution<int> small(-2, 2);
  Eigen::MatrixXd R(rows, cols), C(rows, cols);
  for (Eigen::Index i = 0; i < R.size(); ++i) {
    R(i) = integer_payoffs ? small(rng) : real(rng);
    C(i) = integer_payoffs ? small(rng) : real(rng);
  }
  std::vector<std::string> rl, cl;
  for (Eigen::Index i = 0; i < rows; ++i) rl.push_back("r" + std::to_string(i));
  for (Eigen::Index i = 0; i < cols; ++i) cl.push_back("c" + std::to_string(i));
  return BimatrixGame<double>(StrategySet(rl), StrategySet(cl), R, C);
}

}  // namespace

TEST_CASE("strategy sets reject duplicates and map labels both ways") {
  CHECK_THROWS_AS(StrategySet({"Open", "Open"}), Error);
  CHECK_THROWS_AS(StrategySet(std::vector<std::string>{}), Error);
  const StrategySet s({"Open", "Center", "Wide"});
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.index_of(s.label(i)) == i);
  CHECK_FALSE(s.index_of("Lob").has_value());
}

TEST_CASE("bimatrix game validates shape and finiteness") {
  const StrategySet two({"a", "b"});
  CHECK_THROWS_AS(BimatrixGame<double>(two, two, Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 2)),
                  Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(BimatrixGame<double>(two, two, bad, Eigen::MatrixXd::Zero(2, 2)), Error);
}

TEST_CASE("pure equilibria of the reference games") {
  CHECK(pure_nash_equilibria(normal_form_example()) == std::vector<Cell>{{0, 1}, {1, 0}});
  // Strictly dominant strategies for both players.
  CHECK(pure_nash_equilibria(make_2x2({{2, 2}, {1, 0}, {0, 1}, {0, 0}})) == std::vector<Cell>{{0, 0}});
  // With only (0,0) rewarded, the all-zero cell (1,1) is a weak equilibrium too.
  CHECK(pure_nash_equilibria(make_2x2({{1, 1}, {0, 0}, {0, 0}, {0, 0}})) ==
        std::vector<Cell>{{0, 0}, {1, 1}});
  CHECK(pure_nash_equilibria(make_2x2({{1, -1}, {-1, 1}, {-1, 1}, {1, -1}})).empty());
  // All-zero game: every cell is a weak equilibrium.
  CHECK(pure_nash_equilibria(make_2x2({{0, 0}, {0, 0}, {0, 0}, {0, 0}})).size() == 4);
}

TEST_CASE("pure equilibria match the exhaustive deviation check on random games") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto g = random_game(rng, 2 + trial % 3, 2 + (trial / 3) % 3, trial % 2 == 0);
    const auto found = pure_nash_equilibria(g);
    std::vector<Cell> expected;
    for (Eigen::Index r = 0; r < g.n_rows(); ++r)
      for (Eigen::Index c = 0; c < g.n_cols(); ++c)
        if (survives_deviation(g, r, c))
          expected.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    CHECK(found == expected);
  }
}

TEST_CASE("mixed equilibrium of the normal-form example is p = q = 1/3") {
  const auto eq = mixed_equilibrium_2x2(normal_form_example());
  CHECK(eq.kind == EquilibriumKind::Mixed);
  CHECK(std::abs(eq.row[0] - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(eq.row[1] - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(eq.col[0] - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(eq.col[1] - 2.0 / 3.0) < 1e-12);
  // Both players earn 7/3 at the interior equilibrium.
  CHECK(eq.row_value == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(eq.col_value == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("tennis equilibria agree with the grid-refinement oracle") {
  // Frozen from oracle::column_indifference / row_indifference at step 1e-6.
  const double server_open[] = {0.691589, 0.464286, 0.400000};
  const double receiver_open[] = {0.775701, 0.535714, 0.640000};
  for (int profile = 0; profile < 3; ++profile) {
    CAPTURE(profile);
    const auto g = tennis(profile);
    const double q_oracle = oracle::column_indifference(table_of(g.row_payoffs()));
    const double p_oracle = oracle::row_indifference(table_of(g.col_payoffs()));
    CHECK(std::abs(q_oracle - server_open[profile]) < 1e-9);
    CHECK(std::abs(p_oracle - receiver_open[profile]) < 1e-9);

    const auto eq = mixed_equilibrium_2x2(g);
    CHECK(eq.kind == EquilibriumKind::Mixed);
    CHECK(std::abs(eq.col[0] - q_oracle) < 1e-5);
    CHECK(std::abs(eq.row[0] - p_oracle) < 1e-5);
  }
}

TEST_CASE("expected payoffs") {
  const auto g = normal_form_example();
  const auto p = MixedStrategy<double>::pure(Player::Row, 2, 0);
  const auto q = MixedStrategy<double>::pure(Player::Col, 2, 1);
  const auto [rv, cv] = expected_payoffs(g, p, q);
  CHECK(rv == 2.0);
  CHECK(cv == 5.0);

  const auto eq = mixed_equilibrium_2x2(g);
  const auto [ev_row, ev_col] = expected_payoffs(g, eq.row, eq.col);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const auto dev_row = MixedStrategy<double>::pure(Player::Row, 2, k);
    const auto dev_col = MixedStrategy<double>::pure(Player::Col, 2, k);
    CHECK(expected_payoffs(g, dev_row, eq.col).first == doctest::Approx(ev_row).epsilon(1e-12));
    CHECK(expected_payoffs(g, eq.row, dev_col).second == doctest::Approx(ev_col).epsilon(1e-12));
  }

  const MixedStrategy<double> three(Player::Row, Eigen::Vector3d(0.2, 0.3, 0.5));
  CHECK_THROWS_AS(expected_payoffs(g, three, q), Error);
}

TEST_CASE("mixed strategies validate their distribution") {
  CHECK_THROWS_AS(MixedStrategy<double>(Player::Row, Eigen::Vector2d(0.6, 0.6)), Error);
  CHECK_THROWS_AS(MixedStrategy<double>(Player::Row, Eigen::Vector2d(-0.1, 1.1)), Error);
}

TEST_CASE("2x2 solver output is deviation-proof, indifferent, and shift-invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  int mixed_seen = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = random_game(rng, 2, 2, trial % 4 == 0);
    const auto eq = mixed_equilibrium_2x2(g);
    const auto [rv, cv] = expected_payoffs(g, eq.row, eq.col);
    CHECK(std::abs(rv - eq.row_value) < 1e-12);
    CHECK(std::abs(cv - eq.col_value) < 1e-12);
    double row_dev[2], col_dev[2];
    for (Eigen::Index k = 0; k < 2; ++k) {
      row_dev[k] = expected_payoffs(g, MixedStrategy<double>::pure(Player::Row, 2, k), eq.col).first;
      col_dev[k] = expected_payoffs(g, eq.row, MixedStrategy<double>::pure(Player::Col, 2, k)).second;
      CHECK(row_dev[k] <= rv + 1e-9);
      CHECK(col_dev[k] <= cv + 1e-9);
    }
    if (eq.kind == EquilibriumKind::Mixed) {
      ++mixed_seen;
      CHECK(std::abs(row_dev[0] - row_dev[1]) < 1e-9);
      CHECK(std::abs(col_dev[0] - col_dev[1]) < 1e-9);
    }

    const bool exact = trial % 4 == 0;
    const double a = exact ? std::round(shift(rng)) : shift(rng);
    const double b = exact ? std::round(shift(rng)) : shift(rng);
    const BimatrixGame<double> shifted(g.row_strategies(), g.col_strategies(),
                                       g.row_payoffs().array() + a, g.col_payoffs().array() + b);
    const auto eq2 = mixed_equilibrium_2x2(shifted);
    CHECK(eq2.kind == eq.kind);
    CHECK((eq2.row.probabilities() - eq.row.probabilities()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((eq2.col.probabilities() - eq.col.probabilities()).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(mixed_seen > 50);
}

TEST_CASE("2x2 solver falls back to a pure equilibrium and rejects other shapes") {
  const auto eq = mixed_equilibrium_2x2(make_2x2({{2, 2}, {1, 0}, {0, 1}, {0, 0}}));
  CHECK(eq.kind == EquilibriumKind::Pure);
  CHECK(eq.row[0] == 1.0);
  CHECK(eq.col[0] == 1.0);

  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(mixed_equilibrium_2x2(random_game(rng, 3, 2, false)), Error);
}
