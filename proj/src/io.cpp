#include "hmgame/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace hmgame::io {

namespace {

template <typename F>
auto schema_guard(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

std::vector<std::string> strings_from(const json& j, const char* key) {
  return j.at(key).get<std::vector<std::string>>();
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json vector_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw Error(ErrorCode::Parse, "ragged matrix: row " + std::to_string(r));
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

json game_to_json(const BimatrixGame<double>& game) {
  json payoffs = json::array();
  for (Eigen::Index r = 0; r < game.n_rows(); ++r) {
    for (Eigen::Index c = 0; c < game.n_cols(); ++c) {
      payoffs.push_back({game.row_payoffs()(r, c), game.col_payoffs()(r, c)});
    }
  }
  return {{"row_strategies", game.row_strategies().labels()},
          {"col_strategies", game.col_strategies().labels()},
          {"payoffs", std::move(payoffs)}};
}

BimatrixGame<double> game_from_json(const json& j) {
  return schema_guard("game", [&] {
    StrategySet rows(strings_from(j, "row_strategies"));
    StrategySet cols(strings_from(j, "col_strategies"));
    const auto& cells = j.at("payoffs");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(cols.size());
    if (!cells.is_array() || cells.size() != rows.size() * cols.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "game: expected " + std::to_string(rows.size() * cols.size()) + " payoff cells");
    }
    Eigen::MatrixXd row_payoffs(n, m), col_payoffs(n, m);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) {
        const auto& cell = cells.at(static_cast<std::size_t>(r * m + c));
        if (!cell.is_array() || cell.size() != 2) {
          throw Error(ErrorCode::Parse, "game: payoff cell " + std::to_string(r * m + c) +
                                            " must be a [row, col] pair");
        }
        row_payoffs(r, c) = cell.at(0).get<double>();
        col_payoffs(r, c) = cell.at(1).get<double>();
      }
    }
    return BimatrixGame<double>(std::move(rows), std::move(cols), std::move(row_payoffs),
                                std::move(col_payoffs));
  });
}

json hmm_to_json(const HiddenMarkovModeld& model) {
  json j = {{"transitions", matrix_to_json(model.transitions())},
            {"emissions", matrix_to_json(model.emissions())},
            {"initial", vector_to_json(model.initial())}};
  if (!model.state_labels().empty()) j["state_labels"] = model.state_labels();
  if (!model.observation_labels().empty()) j["observation_labels"] = model.observation_labels();
  return j;
}

HiddenMarkovModeld hmm_from_json(const json& j) {
  return schema_guard("hmm", [&] {
    std::vector<std::string> states, observations;
    if (j.contains("state_labels")) states = strings_from(j, "state_labels");
    if (j.contains("observation_labels")) observations = strings_from(j, "observation_labels");
    return HiddenMarkovModeld(matrix_from_json(j.at("transitions")),
                              matrix_from_json(j.at("emissions")), vector_from_json(j.at("initial")),
                              std::move(states), std::move(observations));
  });
}

json hmg_to_json(const HiddenMarkovGame& hmg) {
  json games = json::object();
  for (std::size_t t = 0; t < hmg.n_types(); ++t) games[hmg.types()[t]] = game_to_json(hmg.game(t));
  return {{"types", hmg.types()},
          {"games", std::move(games)},
          {"prior", vector_to_json(hmg.prior())},
          {"observations", hmg.observations().labels()}};
}

HiddenMarkovGame hmg_from_json(const json& j) {
  return schema_guard("hmg", [&] {
    auto types = strings_from(j, "types");
    std::vector<BimatrixGame<double>> games;
    for (const auto& type : types) {
      if (!j.at("games").contains(type)) {
        throw Error(ErrorCode::Parse, "hmg: no game for type '" + type + "'");
      }
      games.push_back(game_from_json(j.at("games").at(type)));
    }
    Eigen::VectorXd prior;
    if (j.contains("prior")) {
      prior = vector_from_json(j.at("prior"));
    } else {
      prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(types.size()),
                                        1.0 / static_cast<double>(types.size()));
    }
    HiddenMarkovGame hmg(std::move(types), std::move(games), std::move(prior));
    if (j.contains("observations") &&
        strings_from(j, "observations") != hmg.observations().labels()) {
      throw Error(ErrorCode::Parse, "hmg: observations must equal the column strategies");
    }
    return hmg;
  });
}

json training_to_json(const TrainingConfig& config) {
  return {{"max_iterations", config.max_iterations},
          {"log_likelihood_tolerance", config.log_likelihood_tolerance},
          {"clamp_emissions", config.clamp_emissions},
          {"clamp_initial", config.clamp_initial},
          {"seed", config.seed}};
}

TrainingConfig training_from_json(const json& j) {
  return schema_guard("training", [&] {
    TrainingConfig config;
    config.max_iterations = j.value("max_iterations", config.max_iterations);
    config.log_likelihood_tolerance =
        j.value("log_likelihood_tolerance", config.log_likelihood_tolerance);
    config.clamp_emissions = j.value("clamp_emissions", config.clamp_emissions);
    config.clamp_initial = j.value("clamp_initial", config.clamp_initial);
    config.seed = j.value("seed", config.seed);
    config.validate();
    return config;
  });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

ObservationSequence read_observations(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  ObservationSequence obs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream tokens(line);
    std::string token;
    while (tokens >> token) {
      const auto it = std::find(labels.begin(), labels.end(), token);
      if (it != labels.end()) {
        obs.push_back(static_cast<std::size_t>(it - labels.begin()));
        continue;
      }
      std::size_t consumed = 0;
      unsigned long value = 0;
      try {
        value = std::stoul(token, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != token.size() || token.front() == '-') {
        throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) +
                                          ": unrecognized symbol '" + token + "'");
      }
      obs.push_back(value);
    }
  }
  return obs;
}

std::string format_exact(double value) { return fmt::format("{}", value); }

std::string trace_to_csv(std::span<const double> trace) {
  std::string out = "iteration,log_likelihood\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out += fmt::format("{},{}\n", i, format_exact(trace[i]));
  }
  return out;
}

}  // namespace hmgame::io
