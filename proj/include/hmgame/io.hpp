#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hmgame/game.hpp"
#include "hmgame/hmg.hpp"
#include "hmgame/hmm.hpp"

namespace hmgame::io {

using json = nlohmann::json;

// Game file: {"row_strategies": [...], "col_strategies": [...],
//             "payoffs": [[row, col], ...]}   (row-major cells)
json game_to_json(const BimatrixGame<double>& game);
BimatrixGame<double> game_from_json(const json& j);

// HMM file: {"transitions": [[...]], "emissions": [[...]], "initial": [...],
//            "state_labels"?: [...], "observation_labels"?: [...]}
json hmm_to_json(const HiddenMarkovModeld& model);
HiddenMarkovModeld hmm_from_json(const json& j);

// HMG file: {"types": [...], "games": {type: game}, "prior": [...],
//            "observations": [...]}
json hmg_to_json(const HiddenMarkovGame& hmg);
HiddenMarkovGame hmg_from_json(const json& j);

json training_to_json(const TrainingConfig& config);
TrainingConfig training_from_json(const json& j);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

/// Parses a JSON file. Syntax errors become ErrorCode::Parse with the
/// line/column reported by the parser; unreadable files become ErrorCode::Io.
json read_json_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Whitespace/comma separated symbols; each token is an index or, when
/// labels are given, a label.
ObservationSequence read_observations(const std::filesystem::path& path,
                                      const std::vector<std::string>& labels);

std::string trace_to_csv(std::span<const double> trace);

/// Shortest round-trip decimal representation of a double.
std::string format_exact(double value);

}  // namespace hmgame::io
