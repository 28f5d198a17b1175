#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "kmrate/km_core.hpp"
#include "kmrate/schedule.hpp"

// Declarative construction of schedules and operators, so experiments can be
// assembled from text without recompiling.
//
// Schedules (JSON):
//   {"kind": "const", "alpha": 0.5, "length": 100}
//   {"kind": "two_block", "m": 500, "u": 0.6}        (u optional: eta-optimal)
//   {"kind": "uniform_random", "length": 50, "seed": 7, "stream": 0}
//   {"kind": "explicit", "alphas": [0.3, 0.5]}
// Schedule sources (command line):
//   const:A[:LEN]  two-block:M[,U]  uniform-random[:LEN]  file:PATH  json:{...}
// Operators (JSON):
//   {"kind": "identity", "dim": 3}
//   {"kind": "negation", "dim": 2, "radius": 1}
//   {"kind": "rotation", "angle": 1.5707963267948966}
//   {"kind": "box_projection", "lo": [0, 0], "hi": [1, 1]}
//   {"kind": "linear", "matrix": [[0, -1], [1, 0]]}
//   {"kind": "shift_l1"}
// Any operator may carry "x0" (dense array, or {"index": value} object for
// shift_l1) and "dist0".
namespace kmrate::experiment {

using json = nlohmann::json;

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

StepSchedule schedule_from_json(const json& j);

/// `min_length` sizes generators without an explicit length; `seed` feeds
/// uniform-random.
StepSchedule parse_schedule_source(std::string_view source, std::size_t min_length, std::uint64_t seed);

struct DenseExperiment {
  km::EuclideanSpace space;
  km::Operator<km::EuclideanSpace> op;
  km::DenseVector x0;
  std::optional<double> dist0;  // distance from x0 to Fix(T), if known
};

struct SequenceExperiment {
  km::L1SequenceSpace space;
  km::Operator<km::L1SequenceSpace> op;
  km::SparseSequence x0;
  std::optional<double> dist0;
};

using OperatorExperiment = std::variant<DenseExperiment, SequenceExperiment>;

OperatorExperiment operator_from_json(const json& j);

}  // namespace kmrate::experiment
