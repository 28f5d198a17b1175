#include "kmrate/experiment.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kmrate/bounds.hpp"

namespace kmrate::experiment {

namespace {

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw SpecError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(std::string("field \"") + key + "\": " + e.what());
  }
}

double parse_number(std::string_view text) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const double v = std::stod(s, &used);
    if (used != s.size()) throw SpecError("malformed number: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw SpecError("malformed number: " + std::string(text));
  }
}

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) throw SpecError("malformed integer: " + std::string(text));
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

StepSchedule make_schedule(std::vector<double> alphas) {
  try {
    return StepSchedule(std::move(alphas));
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
}

StepSchedule schedule_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open schedule file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw SpecError("schedule file " + path + ": " + e.what());
    }
    if (j.is_array()) return make_schedule(j.get<std::vector<double>>());
    return schedule_from_json(j);
  }
  // Plain text: numbers separated by whitespace or commas; '#' starts a comment.
  std::vector<double> alphas;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    line = line.substr(0, line.find('#'));
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) alphas.push_back(parse_number(field));
  }
  return make_schedule(std::move(alphas));
}

}  // namespace

StepSchedule schedule_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("schedule description must be a JSON object");
  const auto kind = required<std::string>(j, "kind");
  try {
    if (kind == "const") {
      return StepSchedule::constant(required<double>(j, "alpha"), required<std::size_t>(j, "length"));
    }
    if (kind == "two_block") {
      const auto m = required<std::size_t>(j, "m");
      const double u = j.contains("u") ? required<double>(j, "u") : km::sharpness_optimal_u();
      return StepSchedule::two_block(m, u);
    }
    if (kind == "uniform_random") {
      const RngStream rng{j.value("seed", std::uint64_t{0}), j.value("stream", std::uint64_t{0})};
      return StepSchedule::uniform_random(required<std::size_t>(j, "length"), rng);
    }
    if (kind == "explicit") {
      return StepSchedule(required<std::vector<double>>(j, "alphas"));
    }
  } catch (const SpecError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  throw SpecError("unknown schedule kind: " + kind);
}

StepSchedule parse_schedule_source(std::string_view source, std::size_t min_length, std::uint64_t seed) {
  const auto colon = source.find(':');
  const std::string_view head = source.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : source.substr(colon + 1);

  if (head == "const") {
    const auto parts = split(rest, ':');
    if (rest.empty() || parts.size() > 2) throw SpecError("expected const:ALPHA[:LENGTH]");
    const double alpha = parse_number(parts[0]);
    const std::size_t length = parts.size() == 2 ? parse_count(parts[1]) : min_length;
    return make_schedule(std::vector<double>(length, alpha));
  }
  if (head == "two-block") {
    const auto parts = split(rest, ',');
    if (rest.empty() || parts.size() > 2) throw SpecError("expected two-block:M[,U]");
    const std::size_t m = parse_count(parts[0]);
    const double u = parts.size() == 2 ? parse_number(parts[1]) : km::sharpness_optimal_u();
    try {
      return StepSchedule::two_block(m, u);
    } catch (const std::invalid_argument& e) {
      throw SpecError(e.what());
    }
  }
  if (head == "uniform-random") {
    const std::size_t length = rest.empty() ? min_length : parse_count(rest);
    return StepSchedule::uniform_random(length, RngStream{seed, 0});
  }
  if (head == "file") {
    if (rest.empty()) throw SpecError("expected file:PATH");
    return schedule_from_file(std::string(rest));
  }
  if (head == "json") {
    try {
      return schedule_from_json(json::parse(rest));
    } catch (const json::exception& e) {
      throw SpecError(std::string("inline schedule: ") + e.what());
    }
  }
  throw SpecError("unknown schedule source: " + std::string(source));
}

namespace {

km::DenseVector unit_vector(std::size_t dim, double length) {
  km::DenseVector x(dim, 0.0);
  x[0] = length;
  return x;
}

DenseExperiment dense_experiment(const json& j, km::Operator<km::EuclideanSpace> op, std::size_t dim,
                                 km::DenseVector default_x0) {
  DenseExperiment e;
  e.space.dim = dim;
  e.op = std::move(op);
  e.x0 = j.contains("x0") ? required<km::DenseVector>(j, "x0") : std::move(default_x0);
  if (e.x0.size() != dim) throw SpecError("x0 has the wrong dimension");
  if (j.contains("dist0")) {
    e.dist0 = required<double>(j, "dist0");
  } else if (e.op.declared_fixed_point) {
    e.dist0 = km::distance(e.space, e.x0, *e.op.declared_fixed_point);
  }
  return e;
}

}  // namespace

OperatorExperiment operator_from_json(const json& j) {
  if (!j.is_object()) throw SpecError("operator description must be a JSON object");
  const auto kind = required<std::string>(j, "kind");
  try {
    if (kind == "identity") {
      const auto dim = j.value("dim", std::size_t{2});
      auto e = dense_experiment(j, km::identity_operator(dim), dim, unit_vector(dim, 1.0));
      if (!e.dist0) e.dist0 = 0.0;  // every point is fixed
      return e;
    }
    if (kind == "negation") {
      const auto dim = j.value("dim", std::size_t{2});
      const double radius = j.value("radius", 1.0);
      return dense_experiment(j, km::negation_operator(dim, radius), dim, unit_vector(dim, radius));
    }
    if (kind == "rotation") {
      return dense_experiment(j, km::rotation_operator(required<double>(j, "angle")), 2, unit_vector(2, 1.0));
    }
    if (kind == "box_projection") {
      const auto lo = required<km::DenseVector>(j, "lo");
      const auto hi = required<km::DenseVector>(j, "hi");
      km::DenseVector outside(hi.size());
      for (std::size_t i = 0; i < hi.size(); ++i) outside[i] = hi[i] + 1.0;
      auto e = dense_experiment(j, km::box_projection_operator(lo, hi), lo.size(), outside);
      if (!e.dist0) {
        // Fix(T) is the box itself; the distance is to the clamped point.
        e.dist0 = km::distance(e.space, e.x0, e.op.apply(e.x0));
      }
      return e;
    }
    if (kind == "linear") {
      auto matrix = required<std::vector<km::DenseVector>>(j, "matrix");
      const auto dim = matrix.size();
      return dense_experiment(j, km::linear_operator(std::move(matrix)), dim, unit_vector(dim, 1.0));
    }
    if (kind == "shift_l1") {
      SequenceExperiment e;
      e.op = km::shift_operator_l1();
      if (j.contains("x0")) {
        std::map<std::size_t, double> entries;
        for (const auto& [key, value] : j.at("x0").items()) entries[parse_count(key)] = value.get<double>();
        e.x0 = km::SparseSequence(std::move(entries));
      } else {
        e.x0 = km::SparseSequence::unit(0);
      }
      e.dist0 = j.contains("dist0") ? required<double>(j, "dist0") : e.space.norm(e.x0);
      return e;
    }
  } catch (const SpecError&) {
    throw;
  } catch (const json::exception& e) {
    throw SpecError(e.what());
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  throw SpecError("unknown operator kind: " + kind);
}

}  // namespace kmrate::experiment
