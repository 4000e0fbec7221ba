#pragma once

// Scenario documents: parsing (strict, with field paths in every error),
// serialization, and execution.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace scenario {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;
using Matrix = std::vector<std::vector<double>>;

// Input errors carry the dotted path of the offending field.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(std::string path, const std::string& msg)
      : std::invalid_argument(path + ": " + msg), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct FieldSpec {
  std::string type = "zero";  // zero | constant | linear | time_shift | shear | nonlinear
  std::vector<double> value;  // constant
  Matrix matrix;              // linear
  bool operator==(const FieldSpec&) const = default;
};

struct ConnectionSpec {
  std::string type = "metric";   // metric | synthetic
  std::string gamma = "zero";    // synthetic only: zero | levi_civita
  Matrix A, B;                   // synthetic only, default zero
  std::vector<double> C;         // synthetic only, default zero
  bool operator==(const ConnectionSpec&) const = default;
};

struct PathSpec {
  std::string type = "linear";  // linear: x0 + v0 (t − t0) | geodesic
  std::size_t samples = 201;
  bool operator==(const PathSpec&) const = default;
};

struct IntegratorSpec {
  std::string method = "dopri45_adaptive";
  double step = 1e-2;
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 1000000;
  bool operator==(const IntegratorSpec&) const = default;
};

struct ProbeSpec {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::size_t substeps = 64;
  double tolerance = 1e-4;
  bool operator==(const ProbeSpec&) const = default;
};

struct ValidateSpec {
  std::size_t samples = 100;
  std::uint64_t seed = 20260401;
  double flag_threshold = 1e-8;
  bool operator==(const ValidateSpec&) const = default;
};

struct OutputSpec {
  std::string trajectory = "trajectory.csv";
  std::string report = "report.txt";
  std::string summary = "summary.json";
  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string model;
  std::map<std::string, double> params;
  std::string task;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> x0, v0, w0;
  double time_rate = 1.0;                       // suspension: initial γ̇⁰
  std::string force_convention = "lagrangian";  // lagrangian | as_printed
  IntegratorSpec integrator;
  ProbeSpec probe;
  ValidateSpec validate;
  ConnectionSpec connection;
  PathSpec path;
  FieldSpec X, Y;
  OutputSpec outputs;
  bool operator==(const Scenario&) const = default;
};

const std::vector<std::string>& task_names();

// Structural validation only; dimensions are checked against the model in
// check_against_model.
Scenario parse(const Json& doc);
Scenario parse_file(const std::filesystem::path& file);
Json to_json(const Scenario& s);

// Dimensions and task-required fields, given the model's chart dimension.
void check_against_model(const Scenario& s, std::size_t n, bool has_potential, bool has_embedding);

struct RunResult {
  Json summary;
  std::string report;
  std::string trajectory_csv;  // empty when the task has no trajectory
};

// Executes a parsed scenario. Throws SchemaError / tdg::ModelError for input
// problems and tdg::NumericalError for numerical failure.
RunResult execute(const Scenario& s);

// Writes the outputs of `r` into `dir`, creating it if needed.
void write_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir);

// The exit code convention: 0 success, 2 input error, 3 numerical failure.
enum Exit { ok = 0, input_error = 2, numerical_failure = 3 };

}  // namespace scenario
