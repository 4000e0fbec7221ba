#include <algorithm>
#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "scenario.hpp"
#include "tdg/errors.hpp"
#include "tdg/models.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = scenario::ok;
  std::string message;
  std::string report;
};

// Parses, runs and writes one scenario; never throws.
Outcome run_one(const fs::path& file, const fs::path& out_root) {
  Outcome o;
  try {
    const scenario::Scenario s = scenario::parse_file(file);
    const scenario::RunResult r = scenario::execute(s);
    scenario::write_outputs(s, r, out_root / file.stem());
    o.report = r.report;
  } catch (const scenario::SchemaError& e) {
    o = {scenario::input_error, std::string("input error at ") + e.what(), {}};
  } catch (const tdg::ModelError& e) {
    o = {scenario::input_error, std::string("input error: ") + e.what(), {}};
  } catch (const tdg::NumericalError& e) {
    o = {scenario::numerical_failure, std::string("numerical failure: ") + e.what(), {}};
  } catch (const std::exception& e) {
    o = {scenario::numerical_failure, std::string("failure: ") + e.what(), {}};
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent Riemannian geometry: scenarios, probes and model validation"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_dir = ".";
  bool quiet = false;
  app.add_option("--output-dir", out_dir, "Directory for outputs (one subdirectory per scenario file)");
  app.add_flag("--quiet", quiet, "Only print errors");

  auto* run = app.add_subcommand("run", "Run scenario files");
  std::vector<std::string> files;
  unsigned jobs = 1;
  run->add_option("files", files, "Scenario JSON files")->required()->check(CLI::ExistingFile);
  run->add_option("--jobs,-j", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

  auto* val = app.add_subcommand("validate", "Compare closed forms against the autodiff oracle");
  std::string model;
  std::size_t samples = 100;
  std::uint64_t seed = 20260401;
  val->add_option("model", model, "Built-in model name")->required();
  val->add_option("--samples", samples, "Random sample points")->check(CLI::PositiveNumber);
  val->add_option("--seed", seed, "Sampling seed");

  app.add_subcommand("list-models", "List built-in models and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : scenario::input_error;
  }

  if (app.got_subcommand("list-models")) {
    for (const auto& name : tdg::builtin_names()) {
      const tdg::ModelBundle b = tdg::builtin(name);
      std::cout << name << " (n=" << b.dim() << "): " << b.description << "\n";
      for (const auto& [k, v] : b.params) std::cout << "    " << k << " = " << v << "\n";
    }
    return 0;
  }

  if (app.got_subcommand("validate")) {
    scenario::Scenario s;
    s.name = "validate_" + model;
    s.model = model;
    s.task = "validate";
    s.validate.samples = samples;
    s.validate.seed = seed;
    try {
      const scenario::RunResult r = scenario::execute(s);
      if (app.count("--output-dir")) scenario::write_outputs(s, r, fs::path(out_dir) / s.name);
      if (!quiet) std::cout << r.report;
      return 0;
    } catch (const scenario::SchemaError& e) {
      std::cerr << "input error at " << e.what() << "\n";
      return scenario::input_error;
    } catch (const tdg::ModelError& e) {
      std::cerr << "input error: " << e.what() << "\n";
      return scenario::input_error;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return scenario::numerical_failure;
    }
  }

  // run: outcomes are collected by index, so reporting order follows the
  // command line regardless of which job finishes first.
  std::vector<Outcome> outcomes(files.size());
  const std::size_t width = std::max<std::size_t>(1, std::min<std::size_t>(jobs, files.size()));
  for (std::size_t start = 0; start < files.size(); start += width) {
    std::vector<std::future<Outcome>> batch;
    for (std::size_t i = start; i < std::min(files.size(), start + width); ++i)
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, run_one, fs::path(files[i]),
                                 fs::path(out_dir)));
    for (std::size_t k = 0; k < batch.size(); ++k) outcomes[start + k] = batch[k].get();
  }
  int code = scenario::ok;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Outcome& o = outcomes[i];
    if (o.code != scenario::ok) {
      std::cerr << files[i] << ": " << o.message << "\n";
    } else if (!quiet) {
      std::cout << "== " << files[i] << "\n" << o.report << "\n";
    }
    code = std::max(code, o.code);
  }
  return code;
}
