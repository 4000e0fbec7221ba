#pragma once

// Oracle comparisons between closed forms (hand-written or as printed) and
// the autodiff-derived quantities, over fixed-seed random samples.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tdg/models.hpp"

namespace tdg {

struct DiscrepancyRow {
  std::string quantity;  // e.g. "Gamma"
  std::string compared;  // e.g. "closed_form vs autodiff"
  double max_abs = 0.0;
  double min_abs = 0.0;  // smallest per-sample discrepancy; > 0 means "never agrees"
  bool flagged = false;  // max_abs above the flag threshold
};

struct PendulumFindings {
  std::string supported_denominator;  // "m1" or "m2"
  std::string supported_w;            // the W candidate matching AD
  double w_best_error = 0.0;
  double printed_accel_error = 0.0;        // default (varying) masses
  double printed_accel_error_const = 0.0;  // constant masses
  double energy_drift_lagrangian = 0.0;    // |Δ(T+V)| over the run, L = T − V
  double energy_drift_as_printed = 0.0;
  double energy_run_seconds = 0.0;
};

struct ValidationOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 20260401;
  double flag_threshold = 1e-8;
  bool energy_run = true;  // pendulum only: 10 s forced runs under both sign conventions
};

struct ValidationReport {
  std::string model;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double flag_threshold = 0.0;
  std::vector<DiscrepancyRow> rows;
  std::optional<PendulumFindings> pendulum;
  std::optional<double> conformal_a_b_identity_error;  // max |A − Id|, |B − Id|

  const DiscrepancyRow* find(const std::string& quantity, const std::string& compared) const;
  std::string to_text() const;
};

// Random events used by the validation sweeps: t ∈ [0.25, 3], x ∈ [−1.5, 1.5]ⁿ.
std::vector<std::pair<double, Vec>> sample_events(std::size_t n, std::size_t count, std::uint64_t seed);

ValidationReport validate_model(const ModelBundle& bundle, const ValidationOptions& opts = {});

}  // namespace tdg
