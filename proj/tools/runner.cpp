#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scenario.hpp"
#include "tdg/dynamics.hpp"
#include "tdg/models.hpp"
#include "tdg/operators.hpp"
#include "tdg/validation.hpp"

namespace scenario {

using namespace tdg;

namespace {

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (std::size_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec to_vec(const std::vector<double>& v) { return Vec(v); }

Mat to_mat(const Matrix& rows, std::size_t n) {
  if (rows.empty()) return Mat::zero(n);
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv(const Trajectory& tr, const std::vector<Vec>* extra = nullptr, const char* extra_name = "w") {
  const std::size_t n = tr.dim();
  std::ostringstream os;
  os << "t";
  for (std::size_t i = 1; i <= n; ++i) os << ",x" << i;
  for (std::size_t i = 1; i <= n; ++i) os << ",v" << i;
  if (extra)
    for (std::size_t i = 1; i <= n; ++i) os << "," << extra_name << i;
  os << "\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << num(tr.t(k));
    for (std::size_t i = 0; i < n; ++i) os << "," << num(tr.x(k)[i]);
    for (std::size_t i = 0; i < n; ++i) os << "," << num(tr.v(k)[i]);
    if (extra)
      for (std::size_t i = 0; i < n; ++i) os << "," << num((*extra)[k][i]);
    os << "\n";
  }
  return os.str();
}

IntegratorConfig config_of(const IntegratorSpec& s) {
  IntegratorConfig c;
  c.method = method_from_string(s.method);
  c.step = s.step;
  c.abs_tol = s.abs_tol;
  c.rel_tol = s.rel_tol;
  c.max_steps = s.max_steps;
  c.validate();
  return c;
}

ProbeOptions probe_of(const ProbeSpec& s) {
  ProbeOptions o;
  o.epsilons = s.epsilons;
  o.substeps = s.substeps;
  o.tolerance = s.tolerance;
  return o;
}

TimeDepVectorField make_field(const FieldSpec& f, std::size_t n) {
  if (f.type == "zero") return TimeDepVectorField::zero(n);
  if (f.type == "constant") return TimeDepVectorField::constant(to_vec(f.value));
  if (f.type == "linear") {
    const Mat M = to_mat(f.matrix, n);
    return TimeDepVectorField(
        n, [M](double, const Vec& x) { return M * x; }, [M](double, const Vec&) { return M; },
        [n](double, const Vec&) { return Vec::zero(n); });
  }
  if (f.type == "time_shift") {
    // t ∂₁
    return TimeDepVectorField::from_generic(n, [n](const auto& t, const auto&) {
      using S = std::remove_cvref_t<decltype(t)>;
      Vector<S> r = Vector<S>::zero(n);
      r[0] = t;
      return r;
    });
  }
  if (f.type == "shear") {
    // x¹ ∂₂
    return TimeDepVectorField::from_generic(2, [](const auto& t, const auto& x) {
      using S = std::remove_cvref_t<decltype(t)>;
      return Vector<S>{S(0.0), x[0]};
    });
  }
  // nonlinear: (sin x² + t x¹, cos t (x¹)²)
  return TimeDepVectorField::from_generic(2, [](const auto& t, const auto& x) {
    using S = std::remove_cvref_t<decltype(t)>;
    using std::cos, std::sin;
    return Vector<S>{sin(x[1]) + t * x[0], cos(t) * x[0] * x[0]};
  });
}

DotNabla make_connection(const Scenario& s, const ModelBundle& b) {
  const std::size_t n = b.dim();
  if (s.connection.type == "metric") return metric_dotnabla(b.metric);
  ChristoffelEval gamma = s.connection.gamma == "levi_civita" ? levi_civita(b.metric) : ChristoffelEval::zero(n);
  TimeDepVectorField C = s.connection.C.empty() ? TimeDepVectorField::zero(n) : TimeDepVectorField::constant(to_vec(s.connection.C));
  return make_dotnabla(std::move(gamma), std::move(C), MatrixField::constant(to_mat(s.connection.A, n)),
                       MatrixField::constant(to_mat(s.connection.B, n)));
}

Trajectory linear_path(const Scenario& s) {
  const Vec x0 = to_vec(s.x0), v0 = to_vec(s.v0);
  const std::size_t m = s.t1 == s.t0 ? 1 : s.path.samples;
  std::vector<double> t;
  std::vector<Vec> x, v, a;
  for (std::size_t k = 0; k < m; ++k) {
    const double tk = m == 1 ? s.t0 : s.t0 + (s.t1 - s.t0) * static_cast<double>(k) / static_cast<double>(m - 1);
    t.push_back(tk);
    x.push_back(x0 + (tk - s.t0) * v0);
    v.push_back(v0);
    a.push_back(Vec::zero(x0.size()));
  }
  return Trajectory(std::move(t), std::move(x), std::move(v), std::move(a));
}

Trajectory base_path(const Scenario& s, const ModelBundle& b, const DotNabla& dn, const IntegratorConfig& cfg) {
  if (s.path.type == "linear") return linear_path(s);
  if (s.connection.type == "metric") return geodesic_metric(b.metric, s.t0, to_vec(s.x0), to_vec(s.v0), s.t1, cfg);
  return geodesic_dotnabla(dn, s.t0, to_vec(s.x0), to_vec(s.v0), s.t1, cfg);
}

Json functionals_json(const MetricField& m, const Trajectory& tr) {
  const FunctionalReport f = functionals(m, tr);
  return Json{{"energy", f.energy},
              {"length", f.length},
              {"el_residual_max", f.el_residual_max},
              {"el_skipped", f.el_skipped}};
}

Json probe_json(const ProbeResult& r) {
  Json eps = Json::array(), ends = Json::array(), scaled = Json::array();
  for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
    eps.push_back(r.epsilons[i]);
    ends.push_back(vec_json(r.endpoints[i]));
    scaled.push_back(vec_json(r.scaled[i]));
  }
  return Json{{"epsilons", eps},
              {"endpoints", ends},
              {"scaled", scaled},
              {"extrapolated", vec_json(r.extrapolated)},
              {"expected", vec_json(r.expected)},
              {"expected_error", r.expected_error},
              {"level_difference", r.level_difference},
              {"converged", r.converged},
              {"convergence_order_estimate", r.convergence_order_estimate},
              {"origin_defect", r.origin_defect}};
}

std::string probe_text(const std::string& title, const ProbeResult& r) {
  std::ostringstream os;
  os << title << "\n";
  for (std::size_t i = 0; i < r.epsilons.size(); ++i)
    os << "  eps=" << r.epsilons[i] << "  (c-p)/eps^2 = " << r.scaled[i] << "\n";
  os << "  extrapolated " << r.extrapolated << "\n  expected     " << r.expected << "\n";
  os << "  |extrapolated - expected| = " << r.expected_error << "\n";
  os << "  level difference " << r.level_difference << (r.converged ? " (converged)" : " (NOT converged)") << "\n";
  os << "  defect order estimate " << r.convergence_order_estimate << "\n";
  os << "  c(0) - p = " << r.origin_defect << "\n";
  return os.str();
}

}  // namespace

RunResult execute(const Scenario& s) {
  ModelBundle b;
  try {
    b = builtin(s.model, s.params);
  } catch (const ModelError& e) {
    throw SchemaError("model", e.what());
  }
  const std::size_t n = b.dim();
  check_against_model(s, n, b.potential.has_value(), b.embedding.has_value());

  RunResult out;
  Json& sum = out.summary;
  sum["scenario"] = s.name;
  sum["model"] = s.model;
  sum["model_params"] = b.params;
  sum["task"] = s.task;
  std::ostringstream rep;
  rep << "scenario " << (s.name.empty() ? "(unnamed)" : s.name) << "\nmodel " << s.model << ": " << b.description
      << "\ntask " << s.task << "\n\n";

  const IntegratorConfig cfg = config_of(s.integrator);
  const Vec x0 = to_vec(s.x0);

  if (s.task == "validate") {
    ValidationOptions vo;
    vo.samples = s.validate.samples;
    vo.seed = s.validate.seed;
    vo.flag_threshold = s.validate.flag_threshold;
    const ValidationReport vr = validate_model(b, vo);
    Json rows = Json::array();
    for (const auto& r : vr.rows)
      rows.push_back({{"quantity", r.quantity}, {"compared", r.compared}, {"max_abs", r.max_abs},
                      {"min_abs", r.min_abs}, {"flagged", r.flagged}});
    sum["rows"] = rows;
    sum["samples"] = vr.samples;
    sum["seed"] = vr.seed;
    sum["flag_threshold"] = vr.flag_threshold;
    if (vr.pendulum) {
      const auto& f = *vr.pendulum;
      sum["pendulum"] = {{"supported_denominator", f.supported_denominator},
                         {"supported_w", f.supported_w},
                         {"w_best_error", f.w_best_error},
                         {"printed_accel_error", f.printed_accel_error},
                         {"printed_accel_error_constant_masses", f.printed_accel_error_const},
                         {"energy_drift_lagrangian", f.energy_drift_lagrangian},
                         {"energy_drift_as_printed", f.energy_drift_as_printed}};
    }
    if (vr.conformal_a_b_identity_error) sum["a_b_identity_error"] = *vr.conformal_a_b_identity_error;
    rep << vr.to_text();
  } else if (s.task == "geodesic") {
    const DotNabla dn = make_connection(s, b);
    const Trajectory tr = s.connection.type == "metric"
                              ? geodesic_metric(b.metric, s.t0, x0, to_vec(s.v0), s.t1, cfg)
                              : geodesic_dotnabla(dn, s.t0, x0, to_vec(s.v0), s.t1, cfg);
    sum["samples"] = tr.size();
    sum["x_end"] = vec_json(tr.x_back());
    sum["v_end"] = vec_json(tr.v_back());
    if (s.connection.type == "metric") sum["functionals"] = functionals_json(b.metric, tr);
    rep << "samples " << tr.size() << "\nx(t1) = " << tr.x_back() << "\nv(t1) = " << tr.v_back() << "\n";
    out.trajectory_csv = csv(tr);
  } else if (s.task == "forced") {
    const ForceConvention conv = s.force_convention == "as_printed" ? ForceConvention::as_printed : ForceConvention::lagrangian;
    const Trajectory tr = forced_geodesic(b.metric, *b.potential, s.t0, x0, to_vec(s.v0), s.t1, cfg, conv);
    auto E = [&](std::size_t i) {
      return 0.5 * bilinear(b.metric.g(tr.t(i), tr.x(i)), tr.v(i), tr.v(i)) + (*b.potential)(tr.t(i), tr.x(i));
    };
    double drift = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i) drift = std::max(drift, std::abs(E(i) - E(0)));
    sum["samples"] = tr.size();
    sum["x_end"] = vec_json(tr.x_back());
    sum["v_end"] = vec_json(tr.v_back());
    sum["force_convention"] = s.force_convention;
    sum["energy_start"] = E(0);
    sum["energy_drift_max"] = drift;
    rep << "force convention " << s.force_convention << "\nx(t1) = " << tr.x_back() << "\nmax |E - E0| (E = T + V) "
        << drift << "\n";
    out.trajectory_csv = csv(tr);
  } else if (s.task == "transport") {
    const DotNabla dn = make_connection(s, b);
    const Trajectory base = base_path(s, b, dn, cfg);
    const SampledVector w = parallel_transport(dn, base, to_vec(s.w0), cfg);
    std::vector<Vec> ws;
    for (std::size_t k = 0; k < base.size(); ++k) ws.push_back(w(base.t(k)));
    const double n0 = bilinear(b.metric.g(base.t_front(), base.x(0)), ws.front(), ws.front());
    const double n1 = bilinear(b.metric.g(base.t_back(), base.x_back()), ws.back(), ws.back());
    sum["w_end"] = vec_json(ws.back());
    sum["metric_norm2_start"] = n0;
    sum["metric_norm2_end"] = n1;
    sum["samples"] = base.size();
    rep << "base path " << s.path.type << "\nw(t1) = " << ws.back() << "\ng(w,w): " << n0 << " -> " << n1 << "\n";
    out.trajectory_csv = csv(base, &ws);
  } else if (s.task == "flow") {
    const TimeDepVectorField X = make_field(s.X, n);
    const Trajectory tr = flow(X, s.t0, x0, s.t1, cfg);
    sum["x_end"] = vec_json(tr.x_back());
    sum["samples"] = tr.size();
    rep << "field " << s.X.type << "\nx(t1) = " << tr.x_back() << "\n";
    out.trajectory_csv = csv(tr);
  } else if (s.task == "functionals") {
    const DotNabla dn = make_connection(s, b);
    const Trajectory tr = base_path(s, b, dn, cfg);
    const FunctionalReport f = functionals(b.metric, tr);
    sum["energy"] = f.energy;
    sum["length"] = f.length;
    sum["el_residual_max"] = f.el_residual_max;
    sum["el_skipped"] = f.el_skipped;
    rep << "energy " << num(f.energy) << "\nlength " << num(f.length) << "\nEL residual max " << f.el_residual_max
        << " (" << f.el_skipped << " samples skipped: metric not positive definite)\n";
    if (b.embedding) {
      const double le = embedded_length(*b.embedding, tr);
      sum["embedded_length"] = le;
      rep << "embedded length " << num(le) << "\n";
    }
    try {
      const double r = length_critical_residual(b.metric, tr);
      sum["length_critical_residual"] = r;
      rep << "length-critical residual " << r << "\n";
    } catch (const NumericalError& e) {
      // Not a failure of the run: the length equation is undefined there.
      sum["length_critical_residual"] = nullptr;
      sum["length_critical_note"] = e.what();
      rep << "length-critical residual not defined: " << e.what() << "\n";
    }
    rep << "\nkinetic energy T(t)\n";
    for (const auto& [t, T] : f.kinetic_series) rep << "  " << num(t) << "  " << num(T) << "\n";
    out.trajectory_csv = csv(tr);
  } else if (s.task == "torsion_probe") {
    const DotNabla dn = make_connection(s, b);
    const Event e{s.t0, x0};
    const Vec v = to_vec(s.v0), w = to_vec(s.w0);
    const TorsionEvaluation te = torsion_constructions(dn, TimeDepVectorField::constant(v), TimeDepVectorField::constant(w), e);
    const ProbeResult r = torsion_loop_probe(dn, e, v, w, probe_of(s.probe));
    sum["probe"] = probe_json(r);
    sum["torsion_formula"] = vec_json(te.formula);
    sum["torsion_third_construction"] = vec_json(te.third_construction);
    sum["torsion_mismatch"] = te.mismatch;
    rep << "torsion formula        " << te.formula << "\nthird construction     " << te.third_construction
        << "\nmismatch " << te.mismatch << "\n\n"
        << probe_text("four-step loop (expected limit: -torsion)", r);
  } else if (s.task == "bracket_probe") {
    const TimeDepVectorField X = make_field(s.X, n), Y = make_field(s.Y, n);
    const ProbeResult r = bracket_probe(X, Y, Event{s.t0, x0}, probe_of(s.probe));
    sum["probe"] = probe_json(r);
    rep << probe_text("four-flow commutator (expected limit: [[X,Y]])", r);
  } else if (s.task == "suspension") {
    const Trajectory tr = geodesic_suspension(b.metric, s.t0, x0, to_vec(s.v0), s.t1, cfg, s.time_rate);
    double defect = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k)
      defect = std::max(defect, std::abs(tr.x(k)[0] - (s.t0 + s.time_rate * (tr.t(k) - s.t0))));
    sum["samples"] = tr.size();
    sum["y_end"] = vec_json(tr.x_back());
    sum["section_defect_max"] = defect;
    rep << "state (gamma0, x) at s1 = " << tr.x_back() << "\nmax |gamma0(s) - (t0 + rate (s - t0))| = " << defect
        << "\n";
    out.trajectory_csv = csv(tr);
  }
  out.report = rep.str();
  return out;
}

void write_outputs(const Scenario& s, const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&dir](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  };
  if (!r.trajectory_csv.empty()) put(s.outputs.trajectory, r.trajectory_csv);
  put(s.outputs.report, r.report);
  put(s.outputs.summary, r.summary.dump(2) + "\n");
}

}  // namespace scenario
