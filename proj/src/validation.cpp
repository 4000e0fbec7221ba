#include "tdg/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "tdg/connection.hpp"
#include "tdg/dynamics.hpp"

namespace tdg {

namespace {

double max_abs_tensor(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m = std::max(m, std::abs(a(k, i, j) - b(k, i, j)));
  return m;
}

// Accumulates per-sample discrepancies into one row.
struct Tally {
  std::string quantity, compared;
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  void add(double d) {
    max_abs = std::max(max_abs, d);
    min_abs = std::min(min_abs, d);
  }
  DiscrepancyRow row(double threshold) const {
    return {quantity, compared, max_abs, std::isfinite(min_abs) ? min_abs : 0.0, max_abs > threshold};
  }
};

PendulumParams pendulum_params_of(const ModelBundle& b) {
  const auto& p = b.params;
  return PendulumParams::schedules(p.at("l1"), p.at("l2"), p.at("m1_mean"), p.at("m1_amp"), p.at("m1_freq"),
                                   p.at("m2_mean"), p.at("m2_amp"), p.at("m2_freq"), p.at("g0"));
}

// Twin comparison: closed form against autodiff, for every derived quantity.
void compare_twins(const MetricField& closed, const MetricField& ad,
                   const std::vector<std::pair<double, Vec>>& pts, double threshold,
                   std::vector<DiscrepancyRow>& rows) {
  const std::string cmp = "closed_form vs autodiff";
  Tally g{"g", cmp}, gd{"g_dot", cmp}, dgx{"dg_dx", cmp}, gi{"G_inv", cmp}, mus{"G_inv_G_dot", cmp},
      gam{"Gamma", cmp}, gamd{"Gamma_dot", cmp};
  const ChristoffelEval lc_closed = levi_civita(closed), lc_ad = levi_civita(ad);
  const Rank3Field gd_closed = gamma_dot(lc_closed), gd_ad = gamma_dot(lc_ad);
  for (const auto& [t, x] : pts) {
    const Event e{t, x};
    g.add(max_abs_diff(closed.g(t, x), ad.g(t, x)));
    gd.add(max_abs_diff(closed.dg_dt(t, x), ad.dg_dt(t, x)));
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) d = std::max(d, max_abs_diff(closed.dg_dx(t, x, k), ad.dg_dx(t, x, k)));
    dgx.add(d);
    gi.add(max_abs_diff(metric_inverse(closed, e), metric_inverse(ad, e)));
    mus.add(max_abs_diff(musical_endomorphism(closed, e), musical_endomorphism(ad, e)));
    gam.add(max_abs_tensor(lc_closed(t, x), lc_ad(t, x)));
    gamd.add(max_abs_tensor(gd_closed(t, x), gd_ad(t, x)));
  }
  for (const Tally* r : {&g, &gd, &dgx, &gi, &mus, &gam, &gamd}) rows.push_back(r->row(threshold));
}

double energy_drift(const MetricField& m, const ScalarField& V, ForceConvention conv) {
  const Vec x0{0.5, -0.3}, v0{0.0, 0.0};
  const Trajectory tr = forced_geodesic(m, V, 0.0, x0, v0, 10.0, IntegratorConfig::dopri(1e-10, 1e-10), conv);
  auto E = [&](std::size_t i) { return 0.5 * bilinear(m.g(tr.t(i), tr.x(i)), tr.v(i), tr.v(i)) + V(tr.t(i), tr.x(i)); };
  const double e0 = E(0);
  double drift = 0.0;
  for (std::size_t i = 1; i < tr.size(); ++i) drift = std::max(drift, std::abs(E(i) - e0));
  return drift;
}

void pendulum_checks(const ModelBundle& b, const std::vector<std::pair<double, Vec>>& pts,
                     const ValidationOptions& opts, ValidationReport& rep) {
  using namespace printed;
  const PendulumParams p = pendulum_params_of(b);
  const MetricField& ad = b.metric;
  const ChristoffelEval lc = levi_civita(ad);
  const Rank3Field lcd = gamma_dot(lc);
  const std::string cmp = "printed vs autodiff";

  Tally gam{"Gamma", cmp}, gi{"G_inv", cmp}, acc{"accel", "printed vs autodiff (varying masses)"};
  Tally gdot_m1{"G_dot[den=m1]", cmp}, gdot_m2{"G_dot[den=m2]", cmp};
  Tally mus_m1{"G_inv_G_dot[den=m1]", cmp}, mus_m2{"G_inv_G_dot[den=m2]", cmp};
  const WChoice ws[] = {WChoice::as_printed, WChoice::m1dot_m2_minus_m1_m2dot, WChoice::m1_m2dot_minus_m1dot_m2};
  std::vector<Tally> wrows;
  for (WChoice w : ws) wrows.push_back({std::string("Gamma_dot[W=") + to_string(w) + "]", cmp});

  std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);
  for (const auto& [t, x] : pts) {
    const Event e{t, x};
    gam.add(max_abs_tensor(christoffel(p, t, x), lc(t, x)));
    gi.add(max_abs_diff(inverse_metric(p, t, x), metric_inverse(ad, e)));
    const Mat gdot = ad.dg_dt(t, x);
    gdot_m1.add(max_abs_diff(metric_dot(p, t, x, Denominator::m1), gdot));
    gdot_m2.add(max_abs_diff(metric_dot(p, t, x, Denominator::m2), gdot));
    const Mat mus = musical_endomorphism(ad, e);
    mus_m1.add(max_abs_diff(musical(p, t, x, Denominator::m1), mus));
    mus_m2.add(max_abs_diff(musical(p, t, x, Denominator::m2), mus));
    const Tensor gd = lcd(t, x);
    for (std::size_t i = 0; i < 3; ++i) wrows[i].add(max_abs_tensor(christoffel_dot(p, t, x, ws[i]), gd));
    const Vec v{vel(rng), vel(rng)};
    acc.add(norm_inf(geodesic_accel(p, t, x, v) - geodesic_metric_accel(ad, t, x, v)));
  }

  // With constant masses every ṁ term drops out of the printed equations.
  const PendulumParams pc = PendulumParams::schedules(p.l1, p.l2, p.m1(0.0), 0.0, 1.0, p.m2(0.0), 0.0, 1.0, p.g0);
  const MetricField adc = pendulum_metric_autodiff(pc);
  Tally acc_c{"accel", "printed vs autodiff (constant masses)"};
  for (const auto& [t, x] : pts) {
    const Vec v{vel(rng), vel(rng)};
    acc_c.add(norm_inf(geodesic_accel(pc, t, x, v) - geodesic_metric_accel(adc, t, x, v)));
  }

  const double th = opts.flag_threshold;
  for (const Tally* r : {&gam, &gi, &gdot_m1, &gdot_m2, &mus_m1, &mus_m2}) rep.rows.push_back(r->row(th));
  for (const Tally& r : wrows) rep.rows.push_back(r.row(th));
  rep.rows.push_back(acc.row(th));
  rep.rows.push_back(acc_c.row(th));

  PendulumFindings f;
  const double den_m1 = std::max(gdot_m1.max_abs, mus_m1.max_abs);
  const double den_m2 = std::max(gdot_m2.max_abs, mus_m2.max_abs);
  f.supported_denominator = den_m2 < den_m1 ? "m2" : "m1";
  std::size_t best = 0;
  for (std::size_t i = 1; i < wrows.size(); ++i)
    if (wrows[i].max_abs < wrows[best].max_abs) best = i;
  f.supported_w = to_string(ws[best]);
  f.w_best_error = wrows[best].max_abs;
  f.printed_accel_error = acc.max_abs;
  f.printed_accel_error_const = acc_c.max_abs;

  if (opts.energy_run && p.g0 > 0.0) {
    const auto start = std::chrono::steady_clock::now();
    const ScalarField V = pendulum_potential(pc);
    f.energy_drift_lagrangian = energy_drift(adc, V, ForceConvention::lagrangian);
    f.energy_drift_as_printed = energy_drift(adc, V, ForceConvention::as_printed);
    f.energy_run_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  rep.pendulum = f;
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

std::vector<std::pair<double, Vec>> sample_events(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.25, 3.0), ux(-1.5, 1.5);
  std::vector<std::pair<double, Vec>> pts;
  pts.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const double t = ut(rng);
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = ux(rng);
    pts.emplace_back(t, std::move(x));
  }
  return pts;
}

ValidationReport validate_model(const ModelBundle& b, const ValidationOptions& opts) {
  ValidationReport rep;
  rep.model = b.name;
  rep.samples = opts.samples;
  rep.seed = opts.seed;
  rep.flag_threshold = opts.flag_threshold;
  const auto pts = sample_events(b.dim(), opts.samples, opts.seed);
  if (!b.closed_form) throw ModelError("model '" + b.name + "' has no closed-form twin to validate");
  compare_twins(*b.closed_form, b.metric, pts, opts.flag_threshold, rep.rows);

  if (b.name == "double_pendulum") pendulum_checks(b, pts, opts, rep);

  if (b.name == "conformal_plane") {
    const DotNabla dn = metric_dotnabla(b.metric);
    double err = 0.0;
    for (const auto& [t, x] : pts) {
      const Mat id = Mat::identity(b.dim());
      err = std::max({err, max_abs_diff(dn.A(t, x), id), max_abs_diff(dn.B(t, x), id)});
    }
    rep.conformal_a_b_identity_error = err;
  }
  return rep;
}

const DiscrepancyRow* ValidationReport::find(const std::string& quantity, const std::string& compared) const {
  for (const auto& r : rows)
    if (r.quantity == quantity && (compared.empty() || r.compared == compared)) return &r;
  return nullptr;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "validate " << model << "  (" << samples << " samples, seed " << seed << ", flag above "
     << sci(flag_threshold) << ")\n\n";
  std::size_t wq = 8, wc = 8;
  for (const auto& r : rows) {
    wq = std::max(wq, r.quantity.size());
    wc = std::max(wc, r.compared.size());
  }
  os << std::left << std::setw(static_cast<int>(wq) + 2) << "quantity" << std::setw(static_cast<int>(wc) + 2)
     << "compared" << std::setw(12) << "max_abs" << std::setw(12) << "min_abs"
     << "flag\n";
  for (const auto& r : rows) {
    os << std::left << std::setw(static_cast<int>(wq) + 2) << r.quantity << std::setw(static_cast<int>(wc) + 2)
       << r.compared << std::setw(12) << sci(r.max_abs) << std::setw(12) << sci(r.min_abs)
       << (r.flagged ? "FLAG" : "ok") << "\n";
  }
  if (pendulum) {
    const auto& f = *pendulum;
    os << "\nprinted-form findings\n";
    os << "  denominator supported by the AD oracle (G_dot, G_inv_G_dot): " << f.supported_denominator << "\n";
    os << "  W candidate supported by the AD oracle: " << f.supported_w << "  (max abs " << sci(f.w_best_error)
       << ")\n";
    os << "  printed accelerations vs geodesic RHS: " << sci(f.printed_accel_error) << " (varying masses), "
       << sci(f.printed_accel_error_const) << " (constant masses)\n";
    if (f.energy_run_seconds > 0.0) {
      os << "  energy T+V drift over 10 s, constant masses: " << sci(f.energy_drift_lagrangian)
         << " (L = T - V, implemented default), " << sci(f.energy_drift_as_printed) << " (force sign as printed)\n";
    }
  }
  if (conformal_a_b_identity_error)
    os << "\nA = B = Id: max deviation " << sci(*conformal_a_b_identity_error) << "\n";
  return os.str();
}

}  // namespace tdg
