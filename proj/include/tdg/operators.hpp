#pragma once

// Time-dependent Lie calculus, the torsion operator, and the two ε-probes
// that recover ⟦X,Y⟧ and 𝒯 as second-order limits of composed flows.

#include <cstddef>
#include <string>
#include <vector>

#include "tdg/connection.hpp"
#include "tdg/dynamics.hpp"

namespace tdg {

// 𝕃_X f = ∂f/∂t + Xⁱ ∂f/∂xⁱ
double lie_derivative_scalar(const TimeDepVectorField& X, const ScalarField& f, const Event& e);

// [X,Y]ᵏ = Xⁱ∂ᵢYᵏ − Yⁱ∂ᵢXᵏ at frozen t.
Vec lie_bracket(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e);

// 𝕃_X Y = Ẏ + [X,Y]
Vec lie_derivative_vector(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e);

// ⟦X,Y⟧ = [X,Y] + Ẏ − Ẋ
Vec td_bracket(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e);

// Lie bracket of two fields on ℝ×M, written componentwise.
SplitVector extended_bracket(const ExtendedField& Xhat, const ExtendedField& Yhat, const Event& e);

struct TorsionEvaluation {
  Vec formula;             // T^∇(X,Y) + (A − B)(X − Y)
  Vec third_construction;  // ∇̇_X Y − ∇̇_Y X − ⟦X,Y⟧
  double mismatch = 0.0;   // max-norm difference of the two
};

TorsionEvaluation torsion_constructions(const DotNabla& dn, const TimeDepVectorField& X,
                                        const TimeDepVectorField& Y, const Event& e);

// The formula value. Throws NumericalError if the third construction
// disagrees beyond round-off.
Vec torsion_operator(const DotNabla& dn, const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e);

struct VerticalTorsion {
  Vec vertical;
  double horizontal = 0.0;
  Vec expected_vertical;        // torsion_operator of the core
  double expected_horizontal;   // (α − β)(X − Y) + ε(X,Y) − ε(Y,X)
};

// T^∇̂(X̃, Ỹ) = ∇̂_X̃ Ỹ − ∇̂_Ỹ X̃ − [X̃, Ỹ] on suspensions.
VerticalTorsion vertical_torsion_check(const ExtendedConnection& ec, const TimeDepVectorField& X,
                                       const TimeDepVectorField& Y, const Event& e);

struct ProbeOptions {
  std::vector<double> epsilons{0.1, 0.05, 0.025};
  std::size_t substeps = 64;  // fixed RK4 step is ε / substeps
  double tolerance = 1e-4;
  bool parallel = false;
};

struct ProbeResult {
  std::vector<double> epsilons;
  std::vector<Vec> endpoints;  // c(ε)
  std::vector<Vec> scaled;     // (c(ε) − p) / ε²
  // Neville tableau: table[j][i] extrapolates from epsilons i..i+j.
  std::vector<std::vector<Vec>> table;
  Vec extrapolated;            // ½ c''(0)
  double level_difference = 0.0;
  bool converged = false;
  double convergence_order_estimate = 0.0;  // log-log slope of ‖c(ε) − p‖
  double origin_defect = 0.0;  // ‖c(0) − p‖
  Vec expected;                // the closed-form value the limit should equal
  double expected_error = 0.0;
};

// Polynomial extrapolation to ε = 0 of samples D(εᵢ), plus the tableau.
Vec richardson(const std::vector<double>& eps, const std::vector<Vec>& values, std::vector<std::vector<Vec>>* table);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// c₁ = Φ_X(t+ε, t, p), c₂ = Φ_Y(t+2ε, t+ε, c₁), c₃ = Φ_X(t+ε, t+2ε, c₂),
// c₄ = Φ_Y(t, t+ε, c₃). Expected limit ⟦X,Y⟧(t,p).
Vec bracket_loop(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e, double eps,
                 std::size_t substeps);
ProbeResult bracket_probe(const TimeDepVectorField& X, const TimeDepVectorField& Y, const Event& e,
                          const ProbeOptions& opts = {});

// Geodesic along v for ε carrying w; geodesic along (transported) w for ε
// carrying v; geodesic along v back for −ε carrying w; geodesic along w back
// for −ε. Expected limit −𝒯(v, w).
Vec torsion_loop(const DotNabla& dn, const Event& e, const Vec& v0, const Vec& w0, double eps, std::size_t substeps);
ProbeResult torsion_loop_probe(const DotNabla& dn, const Event& e, const Vec& v0, const Vec& w0,
                               const ProbeOptions& opts = {});

}  // namespace tdg
