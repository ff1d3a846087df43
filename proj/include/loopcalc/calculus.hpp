#pragma once

#include <functional>
#include <vector>

#include "loopcalc/gauge.hpp"
#include "loopcalc/paths.hpp"

namespace loopcalc {

/// Matrix-valued function on paths. Scalars are 1×1.
struct PathFunctional {
  std::function<Matrix(const Path &)> eval;
  int rows = 1;
  int cols = 1;

  Matrix operator()(const Path &p) const { return eval(p); }
};

/// f(p) = W(p) for the connection A. Evaluated on the raw (unreduced) path.
PathFunctional holonomy_functional(const ConnectionField &A,
                                   const IntegratorOptions &opts = {});
/// f(p) = coordinate `nu` of endpoint(p), as a 1×1 matrix.
PathFunctional endpoint_coordinate_functional(int nu);
PathFunctional constant_functional(Matrix value);

/// Family of paths y ↦ Φ(y) from a common base with endpoint(Φ(y)) = y,
/// defined for ‖y − center‖ ≤ radius.
struct Section {
  Point center;
  double radius = 0.0;
  std::function<Path(const Point &)> eval;

  Path operator()(const Point &y) const { return eval(y); }
};

/// Φ(y) = π · segment(endpoint(π), y).
Section transport_section(const Path &pi, double radius);

/// Φ(y) = prefix · arc(w → y), where w = endpoint(prefix) and the arc is a
/// `pieces`-segment polyline on a quarter circle from w to y, bent in the
/// (e₁, e₂) plane. Vertices depend linearly on y.
Section arc_section(const Path &prefix, const Point &center, double radius,
                    int pieces = 8);

enum class Stencil { Central, Forward };

struct FDScheme {
  std::vector<double> eps_list{1e-2, 5e-3, 2.5e-3};
  Stencil stencil = Stencil::Central;
  bool richardson = true;

  /// Throws InvalidArgument unless there are ≥ 2 strictly decreasing
  /// positive step sizes.
  void validate() const;
};

/// Raw-estimate differences below this (relative to max(1, ‖value‖)) carry
/// no usable truncation signal; the observed order is then reported as NaN.
inline constexpr double kOrderNoiseFloor = 1e-9;

struct DerivativeResult {
  Matrix value;
  /// Observed convergence order from the three finest raw estimates; NaN
  /// when the differences sit below kOrderNoiseFloor or fewer than three
  /// levels exist.
  double est_order = 0.0;
  /// Distance between the two finest estimates (extrapolated tableau when
  /// Richardson is on, raw otherwise).
  double est_error = 0.0;
  /// Bound on the rounding error carried into `value`: per-level noise of
  /// the difference quotients weighted by the extrapolation coefficients.
  double round_off = 0.0;
  /// Raw difference quotients, one per step size.
  std::vector<Matrix> estimates;
};

/// Combine per-step-size difference quotients into a DerivativeResult.
/// `noise`, when given, holds the rounding noise of each raw estimate.
DerivativeResult extrapolate(std::vector<Matrix> estimates, const FDScheme &scheme,
                             const std::vector<double> &noise = {});

/// d/dε g(ε) at ε = 0 using the scheme's stencil (central or forward).
/// `value_noise` is the absolute error of one evaluation of g on top of
/// machine rounding (nonzero when g is itself a numerical derivative).
DerivativeResult differentiate(const std::function<Matrix(double)> &g,
                               const FDScheme &scheme, double value_noise = 0.0);

/// D_v f(π): derivative of f(π · segment(x, x + εv)), x = endpoint(π).
DerivativeResult mandelstam_derivative(const PathFunctional &f, const Path &pi,
                                       const Vector &v, const FDScheme &scheme = {});

/// D̃_v f: derivative of f(Φ(x + εv)) along the section.
DerivativeResult section_derivative(const PathFunctional &f, const Section &S,
                                    const Vector &v, const FDScheme &scheme = {});

/// δ_μ f: derivative of f(Φ(x + εe_μ) · segment(x + εe_μ, x)).
DerivativeResult connection_derivative(const PathFunctional &f, const Section &S,
                                       int mu, const FDScheme &scheme = {});

/// Δ_{u,v}(π) f(γ): mixed derivative in (ε₁, ε₂) of f(π · □ · π⁻¹ · γ) with
/// □ = parallelogram(endpoint(π), u, v, ε₁, ε₂). γ must start at the base of
/// π; it is usually a loop but an open path is accepted.
DerivativeResult loop_derivative(const PathFunctional &f, const Path &pi,
                                 const Path &gamma, const Vector &u, const Vector &v,
                                 const FDScheme &scheme = {});

/// [D_μ, D_ν] f(π) by nested Mandelstam differences.
DerivativeResult commutator_mandelstam(const PathFunctional &f, const Path &pi,
                                       int mu, int nu, const FDScheme &scheme = {});

/// Unit vector e_mu in ℝⁿ.
Vector unit_vector(int n, int mu);

} // namespace loopcalc
