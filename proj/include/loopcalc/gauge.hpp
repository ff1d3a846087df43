#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "loopcalc/paths.hpp"

namespace loopcalc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

enum class GroupKind { U1, SU2, GL };

/// Matrix group of a connection: U(1) (d = 1), SU(2) (d = 2) or GL(d).
struct GroupTag {
  GroupKind kind = GroupKind::GL;
  int d = 1;

  static GroupTag u1() { return {GroupKind::U1, 1}; }
  static GroupTag su2() { return {GroupKind::SU2, 2}; }
  static GroupTag gl(int d) { return {GroupKind::GL, d}; }

  bool is_unitary() const noexcept { return kind != GroupKind::GL; }
  friend bool operator==(const GroupTag &, const GroupTag &) = default;
};

/// Pauli matrix σ_k, k ∈ {1, 2, 3}.
Matrix pauli(int k);

/// Does X lie in the Lie algebra of `tag`? Anti-Hermitian for u1/su2,
/// additionally trace-free for su2. The tolerance is relative to ‖X‖_F.
bool is_algebra_element(const GroupTag &tag, const Matrix &X, double tol = 1e-12);

/// Unitarity (and det = 1 for su2) within `tol` in Frobenius norm;
/// invertibility for gl.
bool is_group_element(const GroupTag &tag, const Matrix &U, double tol = 1e-10);

/// Nearest group element: polar factor for u1/su2 with the determinant
/// phase removed for su2. Identity map for gl.
Matrix project_to_group(const GroupTag &tag, const Matrix &M);

/// Affine gauge potential A_μ(x) = C_μ + Σ_ν D_{μν} x^ν on ℝⁿ.
/// Direction indices are 0-based in this API.
class ConnectionField {
public:
  /// Zero field.
  ConnectionField(GroupTag tag, int dim);
  /// `constant` has n entries, `linear` has n·n entries in row-major
  /// (μ, ν) order. Throws ShapeMismatch or InvalidArgument when a matrix
  /// has the wrong shape or leaves the algebra (tolerance `algebra_tol`).
  ConnectionField(GroupTag tag, int dim, std::vector<Matrix> constant,
                  std::vector<Matrix> linear, double algebra_tol = 1e-12);

  const GroupTag &group() const noexcept { return tag_; }
  int dim() const noexcept { return dim_; }
  int matrix_size() const noexcept { return tag_.d; }

  const Matrix &constant(int mu) const;
  const Matrix &linear(int mu, int nu) const;

  Matrix eval(const Point &x, int mu) const;

private:
  void check_index(int mu) const;

  GroupTag tag_;
  int dim_;
  std::vector<Matrix> constant_;
  std::vector<Matrix> linear_;
};

struct IntegratorOptions {
  int steps_per_segment = 64;
  /// Project back onto the group after every substep. Ignored for gl.
  bool reunitarize = true;
};

Matrix eval_field(const ConnectionField &A, const Point &x, int mu);

/// Path-ordered transport W solving dW/ds = W·A_μ(x(s))·ẋ^μ, W(0) = I, with
/// fixed-step classical RK4 on every polyline segment. W(α·β) = W(α)·W(β).
Matrix holonomy(const ConnectionField &A, const Path &p,
                const IntegratorOptions &opts = {});

/// F_{μν}(x) = ∂_μA_ν − ∂_νA_μ + [A_μ, A_ν], exact for affine fields.
Matrix field_strength(const ConnectionField &A, const Point &x, int mu, int nu);

/// Frobenius distance ‖X − Y‖_F.
double algebra_distance(const Matrix &X, const Matrix &Y);

/// ‖a − b‖ / ‖b‖, falling back to the absolute error when ‖b‖ ≤ 1e-12.
double relative_error(const Matrix &a, const Matrix &b);

// Reference fields shipped with the toolkit.
ConnectionField zero_field(GroupTag tag, int dim);
/// U(1) uniform magnetic field B in the symmetric gauge on ℝ², F₁₂ = iB.
ConnectionField u1_uniform_field(double B);
/// Non-abelian affine SU(2) field on ℝ³ used by the verification suite.
ConnectionField su2_reference_field();

} // namespace loopcalc
