#include "loopcalc/gauge.hpp"

#include <cmath>

#include <fmt/format.h>

#include "loopcalc/error.hpp"

namespace loopcalc {

namespace {

const Complex I_(0.0, 1.0);

Matrix commutator(const Matrix &X, const Matrix &Y) { return X * Y - Y * X; }

} // namespace

Matrix pauli(int k) {
  Matrix s = Matrix::Zero(2, 2);
  switch (k) {
  case 1:
    s(0, 1) = 1.0;
    s(1, 0) = 1.0;
    break;
  case 2:
    s(0, 1) = -I_;
    s(1, 0) = I_;
    break;
  case 3:
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
    break;
  default:
    throw Error(ErrorKind::IndexOutOfRange, fmt::format("pauli: no sigma_{}", k));
  }
  return s;
}

bool is_algebra_element(const GroupTag &tag, const Matrix &X, double tol) {
  if (X.rows() != tag.d || X.cols() != tag.d)
    return false;
  if (!tag.is_unitary())
    return true;
  const double scale = std::max(X.norm(), 1.0);
  if ((X + X.adjoint()).norm() > tol * scale)
    return false;
  if (tag.kind == GroupKind::SU2 && std::abs(X.trace()) > tol * scale)
    return false;
  return true;
}

bool is_group_element(const GroupTag &tag, const Matrix &U, double tol) {
  if (U.rows() != tag.d || U.cols() != tag.d)
    return false;
  if (!tag.is_unitary())
    return Eigen::FullPivLU<Matrix>(U).isInvertible();
  const Matrix id = Matrix::Identity(tag.d, tag.d);
  if ((U.adjoint() * U - id).norm() > tol)
    return false;
  if (tag.kind == GroupKind::SU2 && std::abs(U.determinant() - 1.0) > tol)
    return false;
  return true;
}

Matrix project_to_group(const GroupTag &tag, const Matrix &M) {
  switch (tag.kind) {
  case GroupKind::GL:
    return M;
  case GroupKind::U1: {
    Matrix out(1, 1);
    out(0, 0) = M(0, 0) / std::abs(M(0, 0));
    return out;
  }
  case GroupKind::SU2: {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix U = svd.matrixU() * svd.matrixV().adjoint();
    U /= std::sqrt(U.determinant());
    return U;
  }
  }
  return M;
}

ConnectionField::ConnectionField(GroupTag tag, int dim)
    : ConnectionField(tag, dim, {}, {}) {}

ConnectionField::ConnectionField(GroupTag tag, int dim, std::vector<Matrix> constant,
                                 std::vector<Matrix> linear, double algebra_tol)
    : tag_(tag), dim_(dim), constant_(std::move(constant)), linear_(std::move(linear)) {
  if (dim_ < 1)
    throw Error(ErrorKind::DimMismatch, "connection field: dimension must be >= 1");
  if (tag_.d < 1)
    throw Error(ErrorKind::ShapeMismatch, "connection field: matrix size must be >= 1");
  const auto n = static_cast<std::size_t>(dim_);
  const Matrix zero = Matrix::Zero(tag_.d, tag_.d);
  if (constant_.empty())
    constant_.assign(n, zero);
  if (linear_.empty())
    linear_.assign(n * n, zero);
  if (constant_.size() != n || linear_.size() != n * n)
    throw Error(ErrorKind::ShapeMismatch,
                "connection field: coefficient count does not match dimension");
  auto check = [&](const Matrix &M, const char *which) {
    if (M.rows() != tag_.d || M.cols() != tag_.d)
      throw Error(ErrorKind::ShapeMismatch,
                  fmt::format("connection field: {} matrix is {}x{}, expected {}x{}",
                              which, M.rows(), M.cols(), tag_.d, tag_.d));
    if (!is_algebra_element(tag_, M, algebra_tol))
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("connection field: {} matrix is not in the Lie algebra",
                              which));
  };
  for (const auto &M : constant_)
    check(M, "C");
  for (const auto &M : linear_)
    check(M, "D");
}

void ConnectionField::check_index(int mu) const {
  if (mu < 0 || mu >= dim_)
    throw Error(ErrorKind::IndexOutOfRange,
                fmt::format("direction index {} outside [0, {})", mu, dim_));
}

const Matrix &ConnectionField::constant(int mu) const {
  check_index(mu);
  return constant_[static_cast<std::size_t>(mu)];
}

const Matrix &ConnectionField::linear(int mu, int nu) const {
  check_index(mu);
  check_index(nu);
  return linear_[static_cast<std::size_t>(mu * dim_ + nu)];
}

Matrix ConnectionField::eval(const Point &x, int mu) const {
  check_index(mu);
  if (x.size() != dim_)
    throw Error(ErrorKind::DimMismatch,
                fmt::format("field evaluated at a {}-dimensional point, field dim {}",
                            x.size(), dim_));
  Matrix out = constant_[static_cast<std::size_t>(mu)];
  for (int nu = 0; nu < dim_; ++nu)
    out += x[nu] * linear_[static_cast<std::size_t>(mu * dim_ + nu)];
  return out;
}

Matrix eval_field(const ConnectionField &A, const Point &x, int mu) {
  return A.eval(x, mu);
}

namespace {

// Transport across one straight segment a → b. Along it the integrand
// A_μ(a + s(b − a))(b − a)^μ is affine in s: M(s) = M0 + s·M1.
Matrix segment_propagator(const ConnectionField &A, const Point &a, const Point &b,
                          const IntegratorOptions &opts) {
  const int n = A.dim();
  const int d = A.matrix_size();
  const Vector dir = b - a;
  Matrix M0 = Matrix::Zero(d, d);
  Matrix M1 = Matrix::Zero(d, d);
  for (int mu = 0; mu < n; ++mu) {
    if (dir[mu] == 0.0)
      continue;
    M0 += dir[mu] * A.eval(a, mu);
    for (int nu = 0; nu < n; ++nu)
      M1 += (dir[mu] * dir[nu]) * A.linear(mu, nu);
  }

  const bool project = opts.reunitarize && A.group().is_unitary();
  const double h = 1.0 / opts.steps_per_segment;
  Matrix P = Matrix::Identity(d, d);
  for (int step = 0; step < opts.steps_per_segment; ++step) {
    const double s = step * h;
    const Matrix m_start = M0 + s * M1;
    const Matrix m_mid = M0 + (s + 0.5 * h) * M1;
    const Matrix m_end = M0 + (s + h) * M1;
    const Matrix k1 = P * m_start;
    const Matrix k2 = (P + (0.5 * h) * k1) * m_mid;
    const Matrix k3 = (P + (0.5 * h) * k2) * m_mid;
    const Matrix k4 = (P + h * k3) * m_end;
    P += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (project)
      P = project_to_group(A.group(), P);
  }
  return P;
}

} // namespace

Matrix holonomy(const ConnectionField &A, const Path &p, const IntegratorOptions &opts) {
  if (p.dim() != A.dim())
    throw Error(ErrorKind::DimMismatch,
                fmt::format("holonomy: path dim {} vs field dim {}", p.dim(), A.dim()));
  if (opts.steps_per_segment < 1)
    throw Error(ErrorKind::InvalidArgument, "holonomy: steps_per_segment must be >= 1");
  const int d = A.matrix_size();
  const bool project = opts.reunitarize && A.group().is_unitary();
  Matrix W = Matrix::Identity(d, d);
  for (std::size_t i = 0; i < p.segment_count(); ++i) {
    W = W * segment_propagator(A, p.segment_start(i), p.segment_end(i), opts);
    if (project)
      W = project_to_group(A.group(), W);
  }
  return W;
}

Matrix field_strength(const ConnectionField &A, const Point &x, int mu, int nu) {
  // ∂_μ A_ν = D_{νμ} for an affine field.
  const Matrix Amu = A.eval(x, mu);
  const Matrix Anu = A.eval(x, nu);
  return A.linear(nu, mu) - A.linear(mu, nu) + commutator(Amu, Anu);
}

double algebra_distance(const Matrix &X, const Matrix &Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols())
    throw Error(ErrorKind::ShapeMismatch,
                fmt::format("algebra_distance: {}x{} vs {}x{}", X.rows(), X.cols(),
                            Y.rows(), Y.cols()));
  return (X - Y).norm();
}

double relative_error(const Matrix &a, const Matrix &b) {
  const double diff = algebra_distance(a, b);
  const double scale = b.norm();
  return scale > 1e-12 ? diff / scale : diff;
}

ConnectionField zero_field(GroupTag tag, int dim) { return ConnectionField(tag, dim); }

ConnectionField u1_uniform_field(double B) {
  const auto tag = GroupTag::u1();
  std::vector<Matrix> linear(4, Matrix::Zero(1, 1));
  linear[0 * 2 + 1](0, 0) = Complex(0.0, -0.5 * B);
  linear[1 * 2 + 0](0, 0) = Complex(0.0, 0.5 * B);
  return ConnectionField(tag, 2, {}, std::move(linear));
}

ConnectionField su2_reference_field() {
  const Matrix t1 = I_ * pauli(1);
  const Matrix t2 = I_ * pauli(2);
  const Matrix t3 = I_ * pauli(3);
  std::vector<Matrix> constant = {
      0.075 * t1 + 0.025 * t3,
      0.1 * t2 - 0.05 * t1,
      0.0625 * t3 + 0.0375 * t2,
  };
  // linear[μ·3 + ν] = D_{μν}
  std::vector<Matrix> linear = {
      0.025 * t2,                 0.0875 * t2 - 0.025 * t3, 0.05 * t3 + 0.0125 * t1,
      -0.0625 * t3 + 0.0375 * t1, 0.025 * t1,               0.075 * t1 - 0.05 * t2,
      0.0375 * t2 + 0.05 * t1,    -0.075 * t2 + 0.025 * t3, 0.0125 * t2,
  };
  return ConnectionField(GroupTag::su2(), 3, std::move(constant), std::move(linear));
}

} // namespace loopcalc
