#include "loopcalc/calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "loopcalc/error.hpp"

namespace loopcalc {

namespace {

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

void require_direction(const Vector &v, int dim, const char *what) {
  if (v.size() != dim)
    throw Error(ErrorKind::DimMismatch,
                fmt::format("{}: direction has dim {}, expected {}", what, v.size(), dim));
  if (v.isZero(0.0))
    throw Error(ErrorKind::ZeroDirection, fmt::format("{}: zero direction", what));
}

void require_index(int mu, int dim, const char *what) {
  if (mu < 0 || mu >= dim)
    throw Error(ErrorKind::IndexOutOfRange,
                fmt::format("{}: direction index {} outside [0, {})", what, mu, dim));
}

// Power of ε in the truncation error expansion of the stencil.
double error_power(const FDScheme &scheme) {
  return scheme.stencil == Stencil::Central ? 2.0 : 1.0;
}

// Rounding noise of one functional evaluation: a few ulps of its magnitude,
// allowing for accumulation along long transport products.
constexpr double kEvalNoiseUlps = 8.0;

double eval_noise(const Matrix &g, double extra) {
  return kEvalNoiseUlps * std::numeric_limits<double>::epsilon() * g.norm() + extra;
}

Path checked_section_path(const Section &S, const Point &y) {
  Path p = S(y);
  if (!same_point(p.endpoint(), y))
    throw Error(ErrorKind::EndpointMismatch, "section path does not end at its argument");
  return p;
}

void require_radius(const Section &S, const Vector &v, const FDScheme &scheme) {
  const double reach = scheme.eps_list.front() * v.norm();
  if (reach > S.radius)
    throw Error(ErrorKind::RadiusExceeded,
                fmt::format("probe reach {} exceeds section radius {}", reach, S.radius));
}

} // namespace

PathFunctional holonomy_functional(const ConnectionField &A,
                                   const IntegratorOptions &opts) {
  return {[A, opts](const Path &p) { return holonomy(A, p, opts); }, A.matrix_size(),
          A.matrix_size()};
}

PathFunctional endpoint_coordinate_functional(int nu) {
  return {[nu](const Path &p) {
            require_index(nu, p.dim(), "endpoint_coordinate");
            Matrix out(1, 1);
            out(0, 0) = p.endpoint()[nu];
            return out;
          },
          1, 1};
}

PathFunctional constant_functional(Matrix value) {
  const int r = static_cast<int>(value.rows());
  const int c = static_cast<int>(value.cols());
  return {[value = std::move(value)](const Path &) { return value; }, r, c};
}

Section transport_section(const Path &pi, double radius) {
  return {pi.endpoint(), radius,
          [pi](const Point &y) { return compose(pi, segment(pi.endpoint(), y)); }};
}

Section arc_section(const Path &prefix, const Point &center, double radius, int pieces) {
  if (pieces < 1)
    throw Error(ErrorKind::InvalidArgument, "arc_section: pieces must be >= 1");
  if (center.size() != prefix.dim())
    throw Error(ErrorKind::DimMismatch, "arc_section: center dimension");
  return {center, radius, [prefix, pieces](const Point &y) {
            const Point &w = prefix.endpoint();
            const Vector half_chord = 0.5 * (y - w);
            Vector half_normal = Vector::Zero(y.size());
            if (y.size() >= 2) {
              half_normal[0] = -half_chord[1];
              half_normal[1] = half_chord[0];
            }
            // Circle through w and y with a 90° sweep: centre z, w = z − a − b,
            // y = z + a − b.
            const Point z = w + half_chord + half_normal;
            std::vector<Point> vs = prefix.vertices();
            for (int k = 1; k < pieces; ++k) {
              const double phi = 0.5 * std::numbers::pi * k / pieces;
              vs.push_back(z - std::cos(phi) * (half_chord + half_normal) +
                           std::sin(phi) * (half_chord - half_normal));
            }
            vs.push_back(y);
            return Path(prefix.base(), std::move(vs));
          }};
}

void FDScheme::validate() const {
  if (eps_list.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "FD scheme needs at least two step sizes");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || !std::isfinite(eps_list[i]))
      throw Error(ErrorKind::InvalidArgument, "FD step sizes must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "FD step sizes must be strictly decreasing");
  }
}

DerivativeResult extrapolate(std::vector<Matrix> estimates, const FDScheme &scheme,
                             const std::vector<double> &noise) {
  const std::size_t m = estimates.size();
  if (m != scheme.eps_list.size() || m < 2)
    throw Error(ErrorKind::InvalidArgument, "extrapolate: estimate count mismatch");

  DerivativeResult result;
  const auto &eps = scheme.eps_list;

  result.est_order = nan();
  if (m >= 3) {
    const double coarse = (estimates[m - 3] - estimates[m - 2]).norm();
    const double fine = (estimates[m - 2] - estimates[m - 1]).norm();
    const double floor =
        kOrderNoiseFloor * std::max(1.0, estimates[m - 1].norm());
    if (coarse > floor && fine > floor)
      result.est_order = std::log(coarse / fine) / std::log(eps[m - 3] / eps[m - 2]);
  }

  if (!noise.empty() && noise.size() != m)
    throw Error(ErrorKind::InvalidArgument, "extrapolate: noise count mismatch");

  if (!scheme.richardson) {
    result.value = estimates[m - 1];
    result.est_error = (estimates[m - 1] - estimates[m - 2]).norm();
    result.round_off = noise.empty() ? 0.0 : noise[m - 1];
    result.estimates = std::move(estimates);
    return result;
  }

  // Neville tableau, polynomial extrapolation to zero in t = ε^p.
  const double p = error_power(scheme);
  std::vector<double> t(m);
  for (std::size_t i = 0; i < m; ++i)
    t[i] = std::pow(eps[i], p);
  // Each tableau entry is a linear combination of the raw estimates; the
  // weights (tracked alongside) propagate the per-level noise.
  std::vector<std::vector<Matrix>> T(m);
  std::vector<std::vector<Eigen::VectorXd>> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    T[i].push_back(estimates[i]);
    weights[i].push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(i)));
    for (std::size_t k = 1; k <= i; ++k) {
      const double a = t[i - k] / (t[i - k] - t[i]);
      const double b = -t[i] / (t[i - k] - t[i]);
      T[i].push_back(a * T[i][k - 1] + b * T[i - 1][k - 1]);
      weights[i].push_back(a * weights[i][k - 1] + b * weights[i - 1][k - 1]);
    }
  }
  if (!noise.empty())
    for (std::size_t i = 0; i < m; ++i)
      result.round_off += std::abs(weights[m - 1][m - 1][static_cast<Eigen::Index>(i)]) *
                          noise[i];
  result.value = T[m - 1][m - 1];
  result.est_error = (T[m - 1][m - 1] - T[m - 1][m - 2]).norm();
  result.estimates = std::move(estimates);
  return result;
}

DerivativeResult differentiate(const std::function<Matrix(double)> &g,
                               const FDScheme &scheme, double value_noise) {
  scheme.validate();
  std::vector<Matrix> raw;
  std::vector<double> noise;
  raw.reserve(scheme.eps_list.size());
  if (scheme.stencil == Stencil::Central) {
    for (double eps : scheme.eps_list) {
      const Matrix plus = g(eps);
      const Matrix minus = g(-eps);
      raw.push_back((plus - minus) / (2.0 * eps));
      noise.push_back((eval_noise(plus, value_noise) + eval_noise(minus, value_noise)) /
                      (2.0 * eps));
    }
  } else {
    const Matrix g0 = g(0.0);
    for (double eps : scheme.eps_list) {
      const Matrix ge = g(eps);
      raw.push_back((ge - g0) / eps);
      noise.push_back((eval_noise(ge, value_noise) + eval_noise(g0, value_noise)) / eps);
    }
  }
  return extrapolate(std::move(raw), scheme, noise);
}

DerivativeResult mandelstam_derivative(const PathFunctional &f, const Path &pi,
                                       const Vector &v, const FDScheme &scheme) {
  require_direction(v, pi.dim(), "mandelstam_derivative");
  const Point &x = pi.endpoint();
  return differentiate(
      [&](double eps) { return f(compose(pi, segment(x, x + eps * v))); }, scheme);
}

DerivativeResult section_derivative(const PathFunctional &f, const Section &S,
                                    const Vector &v, const FDScheme &scheme) {
  require_direction(v, static_cast<int>(S.center.size()), "section_derivative");
  scheme.validate();
  require_radius(S, v, scheme);
  return differentiate(
      [&](double eps) { return f(checked_section_path(S, S.center + eps * v)); }, scheme);
}

DerivativeResult connection_derivative(const PathFunctional &f, const Section &S,
                                       int mu, const FDScheme &scheme) {
  const int n = static_cast<int>(S.center.size());
  require_index(mu, n, "connection_derivative");
  scheme.validate();
  const Vector e = unit_vector(n, mu);
  require_radius(S, e, scheme);
  const Point &x = S.center;
  return differentiate(
      [&](double eps) {
        const Point y = x + eps * e;
        return f(compose(checked_section_path(S, y), segment(y, x)));
      },
      scheme);
}

DerivativeResult loop_derivative(const PathFunctional &f, const Path &pi,
                                 const Path &gamma, const Vector &u, const Vector &v,
                                 const FDScheme &scheme) {
  require_direction(u, pi.dim(), "loop_derivative");
  require_direction(v, pi.dim(), "loop_derivative");
  if (collinear(u, v))
    throw Error(ErrorKind::DependentDirections,
                "loop_derivative: directions are linearly dependent");
  if (gamma.dim() != pi.dim())
    throw Error(ErrorKind::DimMismatch, "loop_derivative: gamma dimension");
  if (!same_point(gamma.base(), pi.base()))
    throw Error(ErrorKind::EndpointMismatch,
                "loop_derivative: gamma must start at the base of pi");
  scheme.validate();

  const Path pi_inv = inverse(pi);
  const Point &x = pi.endpoint();
  auto g = [&](double e1, double e2) {
    const Path pieces[] = {pi, parallelogram(x, u, v, e1, e2).path(), pi_inv, gamma};
    return f(compose(pieces));
  };

  std::vector<Matrix> raw;
  std::vector<double> noise;
  raw.reserve(scheme.eps_list.size());
  if (scheme.stencil == Stencil::Central) {
    for (double eps : scheme.eps_list) {
      const Matrix pp = g(eps, eps);
      const Matrix mp = g(-eps, eps);
      const Matrix pm = g(eps, -eps);
      const Matrix mm = g(-eps, -eps);
      const double denom = 4.0 * eps * eps;
      raw.push_back((pp - mp - pm + mm) / denom);
      noise.push_back((eval_noise(pp, 0.0) + eval_noise(mp, 0.0) + eval_noise(pm, 0.0) +
                       eval_noise(mm, 0.0)) /
                      denom);
    }
  } else {
    const Matrix g0 = g(0.0, 0.0);
    for (double eps : scheme.eps_list) {
      const Matrix ge = g(eps, eps);
      raw.push_back((ge - g0) / (eps * eps));
      noise.push_back((eval_noise(ge, 0.0) + eval_noise(g0, 0.0)) / (eps * eps));
    }
  }
  return extrapolate(std::move(raw), scheme, noise);
}

DerivativeResult commutator_mandelstam(const PathFunctional &f, const Path &pi, int mu,
                                       int nu, const FDScheme &scheme) {
  const int n = pi.dim();
  require_index(mu, n, "commutator_mandelstam");
  require_index(nu, n, "commutator_mandelstam");
  if (mu == nu)
    throw Error(ErrorKind::DependentDirections, "commutator_mandelstam: mu == nu");
  scheme.validate();

  auto inner = [&](int dir) {
    const Vector e = unit_vector(n, dir);
    return PathFunctional{
        [&f, e, &scheme](const Path &p) {
          return mandelstam_derivative(f, p, e, scheme).value;
        },
        f.rows, f.cols};
  };
  // Noise of one inner derivative, taken from its value at π.
  const double inner_noise =
      2.0 * std::max(mandelstam_derivative(f, pi, unit_vector(n, mu), scheme).round_off,
                     mandelstam_derivative(f, pi, unit_vector(n, nu), scheme).round_off);
  const Point &x = pi.endpoint();
  auto outer = [&](int dir, int other) {
    const Vector e = unit_vector(n, dir);
    const PathFunctional h = inner(other);
    return differentiate(
        [&](double eps) { return h(compose(pi, segment(x, x + eps * e))); }, scheme,
        inner_noise);
  };
  // Outer differences share step sizes, so the commutator can be formed
  // level by level before extrapolating.
  const auto mu_nu = outer(mu, nu);
  const auto nu_mu = outer(nu, mu);
  std::vector<Matrix> raw;
  std::vector<double> noise;
  for (std::size_t i = 0; i < mu_nu.estimates.size(); ++i) {
    raw.push_back(mu_nu.estimates[i] - nu_mu.estimates[i]);
    noise.push_back(2.0 * inner_noise / scheme.eps_list[i]);
  }
  return extrapolate(std::move(raw), scheme, noise);
}

Vector unit_vector(int n, int mu) {
  require_index(mu, n, "unit_vector");
  Vector e = Vector::Zero(n);
  e[mu] = 1.0;
  return e;
}

} // namespace loopcalc
