#include <doctest.h>

#include <cmath>

#include "loopcalc/calculus.hpp"
#include "loopcalc/error.hpp"
#include "loopcalc/verify.hpp"

using namespace loopcalc;

namespace {

const Complex I_(0.0, 1.0);

Point P(double x, double y) { return (Point(2) << x, y).finished(); }
Point P3(double x, double y, double z) { return (Point(3) << x, y, z).finished(); }

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected loopcalc::Error");
  return ErrorKind::Parse;
}

Path sample_path_3d(std::uint64_t seed) {
  RandomSpec spec;
  spec.seed = seed;
  spec.dim = 3;
  return random_path(spec, false);
}

ConnectionField su2_constant_field() {
  return ConnectionField(GroupTag::su2(), 2, {0.3 * I_ * pauli(1), 0.4 * I_ * pauli(2)}, {});
}

} // namespace

TEST_CASE("FD scheme validation") {
  FDScheme s;
  CHECK_NOTHROW(s.validate());
  s.eps_list = {1e-2};
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
  s.eps_list = {1e-2, 2e-2};
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
  s.eps_list = {1e-2, 1e-2};
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
  s.eps_list = {1e-2, -1e-3};
  CHECK(kind_of([&] { s.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("differentiate: Richardson and observed order on a scalar function") {
  auto g = [](double e) { return Matrix::Constant(1, 1, Complex(std::sin(1.0 + e), 0)); };
  const double exact = std::cos(1.0);

  FDScheme plain;
  plain.richardson = false;
  const auto raw = differentiate(g, plain);
  CHECK(raw.est_order == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::abs(raw.value(0, 0).real() - exact) == doctest::Approx(exact * 2.5e-3 * 2.5e-3 / 6).epsilon(0.01));

  const auto rich = differentiate(g, FDScheme{});
  CHECK(std::abs(rich.value(0, 0).real() - exact) < 1e-12);
  CHECK(rich.est_error < 1e-9);
  CHECK(rich.round_off > 0.0);

  FDScheme fwd;
  fwd.stencil = Stencil::Forward;
  fwd.richardson = false;
  const auto forward = differentiate(g, fwd);
  CHECK(forward.est_order == doctest::Approx(1.0).epsilon(0.02));
  fwd.richardson = true;
  CHECK(std::abs(differentiate(g, fwd).value(0, 0).real() - exact) < 1e-7);

  // Non-geometric step list still extrapolates.
  FDScheme odd;
  odd.eps_list = {2e-2, 7e-3, 3e-3, 1e-3};
  CHECK(std::abs(differentiate(g, odd).value(0, 0).real() - exact) < 1e-12);
}

TEST_CASE("mandelstam_derivative") {
  const Path pi(P(0.1, 0.2), {P(0.5, -0.3), P(0.9, 0.4)});

  const auto c = mandelstam_derivative(constant_functional(pauli(2)), pi, P(1, 0));
  CHECK(c.value.isZero(0.0));
  CHECK(c.est_error <= 1e-12);

  for (int nu = 0; nu < 2; ++nu)
    for (int mu = 0; mu < 2; ++mu) {
      const auto d = mandelstam_derivative(endpoint_coordinate_functional(nu), pi,
                                           unit_vector(2, mu));
      CHECK(std::abs(d.value(0, 0) - Complex(mu == nu ? 1.0 : 0.0)) < 1e-12);
    }

  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  const Path pi3 = sample_path_3d(3);
  for (int mu = 0; mu < 3; ++mu) {
    const auto d = mandelstam_derivative(W, pi3, unit_vector(3, mu));
    const Matrix oracle = holonomy(A, pi3) * eval_field(A, pi3.endpoint(), mu);
    CHECK(relative_error(d.value, oracle) <= 1e-6);
    CHECK(d.est_order >= 1.8);
    CHECK(d.est_order <= 2.2);
  }

  CHECK(kind_of([&] { mandelstam_derivative(W, pi3, Vector::Zero(3)); }) ==
        ErrorKind::ZeroDirection);
}

TEST_CASE("mandelstam derivative is linear in the direction") {
  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  const Path pi = sample_path_3d(8);
  const Vector v = P3(0.3, -0.7, 0.2);
  const Vector w = P3(-0.5, 0.1, 0.9);
  const auto dv = mandelstam_derivative(W, pi, v);
  const auto dw = mandelstam_derivative(W, pi, w);
  const auto dsum = mandelstam_derivative(W, pi, 2.0 * v - 3.0 * w);
  CHECK(algebra_distance(dsum.value, 2.0 * dv.value - 3.0 * dw.value) < 1e-10);
}

TEST_CASE("mandelstam derivative does not depend on the probe curve") {
  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  const Path pi = sample_path_3d(21);
  const Point x = pi.endpoint();
  const Vector v = P3(0.4, 0.6, -0.3);
  const Vector bend = P3(0.8, -0.5, 0.7);
  const auto straight = mandelstam_derivative(W, pi, v);
  // Three-piece polyline along α(s) = x + s·v + s²·bend.
  const auto curved = differentiate(
      [&](double eps) {
        std::vector<Point> vs = pi.vertices();
        for (int k = 1; k <= 3; ++k) {
          const double t = eps * k / 3.0;
          vs.push_back(x + t * v + t * t * bend);
        }
        return W(Path(pi.base(), vs));
      },
      FDScheme{});
  CHECK(algebra_distance(straight.value, curved.value) <=
        10.0 * (straight.est_error + curved.est_error) + straight.round_off +
            curved.round_off);
}

TEST_CASE("section_derivative") {
  const Point o = P(0, 0);
  const Section ray{P(0.4, 0.3), 0.5, [o](const Point &y) { return segment(o, y); }};
  for (int nu = 0; nu < 2; ++nu)
    for (int mu = 0; mu < 2; ++mu) {
      const auto d =
          section_derivative(endpoint_coordinate_functional(nu), ray, unit_vector(2, mu));
      CHECK(std::abs(d.value(0, 0) - Complex(mu == nu ? 1.0 : 0.0)) < 1e-12);
    }
  CHECK(section_derivative(constant_functional(pauli(1)), ray, P(1, 1)).value.isZero(0.0));

  const Section tiny{P(0.4, 0.3), 1e-3, ray.eval};
  CHECK(kind_of([&] {
          section_derivative(endpoint_coordinate_functional(0), tiny, P(1, 0));
        }) == ErrorKind::RadiusExceeded);
  CHECK(kind_of([&] {
          section_derivative(endpoint_coordinate_functional(0), ray, P(0, 0));
        }) == ErrorKind::ZeroDirection);
}

TEST_CASE("arc section ends at its argument") {
  const Path prefix(P(0, 0), {P(0.5, 0.5)});
  const Section S = arc_section(prefix, P(0.8, 0.1), 0.3);
  for (const Point &y : {P(0.8, 0.1), P(0.9, 0.2), P(0.5, 0.5)}) {
    const Path p = S(y);
    CHECK(p.endpoint() == y);
    CHECK(p.segment_count() == 1 + 8);
  }
  // Arc is genuinely bent: interior vertices leave the chord.
  const Path p = S(P(0.8, 0.1));
  const Vector chord = P(0.3, -0.4);
  const Vector off = p.vertices()[4] - P(0.5, 0.5);
  CHECK(std::abs(chord[0] * off[1] - chord[1] * off[0]) > 1e-2);
}

TEST_CASE("connection_derivative") {
  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  const Path pi = sample_path_3d(5);

  const Section transport = transport_section(pi, 0.5);
  for (int mu = 0; mu < 3; ++mu)
    CHECK(connection_derivative(W, transport, mu).value.norm() <= 1e-10);
  CHECK(connection_derivative(constant_functional(pauli(3)), transport, 1).value.isZero(0.0));

  // Curved section: δ_μ = D̃_{e_μ} − W(π)·A_μ(x), each side computed on its own.
  const Path prefix = sample_path_3d(6);
  const Point x = P3(0.2, -0.3, 0.4);
  const Section arc = arc_section(prefix, x, 0.5);
  for (int mu = 0; mu < 3; ++mu) {
    const auto delta = connection_derivative(W, arc, mu);
    const auto total = section_derivative(W, arc, unit_vector(3, mu));
    const Matrix horizontal = holonomy(A, arc(x)) * eval_field(A, x, mu);
    CHECK(algebra_distance(delta.value, total.value - horizontal) <= 1e-6);
    // Nonzero for a bent section.
    CHECK(delta.value.norm() > 1e-3);
  }

  CHECK(kind_of([&] { connection_derivative(W, transport, 3); }) ==
        ErrorKind::IndexOutOfRange);
  const Section small = transport_section(pi, 1e-3);
  CHECK(kind_of([&] { connection_derivative(W, small, 0); }) == ErrorKind::RadiusExceeded);
}

TEST_CASE("decomposition of the section derivative") {
  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  SplitMix64 rng(77);
  RandomSpec spec;
  spec.dim = 3;
  for (int trial = 0; trial < 4; ++trial) {
    const Path prefix = random_path(rng, spec, false);
    const Point x = random_point(rng, spec);
    const Vector v = 0.5 * random_point(rng, spec);
    const Section S = arc_section(prefix, x, 0.5);
    const auto total = section_derivative(W, S, v);
    Matrix split = Matrix::Zero(2, 2);
    double budget = total.est_error;
    for (int mu = 0; mu < 3; ++mu) {
      const auto D = mandelstam_derivative(W, S(x), unit_vector(3, mu));
      const auto delta = connection_derivative(W, S, mu);
      split += v[mu] * (D.value + delta.value);
      budget += std::abs(v[mu]) * (D.est_error + delta.est_error);
    }
    CHECK(algebra_distance(total.value, split) <= std::max(1e-6, 10.0 * budget));
  }
}

TEST_CASE("loop_derivative") {
  const FDScheme scheme;
  const Point o = P(0, 0);
  const auto zero = holonomy_functional(zero_field(GroupTag::su2(), 2));
  CHECK(loop_derivative(zero, Path::constant(o), Path::constant(o), P(1, 0), P(0, 1))
            .value.isZero(0.0));

  const auto u1 = u1_uniform_field(1.0);
  const auto Wu = holonomy_functional(u1);
  const auto d = loop_derivative(Wu, Path::constant(o), Path::constant(o), P(1, 0), P(0, 1));
  CHECK(std::abs(d.value(0, 0) - I_) < 1e-10);
  CHECK(relative_error(d.value, field_strength(u1, o, 0, 1)) < 1e-10);

  const auto su2 = su2_constant_field();
  const auto Ws = holonomy_functional(su2);
  const Path pi(o, {P(0.3, 0.1), P(-0.2, 0.6)});
  const Path gamma(o, {P(0.5, 0.0), P(0.2, -0.4), o});
  const auto ds = loop_derivative(Ws, pi, gamma, P(1, 0), P(0, 1));
  const Matrix Wpi = holonomy(su2, pi);
  const Matrix rhs = Wpi * field_strength(su2, pi.endpoint(), 0, 1) * Wpi.inverse() *
                     holonomy(su2, gamma);
  CHECK(relative_error(ds.value, rhs) <= 1e-6);
  CHECK(ds.est_order >= 1.8);

  // Antisymmetric under u ↔ v.
  const auto rev = loop_derivative(Ws, pi, gamma, P(0, 1), P(1, 0));
  CHECK((ds.value + rev.value).norm() <=
        ds.est_error + rev.est_error + ds.round_off + rev.round_off);

  // The forward stencil is first order.
  FDScheme fwd;
  fwd.stencil = Stencil::Forward;
  fwd.richardson = false;
  const auto f1 = loop_derivative(Ws, pi, gamma, P(1, 0), P(0, 1), fwd);
  CHECK(f1.est_order == doctest::Approx(1.0).epsilon(0.1));
  CHECK(relative_error(f1.value, rhs) > relative_error(ds.value, rhs));

  CHECK(kind_of([&] { loop_derivative(Ws, pi, gamma, P(1, 0), P(2, 0)); }) ==
        ErrorKind::DependentDirections);
  CHECK(kind_of([&] { loop_derivative(Ws, pi, gamma, P(0, 0), P(0, 1)); }) ==
        ErrorKind::ZeroDirection);
  CHECK(kind_of([&] {
          loop_derivative(Ws, pi, Path::constant(P(1, 1)), P(1, 0), P(0, 1));
        }) == ErrorKind::EndpointMismatch);
}

TEST_CASE("commutator of Mandelstam derivatives equals the loop derivative") {
  const Point o = P(0, 0);
  const auto zero = holonomy_functional(zero_field(GroupTag::su2(), 2));
  const Path pi(o, {P(0.3, 0.1), P(-0.2, 0.6)});
  CHECK(commutator_mandelstam(zero, pi, 0, 1).value.isZero(0.0));

  const auto u1 = u1_uniform_field(1.0);
  const auto Wu = holonomy_functional(u1);
  const auto cu = commutator_mandelstam(Wu, pi, 0, 1);
  CHECK(relative_error(cu.value, I_ * holonomy(u1, pi)) <= 1e-3);
  CHECK(relative_error(cu.value, loop_derivative(Wu, pi, pi, P(1, 0), P(0, 1)).value) <= 1e-3);

  const auto A = su2_reference_field();
  const auto W = holonomy_functional(A);
  const Path pi3 = sample_path_3d(12);
  for (auto [mu, nu] : {std::pair{0, 1}, std::pair{2, 0}}) {
    const auto c = commutator_mandelstam(W, pi3, mu, nu);
    const auto l = loop_derivative(W, pi3, pi3, unit_vector(3, mu), unit_vector(3, nu));
    CHECK(relative_error(c.value, l.value) <= 1e-3);
  }
  CHECK(kind_of([&] { commutator_mandelstam(W, pi3, 0, 3); }) == ErrorKind::IndexOutOfRange);
  CHECK(kind_of([&] { commutator_mandelstam(W, pi3, 1, 1); }) ==
        ErrorKind::DependentDirections);
}
