#include <doctest.h>

#include <cmath>
#include <sstream>

#include "loopcalc/error.hpp"
#include "loopcalc/io.hpp"
#include "loopcalc/verify.hpp"

using namespace loopcalc;

namespace {

const Complex I_(0.0, 1.0);

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected loopcalc::Error");
  return ErrorKind::Parse;
}

// Covariant derivative of F by central differences: exact for quadratic F.
Matrix nabla_F_fd(const ConnectionField &A, const Point &x, int a, int b, int c) {
  const double h = 1e-3;
  const Vector e = unit_vector(A.dim(), a);
  const Matrix dF = (field_strength(A, x + h * e, b, c) - field_strength(A, x - h * e, b, c)) /
                    (2.0 * h);
  const Matrix Aa = eval_field(A, x, a);
  const Matrix F = field_strength(A, x, b, c);
  return dF + Aa * F - F * Aa;
}

ConnectionField u1_uniform_3d(double B) {
  const int n = 3;
  std::vector<Matrix> lin(n * n, Matrix::Zero(1, 1));
  lin[0 * n + 1](0, 0) = -I_ * B / 2.0;
  lin[1 * n + 0](0, 0) = I_ * B / 2.0;
  return ConnectionField(GroupTag::u1(), n, {}, lin);
}

std::string report_csv(const VerificationReport &r) {
  std::ostringstream os;
  io::write_report(os, r);
  return os.str();
}

} // namespace

TEST_CASE("splitmix64 reference outputs") {
  SplitMix64 zero(0);
  CHECK(zero.next() == 0xe220a8397b1dcdafULL);

  SplitMix64 rng(1234567);
  CHECK(rng.next() == 6457827717110365317ULL);
  CHECK(rng.next() == 3203168211198807973ULL);
  CHECK(rng.next() == 9817491932198370423ULL);

  SplitMix64 a(9), b(9);
  const std::uint64_t raw = a.next();
  CHECK(b.uniform01() == static_cast<double>(raw >> 11) * 0x1.0p-53);

  SplitMix64 r(5);
  for (int k = 0; k < 1000; ++k) {
    const int v = r.uniform_int(-2, 3);
    CHECK(v >= -2);
    CHECK(v <= 3);
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("random paths are deterministic and respect their settings") {
  RandomSpec spec;
  spec.seed = 99;
  spec.dim = 3;
  spec.box = 0.5;
  CHECK(random_path(spec, false) == random_path(spec, false));
  spec.seed = 100;
  const Path other = random_path(spec, false);
  spec.seed = 99;
  CHECK_FALSE(random_path(spec, false) == other);

  SplitMix64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Path p = random_path(rng, spec, k % 2 == 0);
    CHECK(p.dim() == 3);
    CHECK(p.is_closed() == (k % 2 == 0));
    CHECK(p.segment_count() >= spec.min_vertices - (k % 2 == 0 ? 0 : 1));
    CHECK(p.segment_count() <= spec.max_vertices);
    CHECK(p.base().cwiseAbs().maxCoeff() <= spec.box);
    for (const Point &v : p.vertices()) CHECK(v.cwiseAbs().maxCoeff() <= spec.box);
  }

  const Point b = Point::Constant(3, 0.25);
  const Path from_b = random_path(rng, spec, true, b);
  CHECK(from_b.base() == b);
  CHECK(from_b.endpoint() == b);
}

TEST_CASE("random affine fields live in the algebra") {
  SplitMix64 rng(3);
  for (const GroupTag &tag : {GroupTag::u1(), GroupTag::su2(), GroupTag::gl(3)}) {
    const auto A = random_affine_field(rng, tag, 3, 0.2);
    const Point x = Point::Constant(3, 0.3);
    for (int mu = 0; mu < 3; ++mu) CHECK(is_algebra_element(tag, eval_field(A, x, mu)));
  }
}

TEST_CASE("bianchi_analytic") {
  const Point x = (Point(3) << 0.2, -0.4, 0.7).finished();
  CHECK(bianchi_analytic(zero_field(GroupTag::su2(), 3), x, 0, 1, 2) == 0.0);

  // Constant field: the identity reduces to the Jacobi identity.
  const ConnectionField constant(GroupTag::su2(), 3,
                                 {0.3 * I_ * pauli(1), 0.7 * I_ * pauli(2), -0.2 * I_ * pauli(3)},
                                 {});
  CHECK(bianchi_analytic(constant, x, 0, 1, 2) <= 1e-15);

  SplitMix64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const GroupTag tag = k % 2 == 0 ? GroupTag::su2() : GroupTag::gl(2);
    const auto A = random_affine_field(rng, tag, 3, 0.5);
    RandomSpec spec;
    spec.dim = 3;
    const Point y = random_point(rng, spec);
    CHECK(bianchi_analytic(A, y, 0, 1, 2) <= 1e-12);
    // Independent finite-difference check of the cyclic sum.
    const Matrix fd = nabla_F_fd(A, y, 0, 1, 2) + nabla_F_fd(A, y, 1, 2, 0) +
                      nabla_F_fd(A, y, 2, 0, 1);
    CHECK(fd.norm() <= 1e-9);
  }

  const auto A2 = u1_uniform_field(1.0);
  CHECK(kind_of([&] { bianchi_analytic(A2, Point::Zero(2), 0, 1, 0); }) ==
        ErrorKind::DimTooSmall);
  CHECK(kind_of([&] { bianchi_analytic(constant, x, 0, 1, 3); }) ==
        ErrorKind::IndexOutOfRange);
}

TEST_CASE("bianchi_numeric") {
  RandomSpec spec;
  spec.dim = 3;
  spec.seed = 4;
  const Path pi = random_path(spec, false);
  CHECK(bianchi_numeric(zero_field(GroupTag::su2(), 3), pi, 0, 1, 2) <= 1e-10);
  CHECK(bianchi_numeric(u1_uniform_3d(1.0), pi, 0, 1, 2) <= 1e-6);
  CHECK(bianchi_numeric(su2_reference_field(), pi, 0, 1, 2) <= 1e-2);
  CHECK(kind_of([&] {
          bianchi_numeric(u1_uniform_field(1.0), random_path(RandomSpec{}, false), 0, 1, 0);
        }) == ErrorKind::DimTooSmall);
}

TEST_CASE("Tolerances::set") {
  Tolerances t;
  CHECK(t.set("curvature", 0.5));
  CHECK(t.curvature == 0.5);
  CHECK(t.set("mandelstam_order_max", 3.0));
  CHECK(t.mandelstam_order_max == 3.0);
  CHECK_FALSE(t.set("no_such_identity", 1.0));
  CHECK(SampleCounts::uniform(4).commutator == 4);
}

TEST_CASE("identity suite on the zero field") {
  RandomSpec spec;
  spec.dim = 3;
  const auto report = run_identity_suite(zero_field(GroupTag::su2(), 3), spec, {}, {},
                                         SampleCounts::uniform(3));
  CHECK(report.pass());
  CHECK(report.records.size() == 12);
  for (const auto &r : report.records) {
    CHECK(r.samples > 0);
    if (r.identity != "chart_independence" && r.identity != "antisymmetry")
      CHECK(r.max_error <= 1e-10);
  }
}

TEST_CASE("identity suite on a uniform U(1) field") {
  const auto A = u1_uniform_field(1.0);
  const auto report = run_identity_suite(A, RandomSpec{}, {}, {}, SampleCounts::uniform(5));
  CHECK(report.pass());
  // Two-dimensional field: Bianchi rows are skipped with a note.
  CHECK(report.find("bianchi_analytic") == nullptr);
  CHECK_FALSE(report.notes.empty());
  // The curvature is the constant iB everywhere.
  CHECK(std::abs(field_strength(A, Point::Zero(2), 0, 1)(0, 0) - I_) < 1e-15);
  CHECK(std::abs(field_strength(A, Point::Constant(2, 0.7), 0, 1)(0, 0) - I_) < 1e-15);
}

TEST_CASE("identity suite on the su(2) reference field") {
  RandomSpec spec;
  spec.dim = 3;
  const auto report = run_identity_suite(su2_reference_field(), spec);
  for (const auto &r : report.records) {
    INFO(r.identity << " max=" << r.max_error << " tol=" << r.tolerance);
    CHECK(r.pass);
  }
  const auto *m = report.find("mandelstam");
  REQUIRE(m != nullptr);
  CHECK(m->samples == 20);
  CHECK(m->observed_order >= 1.8);
  CHECK(m->observed_order <= 2.2);

  // Same seed, byte-identical report.
  CHECK(report_csv(report) == report_csv(run_identity_suite(su2_reference_field(), spec)));

  // A zero curvature tolerance cannot be met by a non-abelian field.
  Tolerances strict;
  strict.curvature = 0.0;
  const auto failing = run_identity_suite(su2_reference_field(), spec, {}, strict,
                                          SampleCounts::uniform(2));
  CHECK_FALSE(failing.pass());
  CHECK_FALSE(failing.find("curvature")->pass);
}

TEST_CASE("identity suite argument checks") {
  RandomSpec spec;
  spec.dim = 2;
  CHECK(kind_of([&] { run_identity_suite(su2_reference_field(), spec); }) ==
        ErrorKind::DimMismatch);
  spec.dim = 1;
  const ConnectionField line(GroupTag::u1(), 1);
  CHECK(kind_of([&] { run_identity_suite(line, spec); }) == ErrorKind::DimTooSmall);
}
