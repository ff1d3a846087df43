#include "loopcalc/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "loopcalc/error.hpp"

namespace loopcalc {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int SplitMix64::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next() % span);
}

Point random_point(SplitMix64 &rng, const RandomSpec &spec) {
  Point p(spec.dim);
  for (int i = 0; i < spec.dim; ++i)
    p[i] = rng.uniform(-spec.box, spec.box);
  return p;
}

Path random_path(SplitMix64 &rng, const RandomSpec &spec, bool closed,
                 const std::optional<Point> &base) {
  Point start = base ? *base : random_point(rng, spec);
  const int count = rng.uniform_int(spec.min_vertices, spec.max_vertices);
  std::vector<Point> vs;
  vs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    vs.push_back(random_point(rng, spec));
  if (closed && !vs.empty())
    vs.back() = start;
  return Path(std::move(start), std::move(vs));
}

Path random_path(const RandomSpec &spec, bool closed) {
  SplitMix64 rng(spec.seed);
  return random_path(rng, spec, closed);
}

Matrix random_algebra_element(SplitMix64 &rng, const GroupTag &tag, double scale) {
  const Complex i(0.0, 1.0);
  switch (tag.kind) {
  case GroupKind::U1:
    return Matrix::Constant(1, 1, i * rng.uniform(-scale, scale));
  case GroupKind::SU2: {
    Matrix X = Matrix::Zero(2, 2);
    for (int k = 1; k <= 3; ++k)
      X += rng.uniform(-scale, scale) * i * pauli(k);
    return X;
  }
  case GroupKind::GL: {
    Matrix X(tag.d, tag.d);
    for (int r = 0; r < tag.d; ++r)
      for (int c = 0; c < tag.d; ++c) {
        const double re = rng.uniform(-scale, scale);
        X(r, c) = Complex(re, rng.uniform(-scale, scale));
      }
    return X;
  }
  }
  return Matrix::Zero(tag.d, tag.d);
}

ConnectionField random_affine_field(SplitMix64 &rng, const GroupTag &tag, int dim,
                                    double scale) {
  std::vector<Matrix> constant;
  std::vector<Matrix> linear;
  for (int mu = 0; mu < dim; ++mu)
    constant.push_back(random_algebra_element(rng, tag, scale));
  for (int k = 0; k < dim * dim; ++k)
    linear.push_back(random_algebra_element(rng, tag, scale));
  return ConnectionField(tag, dim, std::move(constant), std::move(linear));
}

bool Tolerances::set(const std::string &name, double value) {
  struct Entry {
    const char *name;
    double Tolerances::*field;
  };
  static constexpr Entry entries[] = {
      {"homomorphism", &Tolerances::homomorphism},
      {"inverse", &Tolerances::inverse},
      {"thin_invariance", &Tolerances::thin_invariance},
      {"mandelstam", &Tolerances::mandelstam},
      {"mandelstam_order_min", &Tolerances::mandelstam_order_min},
      {"mandelstam_order_max", &Tolerances::mandelstam_order_max},
      {"chart_independence", &Tolerances::chart_independence},
      {"decomposition_arc", &Tolerances::decomposition_arc},
      {"decomposition_transport", &Tolerances::decomposition_transport},
      {"curvature", &Tolerances::curvature},
      {"curvature_order_min", &Tolerances::curvature_order_min},
      {"antisymmetry", &Tolerances::antisymmetry},
      {"commutator", &Tolerances::commutator},
      {"bianchi_analytic", &Tolerances::bianchi_analytic},
      {"bianchi_numeric", &Tolerances::bianchi_numeric},
  };
  for (const auto &e : entries)
    if (name == e.name) {
      this->*e.field = value;
      return true;
    }
  return false;
}

SampleCounts SampleCounts::uniform(int trials) {
  return {trials, trials, trials, trials, trials, trials, trials};
}

bool VerificationReport::pass() const {
  return std::all_of(records.begin(), records.end(),
                     [](const IdentityRecord &r) { return r.pass; });
}

const IdentityRecord *VerificationReport::find(const std::string &identity) const {
  for (const auto &r : records)
    if (r.identity == identity)
      return &r;
  return nullptr;
}

namespace {

Matrix commutator(const Matrix &X, const Matrix &Y) { return X * Y - Y * X; }

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

// error / budget, with 0/0 counted as a perfect match.
double ratio(double error, double budget) {
  if (budget > 0.0)
    return error / budget;
  return error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

// Error samples for one identity, folded into a report record.
class Tally {
public:
  Tally(std::string name, double tolerance)
      : name_(std::move(name)), tolerance_(tolerance) {}

  void add(double error) { errors_.push_back(error); }
  void add_order(double order) {
    if (!std::isnan(order))
      orders_.push_back(order);
  }
  void require_order(double lo, double hi) {
    order_lo_ = lo;
    order_hi_ = hi;
  }

  IdentityRecord record() const {
    IdentityRecord r;
    r.identity = name_;
    r.samples = static_cast<int>(errors_.size());
    r.tolerance = tolerance_;
    double sum = 0.0;
    bool has_nan = false;
    for (double e : errors_) {
      has_nan = has_nan || std::isnan(e);
      r.max_error = std::max(r.max_error, e);
      sum += e;
    }
    if (has_nan)
      r.max_error = nan();
    r.mean_error = errors_.empty() ? 0.0 : sum / static_cast<double>(errors_.size());
    r.pass = !has_nan && r.max_error <= tolerance_;
    if (orders_.empty()) {
      r.observed_order = nan();
    } else {
      r.observed_order = *std::min_element(orders_.begin(), orders_.end());
      for (double p : orders_)
        if (p < order_lo_ || p > order_hi_)
          r.pass = false;
    }
    return r;
  }

private:
  std::string name_;
  double tolerance_;
  std::vector<double> errors_;
  std::vector<double> orders_;
  double order_lo_ = -std::numeric_limits<double>::infinity();
  double order_hi_ = std::numeric_limits<double>::infinity();
};

// Independent stream per identity so that changing one sample count leaves
// the other identities' samples untouched.
SplitMix64 stream_for(std::uint64_t seed, std::uint64_t identity) {
  SplitMix64 mix(seed ^ (0xd1b54a32d192ed03ULL * (identity + 1)));
  return SplitMix64(mix.next());
}

Vector random_direction(SplitMix64 &rng, const RandomSpec &spec) {
  Vector v = random_point(rng, spec);
  while (v.norm() < 0.1)
    v = random_point(rng, spec);
  return v;
}

std::vector<std::array<int, 3>> triples(int n) {
  std::vector<std::array<int, 3>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        out.push_back({a, b, c});
  return out;
}

} // namespace

double bianchi_analytic(const ConnectionField &A, const Point &x, int mu, int nu, int xi) {
  const int n = A.dim();
  if (n < 3)
    throw Error(ErrorKind::DimTooSmall, "bianchi_analytic: needs dimension >= 3");
  for (int k : {mu, nu, xi})
    if (k < 0 || k >= n)
      throw Error(ErrorKind::IndexOutOfRange,
                  fmt::format("bianchi_analytic: index {} outside [0, {})", k, n));
  if (mu == nu || nu == xi || mu == xi)
    throw Error(ErrorKind::IndexOutOfRange, "bianchi_analytic: indices must be distinct");

  // ∇_a F_{bc} = [D_{ba}, A_c] + [A_b, D_{ca}] + [A_a, F_{bc}], using
  // ∂_a A_b = D_{ba} and ∂_a of the constant part of F vanishing.
  auto covariant = [&](int a, int b, int c) {
    const Matrix Ab = A.eval(x, b);
    const Matrix Ac = A.eval(x, c);
    const Matrix Fbc = field_strength(A, x, b, c);
    return Matrix(commutator(A.linear(b, a), Ac) + commutator(Ab, A.linear(c, a)) +
                  commutator(A.eval(x, a), Fbc));
  };
  const Matrix sum = covariant(mu, nu, xi) + covariant(nu, xi, mu) + covariant(xi, mu, nu);
  return sum.norm();
}

double bianchi_numeric(const ConnectionField &A, const Path &pi, int mu, int nu, int xi,
                       const FDScheme &scheme, const IntegratorOptions &opts) {
  const int n = A.dim();
  if (n < 3)
    throw Error(ErrorKind::DimTooSmall, "bianchi_numeric: needs dimension >= 3");
  const PathFunctional W = holonomy_functional(A, opts);
  const Path gamma = Path::constant(pi.base());

  auto term = [&](int a, int b, int c) {
    const Vector eb = unit_vector(n, b);
    const Vector ec = unit_vector(n, c);
    const PathFunctional delta_bc{
        [&](const Path &p) { return loop_derivative(W, p, gamma, eb, ec, scheme).value; },
        W.rows, W.cols};
    return mandelstam_derivative(delta_bc, pi, unit_vector(n, a), scheme).value;
  };
  const Matrix sum = term(mu, nu, xi) + term(nu, xi, mu) + term(xi, mu, nu);
  return sum.norm();
}

VerificationReport run_identity_suite(const ConnectionField &A, const RandomSpec &spec_in,
                                      const FDScheme &scheme, const Tolerances &tol,
                                      const SampleCounts &counts,
                                      const IntegratorOptions &opts) {
  const int n = A.dim();
  if (n < 2)
    throw Error(ErrorKind::DimTooSmall, "identity suite: field dimension must be >= 2");
  if (spec_in.dim != n)
    throw Error(ErrorKind::DimMismatch, "identity suite: sample dim differs from field dim");
  scheme.validate();
  const RandomSpec &spec = spec_in;
  const PathFunctional W = holonomy_functional(A, opts);
  auto hol = [&](const Path &p) { return holonomy(A, p, opts); };

  VerificationReport report;

  // Group structure of the transport map.
  {
    Tally homo("homomorphism", tol.homomorphism);
    Tally inv("inverse", tol.inverse);
    Tally thin("thin_invariance", tol.thin_invariance);
    auto rng = stream_for(spec.seed, 0);
    for (int s = 0; s < counts.homomorphism; ++s) {
      const Path alpha = random_path(rng, spec, false);
      const Path beta = random_path(rng, spec, false, alpha.endpoint());
      homo.add(algebra_distance(hol(compose(alpha, beta)), hol(alpha) * hol(beta)));
      inv.add(algebra_distance(hol(inverse(alpha)), hol(alpha).inverse()));

      const Path xi = random_path(rng, spec, false, alpha.endpoint());
      const Path spur[] = {alpha, beta, inverse(beta), xi};
      thin.add(algebra_distance(hol(compose(spur)), hol(compose(alpha, xi))));
    }
    report.records.push_back(homo.record());
    report.records.push_back(inv.record());
    report.records.push_back(thin.record());
  }

  // D_μ W(π) = W(π)·A_μ(x), and independence from the probe curve.
  {
    Tally mand("mandelstam", tol.mandelstam);
    mand.require_order(tol.mandelstam_order_min, tol.mandelstam_order_max);
    Tally chart("chart_independence", tol.chart_independence);
    auto rng = stream_for(spec.seed, 1);
    for (int s = 0; s < counts.mandelstam; ++s) {
      const Path pi = random_path(rng, spec, false);
      const Point &x = pi.endpoint();
      const int mu = s % n;
      const auto D = mandelstam_derivative(W, pi, unit_vector(n, mu), scheme);
      mand.add(relative_error(D.value, hol(pi) * A.eval(x, mu)));
      mand.add_order(D.est_order);

      // Three-piece polyline through a parabola α(s) = x + s·v + s²·w.
      const Vector v = random_direction(rng, spec);
      const Vector w = random_point(rng, spec);
      const auto straight = mandelstam_derivative(W, pi, v, scheme);
      const auto curved = differentiate(
          [&](double eps) {
            std::vector<Point> vs = pi.vertices();
            for (int k = 1; k <= 3; ++k) {
              const double t = eps * k / 3.0;
              vs.push_back(x + t * v + t * t * w);
            }
            return W(Path(pi.base(), std::move(vs)));
          },
          scheme);
      const double budget = 10.0 * (straight.est_error + curved.est_error) +
                            straight.round_off + curved.round_off;
      chart.add(ratio(algebra_distance(straight.value, curved.value), budget));
    }
    report.records.push_back(mand.record());
    report.records.push_back(chart.record());
  }

  // D̃_v = v^μ D_μ + v^μ δ_μ along a curved section; δ vanishes for transport.
  {
    Tally arc("decomposition_arc", tol.decomposition_arc);
    Tally transport("decomposition_transport", tol.decomposition_transport);
    auto rng = stream_for(spec.seed, 2);
    constexpr double radius = 0.5;
    for (int s = 0; s < counts.decomposition; ++s) {
      const Path prefix = random_path(rng, spec, false);
      const Point x = random_point(rng, spec);
      Vector v = random_direction(rng, spec);
      v *= std::min(1.0, 1.0 / v.norm());
      const Section S = arc_section(prefix, x, radius);
      const Path center_path = S(x);
      const auto total = section_derivative(W, S, v, scheme);
      Matrix split = Matrix::Zero(W.rows, W.cols);
      for (int mu = 0; mu < n; ++mu) {
        if (v[mu] == 0.0)
          continue;
        split += v[mu] * mandelstam_derivative(W, center_path, unit_vector(n, mu), scheme).value;
        split += v[mu] * connection_derivative(W, S, mu, scheme).value;
      }
      arc.add(algebra_distance(total.value, split));

      const Section T = transport_section(random_path(rng, spec, false), radius);
      double worst = 0.0;
      for (int mu = 0; mu < n; ++mu)
        worst = std::max(worst, connection_derivative(W, T, mu, scheme).value.norm());
      transport.add(worst);
    }
    report.records.push_back(arc.record());
    report.records.push_back(transport.record());
  }

  // Δ_{μν}(π)W(γ) = W(π)·F_{μν}(x)·W(π)⁻¹·W(γ), antisymmetric in (μ, ν).
  {
    Tally curv("curvature", tol.curvature);
    curv.require_order(tol.curvature_order_min, std::numeric_limits<double>::infinity());
    Tally anti("antisymmetry", tol.antisymmetry);
    auto rng = stream_for(spec.seed, 3);
    for (int s = 0; s < counts.curvature; ++s) {
      const Path pi = random_path(rng, spec, false);
      const Path gamma = random_path(rng, spec, true, pi.base());
      const int mu = s % n;
      const int nu = (mu + 1 + (s / n) % (n - 1)) % n;
      const Vector eu = unit_vector(n, mu);
      const Vector ev = unit_vector(n, nu);
      const auto uv = loop_derivative(W, pi, gamma, eu, ev, scheme);
      const auto vu = loop_derivative(W, pi, gamma, ev, eu, scheme);
      const Matrix Wpi = hol(pi);
      const Matrix expected =
          Wpi * field_strength(A, pi.endpoint(), mu, nu) * Wpi.inverse() * hol(gamma);
      curv.add(relative_error(uv.value, expected));
      curv.add_order(uv.est_order);
      anti.add(ratio((uv.value + vu.value).norm(),
                     uv.est_error + vu.est_error + uv.round_off + vu.round_off));
    }
    report.records.push_back(curv.record());
    report.records.push_back(anti.record());
  }

  // [D_μ, D_ν] = Δ_{μν}: the loop derivative with γ = π inserts □ at x.
  {
    Tally comm("commutator", tol.commutator);
    auto rng = stream_for(spec.seed, 4);
    for (int s = 0; s < counts.commutator; ++s) {
      const Path pi = random_path(rng, spec, false);
      const int mu = s % n;
      const int nu = (mu + 1) % n;
      const auto nested = commutator_mandelstam(W, pi, mu, nu, scheme);
      const auto loop =
          loop_derivative(W, pi, pi, unit_vector(n, mu), unit_vector(n, nu), scheme);
      comm.add(relative_error(nested.value, loop.value));
      comm.add_order(nested.est_order);
    }
    report.records.push_back(comm.record());
  }

  if (n < 3) {
    report.notes.push_back(
        fmt::format("bianchi identities skipped: field dimension {} < 3", n));
    return report;
  }

  {
    Tally exact("bianchi_analytic", tol.bianchi_analytic);
    auto rng = stream_for(spec.seed, 5);
    const auto idx = triples(n);
    for (int s = 0; s < counts.bianchi_analytic; ++s) {
      const Point x = random_point(rng, spec);
      const auto &t = idx[static_cast<std::size_t>(s) % idx.size()];
      exact.add(bianchi_analytic(A, x, t[0], t[1], t[2]));
    }
    report.records.push_back(exact.record());
  }
  {
    Tally numeric("bianchi_numeric", tol.bianchi_numeric);
    auto rng = stream_for(spec.seed, 6);
    const auto idx = triples(n);
    for (int s = 0; s < counts.bianchi_numeric; ++s) {
      const Path pi = random_path(rng, spec, false);
      const auto &t = idx[static_cast<std::size_t>(s) % idx.size()];
      numeric.add(bianchi_numeric(A, pi, t[0], t[1], t[2], scheme, opts));
    }
    report.records.push_back(numeric.record());
  }
  return report;
}

} // namespace loopcalc
