#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopcalc/calculus.hpp"
#include "loopcalc/gauge.hpp"
#include "loopcalc/paths.hpp"

namespace loopcalc {

/// splitmix64 stream. Same seed, same sequence, on every platform.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// (next() >> 11)·2⁻⁵³, in [0, 1).
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);

private:
  std::uint64_t state_;
};

struct RandomSpec {
  std::uint64_t seed = 42;
  int dim = 2;
  int min_vertices = 3;
  int max_vertices = 12;
  double box = 1.0; ///< samples lie in [−box, box]^dim
};

Point random_point(SplitMix64 &rng, const RandomSpec &spec);

/// Random polyline with a uniform vertex count in [min_vertices, max_vertices].
/// The base is drawn from the box unless given. When `closed`, the last
/// vertex is set to the base exactly.
Path random_path(SplitMix64 &rng, const RandomSpec &spec, bool closed,
                 const std::optional<Point> &base = std::nullopt);
/// One path from a fresh stream seeded with spec.seed.
Path random_path(const RandomSpec &spec, bool closed);

/// Random algebra element with entries of magnitude ~scale.
Matrix random_algebra_element(SplitMix64 &rng, const GroupTag &tag, double scale);
ConnectionField random_affine_field(SplitMix64 &rng, const GroupTag &tag, int dim,
                                    double scale);

/// Acceptance thresholds for each identity. One record, shared by the suite,
/// the CLI and the tests.
struct Tolerances {
  double homomorphism = 1e-9;
  double inverse = 1e-9;
  double thin_invariance = 1e-9;
  double mandelstam = 1e-6;            ///< relative
  double mandelstam_order_min = 1.8;
  double mandelstam_order_max = 2.2;
  double chart_independence = 1.0;     ///< ‖ΔD‖ / (10·est_error + round_off), both results
  double decomposition_arc = 1e-6;     ///< absolute residual
  double decomposition_transport = 1e-10;
  double curvature = 1e-4;             ///< relative
  double curvature_order_min = 1.8;
  double antisymmetry = 1.0;           ///< ‖Δ_uv + Δ_vu‖ / (est_error + round_off), both results
  double commutator = 1e-3;            ///< relative
  double bianchi_analytic = 1e-12;
  double bianchi_numeric = 1e-2;

  /// Set a threshold by its report name; false if the name is unknown.
  bool set(const std::string &name, double value);
};

/// Per-identity sample counts for a suite run.
struct SampleCounts {
  int homomorphism = 50;
  int mandelstam = 20;
  int decomposition = 20;
  int curvature = 20;
  int commutator = 10;
  int bianchi_analytic = 20;
  int bianchi_numeric = 3;

  /// Every identity gets `trials` samples.
  static SampleCounts uniform(int trials);
};

struct IdentityRecord {
  std::string identity;
  int samples = 0;
  double max_error = 0.0;
  double mean_error = 0.0;
  double observed_order = 0.0; ///< NaN when not applicable
  double tolerance = 0.0;
  bool pass = true;
};

struct VerificationReport {
  std::vector<IdentityRecord> records;
  std::vector<std::string> notes;

  bool pass() const;
  const IdentityRecord *find(const std::string &identity) const;
};

/// Run every identity check on seeded samples. Requires A.dim() ≥ 2; the
/// Bianchi rows are skipped (with a note) below dimension 3.
VerificationReport run_identity_suite(const ConnectionField &A, const RandomSpec &spec,
                                      const FDScheme &scheme = {},
                                      const Tolerances &tol = {},
                                      const SampleCounts &counts = {},
                                      const IntegratorOptions &opts = {});

/// ‖Σ_cyc (∂_μF_{νξ} + [A_μ, F_{νξ}])(x)‖_F, evaluated in closed form for
/// the affine field. Indices are 0-based and must be distinct.
double bianchi_analytic(const ConnectionField &A, const Point &x, int mu, int nu, int xi);

/// ‖Σ_cyc D_μ Δ_{ν,ξ}(π) W(o)‖_F with every derivative taken by finite
/// differences; the loop argument is the constant loop at the base of π.
double bianchi_numeric(const ConnectionField &A, const Path &pi, int mu, int nu, int xi,
                       const FDScheme &scheme = {}, const IntegratorOptions &opts = {});

} // namespace loopcalc
