#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace loopcalc {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;

/// Absolute per-coordinate tolerance for vertex identity and endpoint matching.
inline constexpr double kVertexTol = 1e-12;
/// Relative tolerance of the wedge-product collinearity test.
inline constexpr double kCollinearTol = 1e-12;

bool same_point(const Point &a, const Point &b, double tol = kVertexTol);

/// Wedge-product test |d1 ∧ d2| <= kCollinearTol·|d1|·|d2|. Zero vectors
/// count as collinear with everything.
bool collinear(const Vector &d1, const Vector &d2);

/// Piecewise-linear path: a start point followed by polyline vertices. An
/// empty vertex list is the constant path at `base()`.
class Path {
public:
  Path() = default;
  explicit Path(Point base, std::vector<Point> vertices = {});

  static Path constant(Point base) { return Path(std::move(base)); }

  int dim() const noexcept { return static_cast<int>(base_.size()); }
  const Point &base() const noexcept { return base_; }
  const std::vector<Point> &vertices() const noexcept { return vertices_; }
  const Point &endpoint() const noexcept {
    return vertices_.empty() ? base_ : vertices_.back();
  }
  bool is_constant() const noexcept { return vertices_.empty(); }
  std::size_t segment_count() const noexcept { return vertices_.size(); }

  /// Start and end of segment `i` (0-based).
  const Point &segment_start(std::size_t i) const {
    return i == 0 ? base_ : vertices_[i - 1];
  }
  const Point &segment_end(std::size_t i) const { return vertices_[i]; }

  bool is_closed(double tol = kVertexTol) const {
    return same_point(endpoint(), base_, tol);
  }

  /// Exact (bitwise) vertex-for-vertex equality.
  friend bool operator==(const Path &a, const Path &b);

private:
  Point base_;
  std::vector<Point> vertices_;
};

/// A path whose endpoint coincides with its base within kVertexTol.
class Loop {
public:
  explicit Loop(Path path);
  static Loop constant(Point base) { return Loop(Path::constant(std::move(base))); }

  const Path &path() const noexcept { return path_; }
  operator const Path &() const noexcept { return path_; }
  const Point &base() const noexcept { return path_.base(); }

private:
  Path path_;
};

const Point &endpoint(const Path &p);

/// Concatenation p·q. Not reduced.
Path compose(const Path &p, const Path &q);
Path compose(std::span<const Path> pieces);

Path inverse(const Path &p);

/// Canonical representative modulo retraces and collinear subdivision.
Path reduce(const Path &p);

bool thin_equal(const Path &p, const Path &q);

Path segment(const Point &x, const Point &y);

/// x → x+ε₁u → x+ε₁u+ε₂v → x+ε₂v → x.
Loop parallelogram(const Point &x, const Vector &u, const Vector &v, double eps1,
                   double eps2);

/// reduce(alpha · gamma)
Path parallel_transport(const Path &alpha, const Path &gamma);

} // namespace loopcalc
