#include "loopcalc/paths.hpp"

#include <cmath>

#include <fmt/format.h>

#include "loopcalc/error.hpp"

namespace loopcalc {

namespace {

void require_same_dim(const Point &a, const Point &b, const char *what) {
  if (a.size() != b.size())
    throw Error(ErrorKind::DimMismatch,
                fmt::format("{}: dimension {} vs {}", what, a.size(), b.size()));
}

} // namespace

bool collinear(const Vector &d1, const Vector &d2) {
  double wedge2 = 0.0;
  for (Eigen::Index i = 0; i < d1.size(); ++i)
    for (Eigen::Index j = i + 1; j < d1.size(); ++j) {
      const double w = d1[i] * d2[j] - d1[j] * d2[i];
      wedge2 += w * w;
    }
  return std::sqrt(wedge2) <= kCollinearTol * d1.norm() * d2.norm();
}

bool same_point(const Point &a, const Point &b, double tol) {
  if (a.size() != b.size())
    return false;
  if (a.size() == 0)
    return true;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

Path::Path(Point base, std::vector<Point> vertices)
    : base_(std::move(base)), vertices_(std::move(vertices)) {
  if (base_.size() < 1)
    throw Error(ErrorKind::DimMismatch, "path dimension must be at least 1");
  for (const auto &v : vertices_)
    require_same_dim(base_, v, "path vertex");
}

bool operator==(const Path &a, const Path &b) {
  if (a.dim() != b.dim() || a.vertices_.size() != b.vertices_.size() ||
      a.base_ != b.base_)
    return false;
  for (std::size_t i = 0; i < a.vertices_.size(); ++i)
    if (a.vertices_[i] != b.vertices_[i])
      return false;
  return true;
}

Loop::Loop(Path path) : path_(std::move(path)) {
  if (!path_.is_closed())
    throw Error(ErrorKind::EndpointMismatch, "loop endpoint differs from its base");
}

const Point &endpoint(const Path &p) { return p.endpoint(); }

Path compose(const Path &p, const Path &q) {
  require_same_dim(p.base(), q.base(), "compose");
  if (!same_point(p.endpoint(), q.base()))
    throw Error(ErrorKind::EndpointMismatch,
                "compose: endpoint of first path differs from base of second");
  std::vector<Point> vs = p.vertices();
  vs.insert(vs.end(), q.vertices().begin(), q.vertices().end());
  return Path(p.base(), std::move(vs));
}

Path compose(std::span<const Path> pieces) {
  if (pieces.empty())
    throw Error(ErrorKind::InvalidArgument, "compose: no paths given");
  Path out = pieces.front();
  for (const auto &piece : pieces.subspan(1))
    out = compose(out, piece);
  return out;
}

Path inverse(const Path &p) {
  if (p.is_constant())
    return p;
  std::vector<Point> vs;
  vs.reserve(p.vertices().size());
  for (auto it = p.vertices().rbegin() + 1; it < p.vertices().rend(); ++it)
    vs.push_back(*it);
  vs.push_back(p.base());
  return Path(p.endpoint(), std::move(vs));
}

// Stack reduction. The stack is reduced at all times: a new vertex is dropped
// if it repeats the top, and pops the top while the last two stack points and
// the new vertex are collinear. Collinear triples a→b→c collapse to a→c in
// both orientations: same direction is a subdivision, opposite direction is a
// (possibly partial) retrace of the overlap.
Path reduce(const Path &p) {
  std::vector<Point> stack;
  stack.reserve(p.vertices().size() + 1);
  stack.push_back(p.base());
  for (const auto &v : p.vertices()) {
    bool keep = true;
    while (true) {
      if (same_point(stack.back(), v)) {
        keep = false;
        break;
      }
      if (stack.size() < 2)
        break;
      const Point &a = stack[stack.size() - 2];
      const Point &b = stack.back();
      if (!collinear(b - a, v - b))
        break;
      stack.pop_back();
    }
    if (keep)
      stack.push_back(v);
  }
  Point base = std::move(stack.front());
  std::vector<Point> vs(std::make_move_iterator(stack.begin() + 1),
                        std::make_move_iterator(stack.end()));
  return Path(std::move(base), std::move(vs));
}

bool thin_equal(const Path &p, const Path &q) {
  require_same_dim(p.base(), q.base(), "thin_equal");
  const Path rp = reduce(p);
  const Path rq = reduce(q);
  if (rp.vertices().size() != rq.vertices().size() ||
      !same_point(rp.base(), rq.base()))
    return false;
  for (std::size_t i = 0; i < rp.vertices().size(); ++i)
    if (!same_point(rp.vertices()[i], rq.vertices()[i]))
      return false;
  return true;
}

Path segment(const Point &x, const Point &y) {
  require_same_dim(x, y, "segment");
  return Path(x, {y});
}

Loop parallelogram(const Point &x, const Vector &u, const Vector &v, double eps1,
                   double eps2) {
  require_same_dim(x, u, "parallelogram");
  require_same_dim(x, v, "parallelogram");
  if (u.isZero(0.0) || v.isZero(0.0))
    throw Error(ErrorKind::ZeroDirection, "parallelogram: zero edge direction");
  const Point a = x + eps1 * u;
  const Point b = a + eps2 * v;
  const Point c = x + eps2 * v;
  return Loop(Path(x, {a, b, c, x}));
}

Path parallel_transport(const Path &alpha, const Path &gamma) {
  return reduce(compose(alpha, gamma));
}

} // namespace loopcalc
