#include "loopcalc/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "loopcalc/error.hpp"

namespace loopcalc::io {

namespace {

[[noreturn]] void fail(int line, const std::string &msg) {
  throw Error(ErrorKind::Parse, fmt::format("line {}: {}", line, msg));
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r')
      ++j;
    if (j > i)
      out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool to_real(std::string_view tok, double &value) {
  const char *end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

bool to_int(std::string_view tok, int &value) {
  const char *end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  return ec == std::errc() && ptr == end;
}

double real_at(const std::vector<std::string_view> &toks, std::size_t i, int line) {
  double v = 0.0;
  if (!to_real(toks[i], v))
    fail(line, fmt::format("'{}' is not a real number", toks[i]));
  return v;
}

int int_at(const std::vector<std::string_view> &toks, std::size_t i, int line) {
  int v = 0;
  if (!to_int(toks[i], v))
    fail(line, fmt::format("'{}' is not an integer", toks[i]));
  return v;
}

// Calls `handle(line_number, tokens)` for every non-blank, non-comment line.
template <class Handler> void for_each_record(std::istream &in, Handler handle) {
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto toks = split_ws(text);
    if (toks.empty() || toks.front().front() == '#')
      continue;
    handle(line, toks);
  }
  if (in.bad())
    throw Error(ErrorKind::Parse, "read error");
}

Point read_point(const std::vector<std::string_view> &toks, int dim, int line) {
  if (static_cast<int>(toks.size()) != dim + 1)
    fail(line, fmt::format("'{}' expects {} coordinates, got {}", toks[0], dim,
                           toks.size() - 1));
  Point p(dim);
  for (int i = 0; i < dim; ++i)
    p[i] = real_at(toks, static_cast<std::size_t>(i) + 1, line);
  return p;
}

std::ifstream open_input(const std::string &filename) {
  std::ifstream in(filename);
  if (!in)
    throw Error(ErrorKind::Parse, fmt::format("cannot open '{}'", filename));
  return in;
}

std::string real17(double v) { return fmt::format("{:.17g}", v); }

} // namespace

Path read_path(std::istream &in) {
  int dim = 0;
  bool have_base = false;
  Point base;
  std::vector<Point> vertices;
  for_each_record(in, [&](int line, const std::vector<std::string_view> &toks) {
    const auto key = toks[0];
    if (key == "dim") {
      if (dim != 0)
        fail(line, "duplicate 'dim'");
      if (toks.size() != 2)
        fail(line, "'dim' expects one integer");
      dim = int_at(toks, 1, line);
      if (dim < 1)
        fail(line, "'dim' must be positive");
    } else if (key == "base") {
      if (dim == 0)
        fail(line, "'base' before 'dim'");
      if (have_base)
        fail(line, "duplicate 'base'");
      base = read_point(toks, dim, line);
      have_base = true;
    } else if (key == "v") {
      if (!have_base)
        fail(line, "'v' before 'base'");
      vertices.push_back(read_point(toks, dim, line));
    } else {
      fail(line, fmt::format("unknown record '{}'", key));
    }
  });
  if (dim == 0)
    throw Error(ErrorKind::Parse, "missing 'dim'");
  if (!have_base)
    throw Error(ErrorKind::Parse, "missing 'base'");
  return Path(std::move(base), std::move(vertices));
}

Path read_path_file(const std::string &filename) {
  auto in = open_input(filename);
  return read_path(in);
}

void write_path(std::ostream &out, const Path &p) {
  auto coords = [](const Point &x) {
    std::string s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      s += " " + real17(x[i]);
    return s;
  };
  out << "dim " << p.dim() << "\n";
  out << "base" << coords(p.base()) << "\n";
  for (const auto &v : p.vertices())
    out << "v" << coords(v) << "\n";
}

ConnectionField read_field(std::istream &in) {
  bool have_group = false;
  GroupTag tag;
  int dim = 0;
  std::vector<std::tuple<int, int, Matrix, int>> entries; // (mu, nu or -1, M, line)
  std::set<std::pair<int, int>> seen;

  auto read_matrix = [&](const std::vector<std::string_view> &toks, std::size_t first,
                         int line) {
    const int d = tag.d;
    const std::size_t expected = first + 2 * static_cast<std::size_t>(d * d);
    if (toks.size() != expected)
      fail(line, fmt::format("'{}' expects {} reals, got {}", toks[0], 2 * d * d,
                             toks.size() - first));
    Matrix M(d, d);
    std::size_t k = first;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        const double re = real_at(toks, k++, line);
        M(r, c) = Complex(re, real_at(toks, k++, line));
      }
    return M;
  };
  auto index_at = [&](const std::vector<std::string_view> &toks, std::size_t i, int line) {
    const int mu = int_at(toks, i, line);
    if (mu < 1 || mu > dim)
      fail(line, fmt::format("index {} outside 1..{}", mu, dim));
    return mu - 1;
  };

  for_each_record(in, [&](int line, const std::vector<std::string_view> &toks) {
    const auto key = toks[0];
    if (key == "group") {
      if (have_group)
        fail(line, "duplicate 'group'");
      if (toks.size() == 2 && toks[1] == "u1")
        tag = GroupTag::u1();
      else if (toks.size() == 2 && toks[1] == "su2")
        tag = GroupTag::su2();
      else if (toks.size() == 3 && toks[1] == "gl") {
        const int d = int_at(toks, 2, line);
        if (d < 1)
          fail(line, "'gl' size must be positive");
        tag = GroupTag::gl(d);
      } else
        fail(line, "'group' expects u1, su2 or gl <d>");
      have_group = true;
    } else if (key == "dim") {
      if (dim != 0)
        fail(line, "duplicate 'dim'");
      if (toks.size() != 2)
        fail(line, "'dim' expects one integer");
      dim = int_at(toks, 1, line);
      if (dim < 1)
        fail(line, "'dim' must be positive");
    } else if (key == "C" || key == "D") {
      if (!have_group || dim == 0)
        fail(line, fmt::format("'{}' before 'group' and 'dim'", key));
      const bool linear = key == "D";
      const std::size_t need = linear ? 3 : 2;
      if (toks.size() < need)
        fail(line, fmt::format("'{}' is missing its indices", key));
      const int mu = index_at(toks, 1, line);
      const int nu = linear ? index_at(toks, 2, line) : -1;
      if (!seen.insert({mu, nu}).second)
        fail(line, linear ? fmt::format("duplicate D {} {}", mu + 1, nu + 1)
                          : fmt::format("duplicate C {}", mu + 1));
      entries.emplace_back(mu, nu, read_matrix(toks, need, line), line);
    } else {
      fail(line, fmt::format("unknown record '{}'", key));
    }
  });
  if (!have_group)
    throw Error(ErrorKind::Parse, "missing 'group'");
  if (dim == 0)
    throw Error(ErrorKind::Parse, "missing 'dim'");

  const auto n = static_cast<std::size_t>(dim);
  std::vector<Matrix> constant(n, Matrix::Zero(tag.d, tag.d));
  std::vector<Matrix> linear(n * n, Matrix::Zero(tag.d, tag.d));
  for (auto &[mu, nu, M, line] : entries) {
    if (!is_algebra_element(tag, M, 1e-10))
      fail(line, "matrix is not in the Lie algebra of the group");
    if (nu < 0)
      constant[static_cast<std::size_t>(mu)] = std::move(M);
    else
      linear[static_cast<std::size_t>(mu * dim + nu)] = std::move(M);
  }
  return ConnectionField(tag, dim, std::move(constant), std::move(linear), 1e-10);
}

ConnectionField read_field_file(const std::string &filename) {
  auto in = open_input(filename);
  return read_field(in);
}

void write_field(std::ostream &out, const ConnectionField &A) {
  switch (A.group().kind) {
  case GroupKind::U1: out << "group u1\n"; break;
  case GroupKind::SU2: out << "group su2\n"; break;
  case GroupKind::GL: out << "group gl " << A.group().d << "\n"; break;
  }
  out << "dim " << A.dim() << "\n";
  auto entries = [](const Matrix &M) {
    std::string s;
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      for (Eigen::Index c = 0; c < M.cols(); ++c)
        s += " " + real17(M(r, c).real()) + " " + real17(M(r, c).imag());
    return s;
  };
  for (int mu = 0; mu < A.dim(); ++mu)
    if (!A.constant(mu).isZero(0.0))
      out << "C " << mu + 1 << entries(A.constant(mu)) << "\n";
  for (int mu = 0; mu < A.dim(); ++mu)
    for (int nu = 0; nu < A.dim(); ++nu)
      if (!A.linear(mu, nu).isZero(0.0))
        out << "D " << mu + 1 << " " << nu + 1 << entries(A.linear(mu, nu)) << "\n";
}

Tolerances read_tolerances(std::istream &in, Tolerances defaults) {
  for_each_record(in, [&](int line, const std::vector<std::string_view> &toks) {
    if (toks.size() != 2)
      fail(line, "expected '<identity> <value>'");
    const double value = real_at(toks, 1, line);
    if (value < 0.0)
      fail(line, "tolerance must be non-negative");
    if (!defaults.set(std::string(toks[0]), value))
      fail(line, fmt::format("unknown identity '{}'", toks[0]));
  });
  return defaults;
}

Tolerances read_tolerances_file(const std::string &filename, Tolerances defaults) {
  auto in = open_input(filename);
  return read_tolerances(in, defaults);
}

void write_report(std::ostream &out, const VerificationReport &report) {
  out << "identity,samples,max_error,mean_error,observed_order,tolerance,pass\n";
  int total = 0;
  for (const auto &r : report.records) {
    fmt::print(out, "{},{},{:.6g},{:.6g},{:.6g},{:.6g},{}\n", r.identity, r.samples,
               r.max_error, r.mean_error, r.observed_order, r.tolerance, r.pass);
    total += r.samples;
  }
  fmt::print(out, "ALL,{},,,,,{}\n", total, report.pass());
}

void write_matrix(std::ostream &out, const Matrix &M) {
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c > 0)
        out << ' ';
      fmt::print(out, "{:.17g}{:+.17g}i", M(r, c).real(), M(r, c).imag());
    }
    out << '\n';
  }
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const auto tok = text.substr(start, comma == std::string_view::npos
                                            ? std::string_view::npos
                                            : comma - start);
    double v = 0.0;
    if (!to_real(tok, v))
      throw Error(ErrorKind::Parse, fmt::format("'{}' is not a real number", tok));
    out.push_back(v);
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

} // namespace loopcalc::io
