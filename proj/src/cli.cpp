#include "loopcalc/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "loopcalc/calculus.hpp"
#include "loopcalc/error.hpp"
#include "loopcalc/gauge.hpp"
#include "loopcalc/io.hpp"
#include "loopcalc/verify.hpp"

namespace loopcalc::cli {

namespace {

struct IntegratorFlags {
  int steps = 64;
  bool no_reunit = false;

  IntegratorOptions options() const { return {steps, !no_reunit}; }
};

void add_integrator_flags(CLI::App &cmd, IntegratorFlags &flags) {
  cmd.add_option("--steps", flags.steps, "RK4 substeps per polyline segment")
      ->check(CLI::PositiveNumber);
  cmd.add_flag("--no-reunit", flags.no_reunit, "skip projection back onto the group");
}

Vector parse_vector(const std::string &text, int dim, const char *flag) {
  const auto values = io::parse_real_list(text);
  if (static_cast<int>(values.size()) != dim)
    throw Error(ErrorKind::DimMismatch,
                fmt::format("{} has {} components, expected {}", flag, values.size(), dim));
  return Eigen::Map<const Vector>(values.data(), dim);
}

int to_index(int one_based, int dim, const char *flag) {
  if (one_based < 1 || one_based > dim)
    throw Error(ErrorKind::IndexOutOfRange,
                fmt::format("{} {} outside 1..{}", flag, one_based, dim));
  return one_based - 1;
}

struct DeriveArgs {
  std::string kind;
  std::string field_file;
  std::string path_file;
  int mu = 0;
  int nu = 0;
  std::string u;
  std::string v;
  std::string eps_list;
  std::string stencil = "central";
  std::string section;
  std::string gamma_file;
  double radius = 1.0;
  IntegratorFlags integrator;
};

int cmd_reduce(const std::string &path_file, std::ostream &out) {
  io::write_path(out, reduce(io::read_path_file(path_file)));
  return kExitOk;
}

int cmd_holonomy(const std::string &field_file, const std::string &path_file,
                 const IntegratorFlags &flags, std::ostream &out) {
  const auto A = io::read_field_file(field_file);
  const auto p = io::read_path_file(path_file);
  io::write_matrix(out, holonomy(A, p, flags.options()));
  return kExitOk;
}

int cmd_derive(const DeriveArgs &a, std::ostream &out) {
  const auto A = io::read_field_file(a.field_file);
  const auto pi = io::read_path_file(a.path_file);
  const int n = A.dim();
  if (pi.dim() != n)
    throw Error(ErrorKind::DimMismatch,
                fmt::format("path dim {} vs field dim {}", pi.dim(), n));

  FDScheme scheme;
  if (!a.eps_list.empty())
    scheme.eps_list = io::parse_real_list(a.eps_list);
  if (a.stencil == "forward")
    scheme.stencil = Stencil::Forward;
  scheme.validate();

  const PathFunctional W = holonomy_functional(A, a.integrator.options());
  const bool has_mu = a.mu != 0;
  const bool has_nu = a.nu != 0;

  DerivativeResult result;
  if (a.kind == "mandelstam") {
    Vector dir;
    if (!a.v.empty())
      dir = parse_vector(a.v, n, "--v");
    else if (has_mu)
      dir = unit_vector(n, to_index(a.mu, n, "--mu"));
    else
      throw Error(ErrorKind::InvalidArgument, "mandelstam needs --mu or --v");
    result = mandelstam_derivative(W, pi, dir, scheme);
  } else if (a.kind == "connection") {
    if (a.section.empty() || !has_mu)
      throw Error(ErrorKind::InvalidArgument, "connection needs --section and --mu");
    const int mu = to_index(a.mu, n, "--mu");
    Section S;
    if (a.section == "transport") {
      S = transport_section(pi, a.radius);
    } else {
      // Arc from the penultimate vertex of the path to points near its end.
      std::vector<Point> prefix_vs = pi.vertices();
      if (!prefix_vs.empty())
        prefix_vs.pop_back();
      S = arc_section(Path(pi.base(), std::move(prefix_vs)), pi.endpoint(), a.radius);
    }
    result = connection_derivative(W, S, mu, scheme);
  } else {
    Vector u, v;
    if (!a.u.empty() && !a.v.empty()) {
      u = parse_vector(a.u, n, "--u");
      v = parse_vector(a.v, n, "--v");
    } else if (has_mu && has_nu) {
      u = unit_vector(n, to_index(a.mu, n, "--mu"));
      v = unit_vector(n, to_index(a.nu, n, "--nu"));
    } else {
      throw Error(ErrorKind::InvalidArgument, "loop needs --mu and --nu, or --u and --v");
    }
    const Path gamma =
        a.gamma_file.empty() ? Path::constant(pi.base()) : io::read_path_file(a.gamma_file);
    result = loop_derivative(W, pi, gamma, u, v, scheme);
  }
  io::write_matrix(out, result.value);
  fmt::print(out, "order={:.6g} err={:.6g}\n", result.est_order, result.est_error);
  return kExitOk;
}

int cmd_verify(const std::string &field_file, std::uint64_t seed, int trials,
               const std::string &tol_file, const std::string &out_file,
               const IntegratorFlags &flags, std::ostream &out, std::ostream &err) {
  const auto A = io::read_field_file(field_file);
  if (A.dim() < 2)
    throw Error(ErrorKind::DimTooSmall, "verify needs a field of dimension >= 2");
  const Tolerances tol = tol_file.empty() ? Tolerances{} : io::read_tolerances_file(tol_file);
  RandomSpec spec;
  spec.seed = seed;
  spec.dim = A.dim();
  const SampleCounts counts = trials > 0 ? SampleCounts::uniform(trials) : SampleCounts{};

  const auto report = run_identity_suite(A, spec, FDScheme{}, tol, counts, flags.options());
  for (const auto &note : report.notes)
    err << "note: " << note << "\n";

  if (out_file.empty()) {
    io::write_report(out, report);
  } else {
    std::ofstream file(out_file);
    if (!file)
      throw Error(ErrorKind::Parse, fmt::format("cannot write '{}'", out_file));
    io::write_report(file, report);
  }
  return report.pass() ? kExitOk : kExitVerifyFailed;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Loop-space calculus of matrix gauge connections"};
  app.name("loopcalc");
  app.require_subcommand(1);

  std::string reduce_path;
  auto *reduce_cmd = app.add_subcommand("reduce", "reduce a path modulo retraces");
  reduce_cmd->add_option("path-file", reduce_path)->required();

  std::string hol_field, hol_path;
  IntegratorFlags hol_flags;
  auto *hol_cmd = app.add_subcommand("holonomy", "transport matrix along a path");
  hol_cmd->add_option("field-file", hol_field)->required();
  hol_cmd->add_option("path-file", hol_path)->required();
  add_integrator_flags(*hol_cmd, hol_flags);

  DeriveArgs d;
  auto *der_cmd = app.add_subcommand("derive", "Mandelstam, connection or loop derivative");
  der_cmd->add_option("kind", d.kind)
      ->required()
      ->check(CLI::IsMember({"mandelstam", "connection", "loop"}));
  der_cmd->add_option("field-file", d.field_file)->required();
  der_cmd->add_option("path-file", d.path_file)->required();
  der_cmd->add_option("--mu", d.mu, "first direction index (1-based)");
  der_cmd->add_option("--nu", d.nu, "second direction index (1-based)");
  der_cmd->add_option("--u", d.u, "first direction, comma-separated");
  der_cmd->add_option("--v", d.v, "second (or Mandelstam) direction, comma-separated");
  der_cmd->add_option("--eps-list", d.eps_list, "descending step sizes, comma-separated");
  der_cmd->add_option("--stencil", d.stencil)->check(CLI::IsMember({"central", "forward"}));
  der_cmd->add_option("--section", d.section)->check(CLI::IsMember({"transport", "arc"}));
  der_cmd->add_option("--radius", d.radius, "section radius")->check(CLI::PositiveNumber);
  der_cmd->add_option("--gamma", d.gamma_file, "path file for the loop argument");
  add_integrator_flags(*der_cmd, d.integrator);

  std::string ver_field, tol_file, out_file;
  std::uint64_t seed = 42;
  int trials = 0;
  IntegratorFlags ver_flags;
  auto *ver_cmd = app.add_subcommand("verify", "run the identity suite, emit a CSV report");
  ver_cmd->add_option("field-file", ver_field)->required();
  ver_cmd->add_option("--seed", seed, "sample seed");
  ver_cmd->add_option("--trials", trials, "samples per identity (default: per-identity)")
      ->check(CLI::PositiveNumber);
  ver_cmd->add_option("--tol-file", tol_file, "tolerance overrides");
  ver_cmd->add_option("--out", out_file, "report file (default: standard output)");
  add_integrator_flags(*ver_cmd, ver_flags);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "loopcalc: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*reduce_cmd)
      return cmd_reduce(reduce_path, out);
    if (*hol_cmd)
      return cmd_holonomy(hol_field, hol_path, hol_flags, out);
    if (*der_cmd)
      return cmd_derive(d, out);
    return cmd_verify(ver_field, seed, trials, tol_file, out_file, ver_flags, out, err);
  } catch (const Error &e) {
    err << "loopcalc: " << to_string(e.kind()) << ": " << e.what() << "\n";
  } catch (const std::exception &e) {
    err << "loopcalc: " << e.what() << "\n";
  }
  return kExitInputError;
}

} // namespace loopcalc::cli
