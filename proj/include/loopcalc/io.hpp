#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "loopcalc/gauge.hpp"
#include "loopcalc/paths.hpp"
#include "loopcalc/verify.hpp"

namespace loopcalc::io {

// Path files:
//   # comment
//   dim <n>
//   base <n reals>
//   v <n reals>        (zero or more, in order)
Path read_path(std::istream &in);
Path read_path_file(const std::string &filename);
/// Reals are written with 17 significant digits, so read_path(write_path(p)) == p.
void write_path(std::ostream &out, const Path &p);

// Field files:
//   group u1 | su2 | gl <d>
//   dim <n>
//   C <mu> <d·d (re im) pairs, row-major>
//   D <mu> <nu> <d·d (re im) pairs, row-major>
// Indices are 1-based; omitted matrices are zero; duplicates are errors.
ConnectionField read_field(std::istream &in);
ConnectionField read_field_file(const std::string &filename);
void write_field(std::ostream &out, const ConnectionField &A);

// Tolerance files: `<identity> <value>` per line, `#` comments. Entries
// override `defaults`; unknown names are errors.
Tolerances read_tolerances(std::istream &in, Tolerances defaults = {});
Tolerances read_tolerances_file(const std::string &filename, Tolerances defaults = {});

/// CSV report, numeric fields with 6 significant digits, closing `ALL` row.
void write_report(std::ostream &out, const VerificationReport &report);

/// One matrix row per line, entries `re+imi` separated by spaces.
void write_matrix(std::ostream &out, const Matrix &M);

/// Comma-separated reals, e.g. "1e-2,5e-3,2.5e-3".
std::vector<double> parse_real_list(std::string_view text);

} // namespace loopcalc::io
