#pragma once

#include <iosfwd>
#include <string>

#include "ippmm/problem.hpp"

namespace ippmm {

// Reads fixed- or free-format MPS with optional QUADOBJ/QMATRIX sections.
// Sections handled: NAME, OBJSENSE, ROWS, COLUMNS, RHS, RANGES, BOUNDS,
// QUADOBJ, QMATRIX, ENDATA. Throws ParseError (with line number) on malformed
// input, ModelError on structural violations.
RawProblem parse_qps(std::istream& in);
RawProblem parse_qps_file(const std::string& path);

}  // namespace ippmm
