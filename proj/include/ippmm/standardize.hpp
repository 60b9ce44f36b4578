#pragma once

#include <string>
#include <utility>

#include "ippmm/problem.hpp"

namespace ippmm {

// Converts a RawProblem to  min c'x + x'Qx/2  s.t. Ax = b, x_I >= 0, x_F free.
//  - maximization negates c and Q (recorded in the VarMap),
//  - fixed variables (l = u) are substituted out,
//  - finite lower bounds are shifted to 0,
//  - upper-bound-only variables are sign-flipped first,
//  - finite upper bounds become an extra row x_j + s = u - l with slack s,
//  - ranged rows are split into two inequality rows before slack insertion,
//  - inequality rows get one slack column each,
//  - zero rows of A are kept and flagged in StandardQP::warnings.
// Throws ModelError on lower > upper.
std::pair<StandardQP, VarMap> to_standard_form(const RawProblem& p);

// Human-readable summary of what the conversion did.
std::string standardization_report(const VarMap& map);

}  // namespace ippmm
