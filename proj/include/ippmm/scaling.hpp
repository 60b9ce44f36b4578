#pragma once

#include "ippmm/problem.hpp"

namespace ippmm {

// Diagonal row scaling with power-of-two factors (exact in floating point).
struct RowScaling {
  Vec d;  // each entry is 2^p for integer p; empty means identity of size 0
  bool is_identity = true;

  // y in the scaled problem corresponds to d .* y in the original rows.
  Vec y_to_unscaled(const Vec& y_scaled) const {
    return is_identity ? y_scaled : Vec(d.cwiseProduct(y_scaled));
  }
};

// If A is already well scaled (all |a_ij| < 10 and all nonzero |a_ij| > 0.1)
// returns identity. Otherwise each row is multiplied by the largest power of
// two not exceeding 1/sqrt(max_j |a_ij| * min_{nonzero j} |a_ij|); zero rows
// keep factor 1. b is scaled jointly. A and b are modified in place.
RowScaling scale_rows(SpMat& A, Vec& b);

}  // namespace ippmm
