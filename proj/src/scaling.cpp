#include "ippmm/scaling.hpp"

#include <cmath>

namespace ippmm {

RowScaling scale_rows(SpMat& A, Vec& b) {
  const Index m = A.rows();
  RowScaling sc;
  sc.d = Vec::Ones(m);
  sc.is_identity = true;

  Vec row_max = Vec::Zero(m);
  Vec row_min = Vec::Constant(m, kInf);
  double gmax = 0, gmin = kInf;
  for (Index k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      double a = std::abs(it.value());
      if (a == 0) continue;
      row_max[it.row()] = std::max(row_max[it.row()], a);
      row_min[it.row()] = std::min(row_min[it.row()], a);
      gmax = std::max(gmax, a);
      gmin = std::min(gmin, a);
    }

  if (gmax == 0 || (gmax < 10.0 && gmin > 0.1)) return sc;  // well scaled

  for (Index i = 0; i < m; ++i) {
    if (row_max[i] == 0) continue;  // zero row keeps factor 1
    double raw = 1.0 / std::sqrt(row_max[i] * row_min[i]);
    // largest power of two <= raw: raw = f * 2^e with f in [0.5, 1)
    int e;
    std::frexp(raw, &e);
    sc.d[i] = std::ldexp(1.0, e - 1);
  }
  sc.is_identity = false;

  for (Index k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      it.valueRef() *= sc.d[it.row()];
  b = b.cwiseProduct(sc.d);
  return sc;
}

}  // namespace ippmm
