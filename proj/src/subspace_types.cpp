#include "cpair/subspace_types.hpp"

#include <algorithm>
#include <cmath>

#include "cpair/errors.hpp"

namespace cpair {

double window_schedule(int L, const SubspaceParams& p) {
  if (L < 1) throw InvalidParameter("window schedule needs L >= 1");
  return std::max(2.0, std::floor(std::pow(std::log(static_cast<double>(L)), p.window_exponent)));
}

int choose_n_win(int L, const SubspaceParams& p) {
  int n = p.n_win_override > 0
              ? p.n_win_override
              : static_cast<int>(std::floor(static_cast<double>(L) / window_schedule(L, p)));
  n -= n % 2;
  return std::max(2, n);
}

int sequence_length_bound(double lambda_min) {
  if (!(lambda_min > 0.0)) throw InvalidParameter("lambda_min must be positive");
  return 1 + static_cast<int>(std::ceil(std::log(2.0 / lambda_min) / std::log(10.0 / 9.0)));
}

void measure_claims(const CMatrix& J, const SubspaceFrame& W, Index v1_dim, Index vL_dim,
                    SubspaceAudit& audit) {
  const Index D = J.rows();
  audit.w_dim = W.rank();
  if (W.empty()) {
    audit.eps3 = v1_dim > 0 ? 1.0 : 0.0;
    audit.eps4 = 0.0;
    audit.eps5 = 0.0;
    return;
  }
  const CMatrix& w = W.columns();
  if (v1_dim > 0) {
    CMatrix s = CMatrix::Identity(D, v1_dim);
    audit.eps3 = op_norm(CMatrix(s - w * (w.adjoint() * s)));
  }
  CMatrix jw = J * w;
  audit.eps4 = op_norm(CMatrix(jw - w * (w.adjoint() * jw)));
  if (vL_dim > 0) audit.eps5 = op_norm(CMatrix(w.bottomRows(vL_dim)));
}

SubspaceResult fallback_subspace(const HermitianMatrix& J, Index v1_dim, Index vL_dim) {
  SubspaceResult out;
  out.audit.method = J.dim() == 0 ? "empty" : "fallback";
  out.audit.dim = J.dim();
  out.audit.v1_dim = v1_dim;
  out.audit.vL_dim = vL_dim;
  out.W = SubspaceFrame::full(J.dim());
  measure_claims(J.entries(), out.W, v1_dim, vL_dim, out.audit);
  return out;
}

}  // namespace cpair
