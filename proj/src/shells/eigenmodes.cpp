#include "dgc/shells/eigenmodes.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace dgc {

std::vector<Eigenmode> hessian_eigenmodes(const ShellModel& model, const Point& s, int k) {
  require_dimension(s, model.dimension(), "eigenmode base shape");
  const Eigen::Index d = model.dimension();
  const DenseMatrix C = to_dense(model.gauge_basis(s));

  DenseMatrix Q;
  if (C.cols() == 0) {
    Q = DenseMatrix::Identity(d, d);
  } else {
    Eigen::ColPivHouseholderQR<DenseMatrix> qr(C);
    const Eigen::Index r = qr.rank();
    const DenseMatrix full = qr.householderQ();
    Q = full.rightCols(d - r);
  }
  if (k < 1 || k > Q.cols()) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenmodes but the feasible subspace has dimension " +
                          std::to_string(Q.cols()));
  }

  const DenseMatrix H = to_dense(model.hess22(s, s));
  DenseMatrix Hq = Q.transpose() * H * Q;
  Hq = 0.5 * (Hq + Hq.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(Hq);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");

  const double scale = model.metric_scale();
  const double norm = std::sqrt(static_cast<double>(d / 3));
  std::vector<Eigenmode> out;
  for (int i = 0; i < k; ++i) {
    Eigenmode m;
    m.eigenvalue = es.eigenvalues()[i];
    if (m.eigenvalue < -1e-8 * scale) {
      throw Error("Hessian has a negative eigenvalue " + std::to_string(m.eigenvalue) + " on the feasible subspace");
    }
    m.vector = Q * es.eigenvectors().col(i);
    m.vector *= norm / m.vector.norm();
    // fix the sign so repeated runs agree
    Eigen::Index arg;
    m.vector.cwiseAbs().maxCoeff(&arg);
    if (m.vector[arg] < 0) m.vector = -m.vector;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Eigenmode> hessian_eigenmodes(const ShellMesh& s, const ShellParams& params, const GaugeSpec& gauge,
                                          int k) {
  const ShellModel model(s, params, gauge);
  return hessian_eigenmodes(model, s.positions(), k);
}

}  // namespace dgc
