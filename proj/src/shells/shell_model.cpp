#include "dgc/shells/shell_model.hpp"

#include <unsupported/Eigen/AutoDiff>

#include <cmath>

namespace dgc {

void ShellParams::validate() const {
  if (!(mu_mem >= 0.0) || !(lambda_mem >= 0.0) || !(bending_weight >= 0.0)) {
    throw InvalidArgument("shell parameters must be non-negative");
  }
  if (!(mu_mem + lambda_mem > 0.0)) throw InvalidArgument("mu_mem + lambda_mem must be positive");
}

double membrane_density(const Eigen::Matrix2d& A, const ShellParams& p) {
  const double det = A.determinant();
  if (!(det > 0.0)) throw DomainError("membrane density needs det A > 0");
  return 0.5 * p.mu_mem * A.trace() + 0.25 * p.lambda_mem * det - (0.5 * p.mu_mem + 0.25 * p.lambda_mem) * std::log(det) -
         p.mu_mem - 0.25 * p.lambda_mem;
}

namespace {

using std::atan2;
using std::log;
using std::sqrt;

// ---- scalar functions, generic in the number type ----

template <class V>
typename V::Scalar dihedral_of(const V& x) {
  using T = typename V::Scalar;
  using V3 = Eigen::Matrix<T, 3, 1>;
  const V3 xi = x.template segment<3>(0), xj = x.template segment<3>(3);
  const V3 xk = x.template segment<3>(6), xl = x.template segment<3>(9);
  const V3 e = xj - xi;
  const V3 n1 = e.cross(V3(xk - xi));
  const V3 n2 = V3(xi - xj).cross(V3(xl - xj));
  const T len = sqrt(e.squaredNorm());
  const T s = n1.cross(n2).dot(e) / len;
  const T c = n1.dot(n2);
  return atan2(s, c);
}

template <class V>
typename V::Scalar area_of(const V& x) {
  using T = typename V::Scalar;
  using V3 = Eigen::Matrix<T, 3, 1>;
  const V3 a = x.template segment<3>(0);
  const V3 n = V3(x.template segment<3>(3) - a).cross(V3(x.template segment<3>(6) - a));
  return T(0.5) * sqrt(n.squaredNorm());
}

// a(g) W(g^{-1} h) on (g11, g12, g22, h11, h12, h22).
struct MembraneFn {
  double mu, lambda;
  template <class V>
  typename V::Scalar operator()(const V& q) const {
    using T = typename V::Scalar;
    const T detg = q(0) * q(2) - q(1) * q(1);
    const T deth = q(3) * q(5) - q(4) * q(4);
    const T tr = (q(2) * q(3) - T(2.0) * q(1) * q(4) + q(0) * q(5)) / detg;
    const T detA = deth / detg;
    const T area = T(0.5) * sqrt(detg);
    return area * (T(0.5 * mu) * tr + T(0.25 * lambda) * detA - T(0.5 * mu + 0.25 * lambda) * log(detA) -
                   T(mu + 0.25 * lambda));
  }
};

// 3 mu (theta - theta~)^2 L / (a1 + a2) on (theta, L, a1, a2, theta~).
struct BendingFn {
  double weight;
  template <class V>
  typename V::Scalar operator()(const V& q) const {
    using T = typename V::Scalar;
    const T d = q(0) - q(4);
    return T(3.0 * weight) * d * d * q(1) / (q(2) + q(3));
  }
};

// ---- value / gradient / Hessian by forward-mode automatic differentiation ----

template <int N>
struct Jet {
  double value = 0.0;
  Eigen::Matrix<double, N, 1> grad = Eigen::Matrix<double, N, 1>::Zero();
  Eigen::Matrix<double, N, N> hess = Eigen::Matrix<double, N, N>::Zero();
};

template <int N, class F>
Jet<N> jet(const F& f, const Eigen::Matrix<double, N, 1>& x, int order) {
  Jet<N> out;
  if (order <= 0) {
    out.value = f(x);
  } else if (order == 1) {
    using A = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;
    Eigen::Matrix<A, N, 1> X;
    for (int i = 0; i < N; ++i) X(i) = A(x(i), N, i);
    const A r = f(X);
    out.value = r.value();
    out.grad = r.derivatives();
  } else {
    using Inner = Eigen::AutoDiffScalar<Eigen::Matrix<double, N, 1>>;
    using Outer = Eigen::AutoDiffScalar<Eigen::Matrix<Inner, N, 1>>;
    Eigen::Matrix<Outer, N, 1> X;
    for (int i = 0; i < N; ++i) {
      X(i).value() = Inner(x(i), N, i);
      for (int j = 0; j < N; ++j) {
        X(i).derivatives()(j) = Inner(i == j ? 1.0 : 0.0);
        X(i).derivatives()(j).derivatives().setZero();
      }
    }
    const Outer r = f(X);
    out.value = r.value().value();
    out.grad = r.value().derivatives();
    for (int i = 0; i < N; ++i) out.hess.row(i) = r.derivatives()(i).derivatives().transpose();
    out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
  }
  return out;
}

struct DihedralFn {
  template <class V>
  typename V::Scalar operator()(const V& x) const { return dihedral_of(x); }
};
struct AreaFn {
  template <class V>
  typename V::Scalar operator()(const V& x) const { return area_of(x); }
};

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

template <int N>
Eigen::Matrix<double, N, 1> gather(const Vector& x, const std::array<int, N / 3>& verts) {
  Eigen::Matrix<double, N, 1> out;
  for (int a = 0; a < N / 3; ++a) out.template segment<3>(3 * a) = x.segment<3>(3 * verts[static_cast<size_t>(a)]);
  return out;
}

// First fundamental form entries (g11, g12, g22) of a triangle and their
// gradients (rows) with respect to the 9 vertex coordinates. Hessians are the
// constant matrices of first_form_hessians().
void first_form(const Vec9& x, Eigen::Vector3d& g, Eigen::Matrix<double, 3, 9>& G) {
  const Eigen::Vector3d e1 = x.segment<3>(3) - x.segment<3>(0);
  const Eigen::Vector3d e2 = x.segment<3>(6) - x.segment<3>(0);
  g << e1.dot(e1), e1.dot(e2), e2.dot(e2);
  G.setZero();
  G.block<1, 3>(0, 0) = -2.0 * e1.transpose();
  G.block<1, 3>(0, 3) = 2.0 * e1.transpose();
  G.block<1, 3>(1, 0) = -(e1 + e2).transpose();
  G.block<1, 3>(1, 3) = e2.transpose();
  G.block<1, 3>(1, 6) = e1.transpose();
  G.block<1, 3>(2, 0) = -2.0 * e2.transpose();
  G.block<1, 3>(2, 6) = 2.0 * e2.transpose();
}

const std::array<Eigen::Matrix<double, 9, 9>, 3>& first_form_hessians() {
  static const std::array<Eigen::Matrix<double, 9, 9>, 3> H = [] {
    Eigen::Matrix<double, 3, 9> D1 = Eigen::Matrix<double, 3, 9>::Zero(), D2 = D1;
    D1.block<3, 3>(0, 0) = -Eigen::Matrix3d::Identity();
    D1.block<3, 3>(0, 3) = Eigen::Matrix3d::Identity();
    D2.block<3, 3>(0, 0) = -Eigen::Matrix3d::Identity();
    D2.block<3, 3>(0, 6) = Eigen::Matrix3d::Identity();
    std::array<Eigen::Matrix<double, 9, 9>, 3> h;
    h[0] = 2.0 * D1.transpose() * D1;
    h[1] = D1.transpose() * D2 + D2.transpose() * D1;
    h[2] = 2.0 * D2.transpose() * D2;
    return h;
  }();
  return H;
}

// Squared length of edge (x0..2, x3..5) inside a 12-vector: gradient and constant Hessian.
void edge_length_sq(const Vec12& x, double& L, Vec12& grad, Eigen::Matrix<double, 12, 12>& hess) {
  const Eigen::Vector3d e = x.segment<3>(3) - x.segment<3>(0);
  L = e.squaredNorm();
  grad.setZero();
  grad.segment<3>(0) = -2.0 * e;
  grad.segment<3>(3) = 2.0 * e;
  hess.setZero();
  hess.block<3, 3>(0, 0) = hess.block<3, 3>(3, 3) = 2.0 * Eigen::Matrix3d::Identity();
  hess.block<3, 3>(0, 3) = hess.block<3, 3>(3, 0) = -2.0 * Eigen::Matrix3d::Identity();
}

enum : unsigned { kEnergy = 1, kGrad1 = 2, kGrad2 = 4, kHess11 = 8, kHess12 = 16, kHess22 = 32 };

template <int N>
void scatter_vec(Vector& out, const Eigen::Matrix<double, N, 1>& v, const std::array<int, N / 3>& verts) {
  for (int a = 0; a < N / 3; ++a) out.segment<3>(3 * verts[static_cast<size_t>(a)]) += v.template segment<3>(3 * a);
}

template <int N>
void scatter_mat(std::vector<Triplet>& out, const Eigen::Matrix<double, N, N>& m,
                 const std::array<int, N / 3>& verts) {
  for (int a = 0; a < N / 3; ++a) {
    for (int b = 0; b < N / 3; ++b) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          const double v = m(3 * a + r, 3 * b + c);
          if (v != 0.0) out.emplace_back(3 * verts[static_cast<size_t>(a)] + r, 3 * verts[static_cast<size_t>(b)] + c, v);
        }
      }
    }
  }
}

// Embeds a 9-coordinate triangle quantity into a 12-coordinate flap; `slots`
// lists which flap vertex each triangle vertex is.
template <class M12, class M9>
void embed(M12& dst, const M9& src, const std::array<int, 3>& slots) {
  for (int a = 0; a < 3; ++a) {
    if constexpr (M9::ColsAtCompileTime == 1) {
      dst.template segment<3>(3 * slots[static_cast<size_t>(a)]) += src.template segment<3>(3 * a);
    } else {
      for (int b = 0; b < 3; ++b) {
        dst.template block<3, 3>(3 * slots[static_cast<size_t>(a)], 3 * slots[static_cast<size_t>(b)]) +=
            src.template block<3, 3>(3 * a, 3 * b);
      }
    }
  }
}

}  // namespace

struct ShellModel::Result {
  double energy = 0.0;
  double membrane = 0.0;
  double bending = 0.0;
  Vector g1, g2;
  std::vector<Triplet> h11, h12, h22;
};

ShellModel::ShellModel(const ShellMesh& base, ShellParams params, GaugeSpec gauge, bool calibrate)
    : topology_(base.topology_ptr()), params_(params), gauge_(std::move(gauge)) {
  params_.validate();
  area_floor_ = 1e-12 * base.reference().areas.mean();
  if (gauge_.mode == GaugeSpec::Mode::fixed_vertices) {
    if (gauge_.fixed.empty()) throw InvalidArgument("fixed-vertex gauge needs at least one vertex");
    for (int v : gauge_.fixed) {
      if (v < 0 || v >= topology_->vertex_count()) {
        throw InvalidArgument("fixed vertex " + std::to_string(v) + " out of range");
      }
    }
  }
  fd_coordinate_scale_ = std::sqrt(base.reference().areas.mean());
  if (calibrate) calibrate_metric_scale(base.positions());
}

void ShellModel::check_domain(const Point& p) const {
  require_dimension(p, dimension(), "shell positions");
  if (!p.allFinite()) throw DomainError("shell positions are not finite");
  const auto& tris = topology_->triangles();
  for (size_t t = 0; t < tris.size(); ++t) {
    const Eigen::Vector3d a = p.segment<3>(3 * tris[t][0]);
    const double area = 0.5 * (p.segment<3>(3 * tris[t][1]) - a).cross(Eigen::Vector3d(p.segment<3>(3 * tris[t][2]) - a)).norm();
    if (!(area > area_floor_)) throw DegenerateTriangleError(static_cast<int>(t), area);
  }
}

ShellModel::Result ShellModel::evaluate(const Point& y, const Point& yt, unsigned what) const {
  check_domain(y);
  check_domain(yt);
  const Eigen::Index d = dimension();
  Result res;
  if (what & kGrad1) res.g1 = Vector::Zero(d);
  if (what & kGrad2) res.g2 = Vector::Zero(d);

  const bool ref_grad = what & (kGrad1 | kHess11 | kHess12);
  const bool def_grad = what & (kGrad2 | kHess22 | kHess12);
  const int f_order = (what & (kHess11 | kHess12 | kHess22)) ? 2 : ((what & (kGrad1 | kGrad2)) ? 1 : 0);

  // Membrane.
  const MembraneFn mfn{params_.mu_mem, params_.lambda_mem};
  const auto& S = first_form_hessians();
  for (const auto& tri : topology_->triangles()) {
    const std::array<int, 3> verts{tri[0], tri[1], tri[2]};
    Eigen::Vector3d g, h;
    Eigen::Matrix<double, 3, 9> G, Hd;
    first_form(gather<9>(y, verts), g, G);
    first_form(gather<9>(yt, verts), h, Hd);
    Eigen::Matrix<double, 6, 1> q;
    q << g, h;
    const Jet<6> f = jet<6>(mfn, q, f_order);
    res.membrane += f.value;
    if (what & kGrad1) scatter_vec<9>(res.g1, Vec9(G.transpose() * f.grad.head<3>()), verts);
    if (what & kGrad2) scatter_vec<9>(res.g2, Vec9(Hd.transpose() * f.grad.tail<3>()), verts);
    if (what & kHess11) {
      Eigen::Matrix<double, 9, 9> m = G.transpose() * f.hess.topLeftCorner<3, 3>() * G;
      for (int a = 0; a < 3; ++a) m += f.grad[a] * S[static_cast<size_t>(a)];
      scatter_mat<9>(res.h11, m, verts);
    }
    if (what & kHess22) {
      Eigen::Matrix<double, 9, 9> m = Hd.transpose() * f.hess.bottomRightCorner<3, 3>() * Hd;
      for (int a = 0; a < 3; ++a) m += f.grad[3 + a] * S[static_cast<size_t>(a)];
      scatter_mat<9>(res.h22, m, verts);
    }
    if (what & kHess12) {
      const Eigen::Matrix<double, 9, 9> m = G.transpose() * f.hess.topRightCorner<3, 3>() * Hd;
      scatter_mat<9>(res.h12, m, verts);
    }
  }

  // Bending.
  if (params_.bending_weight > 0.0) {
    const BendingFn bfn{params_.bending_weight};
    const int ref_order = (what & kHess11) ? 2 : (ref_grad ? 1 : 0);
    const int def_order = (what & kHess22) ? 2 : (def_grad ? 1 : 0);
    for (const auto& e : topology_->interior_edges()) {
      const std::array<int, 4> verts{e.i, e.j, e.k, e.l};
      const Vec12 X = gather<12>(y, verts);
      const Vec12 Y = gather<12>(yt, verts);
      const Jet<12> th = jet<12>(DihedralFn{}, X, ref_order);
      const Jet<12> tht = jet<12>(DihedralFn{}, Y, def_order);
      const Jet<9> a1 = jet<9>(AreaFn{}, gather<9>(y, {e.i, e.j, e.k}), ref_order);
      const Jet<9> a2 = jet<9>(AreaFn{}, gather<9>(y, {e.j, e.i, e.l}), ref_order);
      double L;
      Vec12 Lg;
      Eigen::Matrix<double, 12, 12> Lh;
      edge_length_sq(X, L, Lg, Lh);

      Eigen::Matrix<double, 5, 1> q;
      q << th.value, L, a1.value, a2.value, tht.value;
      const Jet<5> f = jet<5>(bfn, q, f_order);
      res.bending += f.value;
      if (f_order == 0) continue;

      // Reference intermediates (theta, L, a1, a2) as rows of a 4 x 12 matrix.
      Eigen::Matrix<double, 4, 12> Q = Eigen::Matrix<double, 4, 12>::Zero();
      if (ref_grad) {
        Q.row(0) = th.grad.transpose();
        Q.row(1) = Lg.transpose();
        Vec12 tmp = Vec12::Zero();
        embed(tmp, a1.grad, {0, 1, 2});
        Q.row(2) = tmp.transpose();
        tmp.setZero();
        embed(tmp, a2.grad, {1, 0, 3});
        Q.row(3) = tmp.transpose();
      }
      const Eigen::Matrix<double, 4, 1> fq = f.grad.head<4>();
      if (what & kGrad1) scatter_vec<12>(res.g1, Vec12(Q.transpose() * fq), verts);
      if (what & kGrad2) scatter_vec<12>(res.g2, Vec12(f.grad[4] * tht.grad), verts);
      if (what & kHess11) {
        Eigen::Matrix<double, 12, 12> m = Q.transpose() * f.hess.topLeftCorner<4, 4>() * Q;
        m += fq[0] * th.hess + fq[1] * Lh;
        Eigen::Matrix<double, 12, 12> ah = Eigen::Matrix<double, 12, 12>::Zero();
        embed(ah, Eigen::Matrix<double, 9, 9>(fq[2] * a1.hess), {0, 1, 2});
        embed(ah, Eigen::Matrix<double, 9, 9>(fq[3] * a2.hess), {1, 0, 3});
        m += ah;
        scatter_mat<12>(res.h11, m, verts);
      }
      if (what & kHess22) {
        const Eigen::Matrix<double, 12, 12> m = f.hess(4, 4) * tht.grad * tht.grad.transpose() + f.grad[4] * tht.hess;
        scatter_mat<12>(res.h22, m, verts);
      }
      if (what & kHess12) {
        const Eigen::Matrix<double, 12, 12> m = Q.transpose() * f.hess.block<4, 1>(0, 4) * tht.grad.transpose();
        scatter_mat<12>(res.h12, m, verts);
      }
    }
  }
  res.energy = res.membrane + res.bending;
  return res;
}

double ShellModel::energy(const Point& y, const Point& yt) const { return evaluate(y, yt, kEnergy).energy; }

ShellEnergyParts ShellModel::energy_parts(const Point& y, const Point& yt) const {
  const Result r = evaluate(y, yt, kEnergy);
  return {r.membrane, r.bending};
}
Vector ShellModel::grad1(const Point& y, const Point& yt) const { return evaluate(y, yt, kGrad1).g1; }
Vector ShellModel::grad2(const Point& y, const Point& yt) const { return evaluate(y, yt, kGrad2).g2; }

namespace {
SparseMatrix build(Eigen::Index d, const std::vector<Triplet>& t) {
  SparseMatrix m(d, d);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}
}  // namespace

SparseMatrix ShellModel::hess11(const Point& y, const Point& yt) const {
  return build(dimension(), evaluate(y, yt, kHess11).h11);
}
SparseMatrix ShellModel::hess12(const Point& y, const Point& yt) const {
  return build(dimension(), evaluate(y, yt, kHess12).h12);
}
SparseMatrix ShellModel::hess22(const Point& y, const Point& yt) const {
  return build(dimension(), evaluate(y, yt, kHess22).h22);
}

DenseMatrix rigid_modes(const Vector& x) {
  const Eigen::Index n = x.size() / 3;
  if (x.size() != 3 * n || n < 3) throw DimensionError("rigid modes need stacked 3D positions of at least 3 vertices");
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (Eigen::Index v = 0; v < n; ++v) centroid += x.segment<3>(3 * v);
  centroid /= static_cast<double>(n);
  DenseMatrix B = DenseMatrix::Zero(3 * n, 6);
  for (Eigen::Index v = 0; v < n; ++v) {
    const Eigen::Vector3d p = x.segment<3>(3 * v) - centroid;
    for (int a = 0; a < 3; ++a) {
      B(3 * v + a, a) = 1.0;
      B.block<3, 1>(3 * v, 3 + a) = Eigen::Vector3d::Unit(a).cross(p);
    }
  }
  Eigen::HouseholderQR<DenseMatrix> qr(B);
  return qr.householderQ() * DenseMatrix::Identity(3 * n, 6);
}

SparseMatrix ShellModel::gauge_basis(const Point& p) const {
  require_dimension(p, dimension(), "shell positions");
  switch (gauge_.mode) {
    case GaugeSpec::Mode::none:
      return SparseMatrix(dimension(), 0);
    case GaugeSpec::Mode::fixed_vertices: {
      SparseMatrix c(dimension(), 3 * static_cast<Eigen::Index>(gauge_.fixed.size()));
      std::vector<Triplet> t;
      for (size_t k = 0; k < gauge_.fixed.size(); ++k) {
        for (int a = 0; a < 3; ++a) t.emplace_back(3 * gauge_.fixed[k] + a, 3 * static_cast<Eigen::Index>(k) + a, 1.0);
      }
      c.setFromTriplets(t.begin(), t.end());
      return c;
    }
    case GaugeSpec::Mode::project_rigid:
      break;
  }
  return rigid_modes(p).sparseView(0.0, 0.0);
}

ShellEnergyParts shell_energy_parts(const ShellMesh& reference, const Vector& deformed, const ShellParams& params) {
  const ShellModel model(reference, params, GaugeSpec::unconstrained(), false);
  return model.energy_parts(reference.positions(), deformed);
}

double shell_energy(const ShellMesh& reference, const Vector& deformed, const ShellParams& params) {
  return shell_energy_parts(reference, deformed, params).total();
}

std::shared_ptr<const ShellModel> make_shell_model(const ShellMesh& base, ShellParams params, GaugeSpec gauge) {
  return std::make_shared<ShellModel>(base, params, std::move(gauge));
}

}  // namespace dgc
