#include "calib/coframe.hpp"

#include <cmath>

namespace calib {

double Tensor3::norm_inf() const {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  return mx;
}

CoframeAlgebra::CoframeAlgebra(Tensor3 c, FrameMetric metric,
                               std::vector<std::string> labels,
                               std::vector<int> stabilizer_indices)
    : c_(std::move(c)), metric_(std::move(metric)), labels_(std::move(labels)),
      stab_(std::move(stabilizer_indices)) {
  const int n = c_.n;
  if (metric_.dim() != n) throw std::invalid_argument("coframe: metric dimension mismatch");
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C)
        if (std::abs(c_.at(A, B, C) + c_.at(A, C, B)) > 1e-12)
          throw std::invalid_argument("structure constants must be antisymmetric in the lower pair");
  std::vector<bool> is_stab(n, false);
  for (int s : stab_) is_stab.at(s) = true;
  for (int i = 0; i < n; ++i)
    if (!is_stab[i]) m_.push_back(i);
  if (jacobi_residual() > 1e-10)
    throw std::invalid_argument("structure constants fail the Jacobi identity (d^2 != 0)");
}

CoframeAlgebra CoframeAlgebra::flat(int n, int orientation) {
  return CoframeAlgebra(Tensor3(n), FrameMetric::euclidean(n, orientation));
}

Eigen::VectorXd CoframeAlgebra::bracket(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  const int n = dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C) out[A] += c_.at(A, B, C) * u[B] * v[C];
  return out;
}

Eigen::MatrixXd CoframeAlgebra::ad(const Eigen::VectorXd& u) const {
  const int n = dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C) out(A, C) += c_.at(A, B, C) * u[B];
  return out;
}

double CoframeAlgebra::jacobi_residual() const {
  double mx = 0.0;
  for (int A = 0; A < dim(); ++A) {
    MultiForm eA = MultiForm::basis(dim(), {A + 1});
    mx = std::max(mx, d_invariant(d_invariant(eA, *this), *this).norm_inf());
  }
  return mx;
}

CoframeAlgebra CoframeAlgebra::rotated(const Eigen::MatrixXd& Q) const {
  const int n = dim();
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("rotated: Q must be n x n");
  if ((Q * Q.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("rotated: Q must be orthogonal");
  Tensor3 nc(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cidx = 0; cidx < n; ++cidx) {
        double s = 0.0;
        for (int A = 0; A < n; ++A)
          for (int B = 0; B < n; ++B)
            for (int C = 0; C < n; ++C)
              s += Q(A, a) * c_.at(A, B, C) * Q(B, b) * Q(C, cidx);
        nc.at(a, b, cidx) = s;
      }
  // orientation flips with det(Q) = -1
  int orient = metric_.orientation() * (Q.determinant() > 0 ? 1 : -1);
  FrameMetric nm(Q.transpose() * metric_.g() * Q, orient);
  if (!stab_.empty())
    throw std::invalid_argument("rotated: stabilizer-carrying coframes are not rotated");
  return CoframeAlgebra(std::move(nc), std::move(nm), labels_);
}

Tensor3 FrameConnection::torsion_tensor(const CoframeAlgebra& cf) const {
  const int n = dim();
  Tensor3 T(n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C)
        T.at(A, B, C) = omega.at(A, B, C) - omega.at(A, C, B) - cf.bracket(A, B, C);
  return T;
}

std::vector<MultiForm> FrameConnection::torsion_two_forms(const CoframeAlgebra& cf) const {
  const int n = dim();
  Tensor3 T = torsion_tensor(cf);
  std::vector<MultiForm> out;
  out.reserve(n);
  for (int A = 0; A < n; ++A) {
    MultiForm f(2, n);
    for (int B = 0; B < n; ++B)
      for (int C = B + 1; C < n; ++C) {
        double v = T.at(A, B, C);
        if (v != 0.0) f.add_term(mask_of(std::vector<int>{B, C}), v);
      }
    out.push_back(std::move(f));
  }
  return out;
}

FrameConnection FrameConnection::tilde(const CoframeAlgebra& cf) const {
  // tilde_nabla_X Y = nabla_X Y - T(X,Y) has torsion -T
  const int n = dim();
  Tensor3 T = torsion_tensor(cf);
  Tensor3 nt(n);
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C) nt.at(A, B, C) = omega.at(A, B, C) - T.at(A, B, C);
  return FrameConnection(std::move(nt));
}

double FrameConnection::metric_compat_residual(const FrameMetric& m) const {
  // g(nabla_B e_C, e_D) + g(e_C, nabla_B e_D) = 0 for constant g
  const int n = dim();
  double mx = 0.0;
  for (int B = 0; B < n; ++B)
    for (int C = 0; C < n; ++C)
      for (int D = 0; D < n; ++D) {
        double s = 0.0;
        for (int A = 0; A < n; ++A)
          s += omega.at(A, B, C) * m.g()(A, D) + omega.at(A, B, D) * m.g()(C, A);
        mx = std::max(mx, std::abs(s));
      }
  return mx;
}

MultiForm d_invariant(const MultiForm& a, const CoframeAlgebra& cf) {
  const int n = cf.dim();
  if (a.dim() != n) throw std::invalid_argument("d_invariant: dimension mismatch");
  MultiForm out(std::min(a.degree() + 1, n), n, a.kind());
  if (a.degree() + 1 > n) return out;
  for (auto& [m, coeff] : a.terms()) {
    int pos = 0;
    for (Mask mm = m; mm; mm &= mm - 1, ++pos) {
      int i = std::countr_zero(mm);
      Mask rest = m & ~(Mask{1} << i);
      double sgn_pos = (pos & 1) ? -1.0 : 1.0;
      // d e^i = - sum_{B<C} c^i_{BC} e^B ^ e^C
      for (int B = 0; B < n; ++B)
        for (int C = B + 1; C < n; ++C) {
          double cc = -cf.bracket(i, B, C);
          if (cc == 0.0) continue;
          Mask bc = (Mask{1} << B) | (Mask{1} << C);
          if (bc & rest) continue;
          double sgn = merge_sign(bc, rest);
          out.add_term(bc | rest, sgn_pos * sgn * cc * coeff);
        }
    }
  }
  return out;
}

MultiForm codifferential_invariant(const MultiForm& a, const CoframeAlgebra& cf) {
  // delta a = -g^{AB} i_{e_A} (nabla^g_B a) on constant-coefficient forms
  const int n = cf.dim();
  FrameConnection lc = levi_civita(cf);
  auto grad = covariant_derivative(a, lc);
  MultiForm out(a.degree() - 1, n, a.kind());
  const Eigen::MatrixXd& gi = cf.metric().g_inv();
  for (int A = 0; A < n; ++A) {
    Eigen::VectorXd eA = Eigen::VectorXd::Zero(n);
    eA[A] = 1.0;
    for (int B = 0; B < n; ++B) {
      if (gi(A, B) == 0.0) continue;
      out += (-gi(A, B)) * interior(eA, grad[B]);
    }
  }
  return out;
}

FrameConnection levi_civita(const CoframeAlgebra& cf) {
  // 2 g(nabla_B C, Z) = g([B,C]_m, Z) - g([C,Z]_m, B) + g([Z,B]_m, C),
  // brackets projected to the m-block on homogeneous presets.
  const int n = cf.dim();
  const auto& g = cf.metric().g();
  const auto& gi = cf.metric().g_inv();
  std::vector<bool> in_m(n, false);
  for (int i : cf.m_indices()) in_m[i] = true;
  auto cm = [&](int A, int B, int C) { return in_m[A] ? cf.bracket(A, B, C) : 0.0; };
  Tensor3 om(n);
  for (int B : cf.m_indices())
    for (int C : cf.m_indices()) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
      for (int Z : cf.m_indices()) {
        double val = 0.0;
        for (int A = 0; A < n; ++A)
          val += g(A, Z) * cm(A, B, C) - g(A, B) * cm(A, C, Z) + g(A, C) * cm(A, Z, B);
        rhs[Z] = 0.5 * val;
      }
      Eigen::VectorXd w = gi * rhs;
      for (int A = 0; A < n; ++A) om.at(A, B, C) = w[A];
    }
  return FrameConnection(std::move(om));
}

FrameConnection flat_left_connection(const CoframeAlgebra& cf) {
  return FrameConnection(Tensor3(cf.dim()));
}

std::vector<MultiForm> covariant_derivative(const MultiForm& a, const FrameConnection& conn) {
  const int n = conn.dim();
  if (a.dim() != n) throw std::invalid_argument("covariant_derivative: dimension mismatch");
  std::vector<MultiForm> out;
  out.reserve(n);
  for (int B = 0; B < n; ++B) {
    MultiForm dB(a.degree(), n, a.kind());
    // (nabla_B a)_{A1..Ak} = -sum_p omega^C_{B A_p} a_{A1..C..Ak}
    for (auto& [m, coeff] : a.terms()) {
      int pos = 0;
      for (Mask mm = m; mm; mm &= mm - 1, ++pos) {
        int Ap = std::countr_zero(mm);
        Mask rest = m & ~(Mask{1} << Ap);
        for (int C = 0; C < n; ++C) {
          double w = conn.omega.at(C, B, Ap);
          if (w == 0.0) continue;
          if (rest & (Mask{1} << C)) continue;  // repeated index kills the term
          // slot p replaced by C: sign moves C into increasing position
          double sgn_rem = (pos & 1) ? -1.0 : 1.0;  // pull A_p to front
          double sgn_ins = merge_sign(Mask{1} << C, rest);
          dB.add_term(rest | (Mask{1} << C), -w * sgn_rem * sgn_ins * coeff);
        }
      }
    }
    out.push_back(std::move(dB));
  }
  return out;
}

double parallel_residual(const MultiForm& a, const FrameConnection& conn) {
  double mx = 0.0;
  for (auto& dB : covariant_derivative(a, conn)) mx = std::max(mx, dB.norm_inf());
  return mx;
}

MultiForm lie_derivative_parallel(const Eigen::VectorXd& V, const MultiForm& chi,
                                  const CoframeAlgebra& cf,
                                  const FrameConnection& conn_tilde,
                                  const Eigen::MatrixXd* dV) {
  const int n = cf.dim();
  if (chi.degree() < 1) throw std::invalid_argument("lie_derivative_parallel: degree-0 form");
  if (V.size() != n) throw std::invalid_argument("lie_derivative_parallel: vector length");
  // tilde_nabla_B V^A = e_B(V^A) + omega~^A_{BC} V^C
  Eigen::MatrixXd nv = Eigen::MatrixXd::Zero(n, n);  // (B, A)
  for (int B = 0; B < n; ++B)
    for (int A = 0; A < n; ++A) {
      double s = dV ? (*dV)(B, A) : 0.0;
      for (int C = 0; C < n; ++C) s += conn_tilde.omega.at(A, B, C) * V[C];
      nv(B, A) = s;
    }
  MultiForm out(chi.degree(), n, chi.kind());
  for (int A = 0; A < n; ++A) {
    Eigen::VectorXd eA = Eigen::VectorXd::Zero(n);
    eA[A] = 1.0;
    MultiForm iAchi = interior(eA, chi);
    for (int B = 0; B < n; ++B) {
      if (nv(B, A) == 0.0) continue;
      MultiForm eB = MultiForm::basis(n, {B + 1});
      out += nv(B, A) * wedge(eB, iAchi);
    }
  }
  return out;
}

}  // namespace calib
