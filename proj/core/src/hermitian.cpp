#include <cmath>

#include "calib/coframe.hpp"

namespace calib {

namespace {

void require_hermitian(const CoframeAlgebra& cf, const Eigen::MatrixXd& J) {
  const int n = cf.dim();
  if (J.rows() != n || J.cols() != n) throw std::invalid_argument("J has wrong shape");
  // homogeneous presets carry J on the m-block only
  Eigen::MatrixXd JJ = J * J + Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd GC = J.transpose() * cf.metric().g() * J - cf.metric().g();
  for (int a : cf.m_indices())
    for (int b : cf.m_indices())
      if (std::abs(JJ(a, b)) > 1e-10 || std::abs(GC(a, b)) > 1e-10)
        throw std::invalid_argument("inputs are not an almost hermitian pair");
}

// Algebraic action of a matrix on a form: sum_{A,C} M(C,A) e^A ^ i_{e_C} a,
// i.e. each index slot contracted with M.
MultiForm act(const Eigen::MatrixXd& M, const MultiForm& a) {
  const int n = a.dim();
  MultiForm out(a.degree(), n, a.kind());
  for (int C = 0; C < n; ++C) {
    Eigen::VectorXd eC = Eigen::VectorXd::Zero(n);
    eC[C] = 1.0;
    MultiForm iC = interior(eC, a);
    for (int A = 0; A < n; ++A) {
      if (M(C, A) == 0.0) continue;
      out += M(C, A) * wedge(MultiForm::basis(n, {A + 1}), iC);
    }
  }
  return out;
}

// (nabla_B J) as a matrix for each B
std::vector<Eigen::MatrixXd> nabla_J(const FrameConnection& conn, const Eigen::MatrixXd& J) {
  const int n = conn.dim();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n);
  for (int B = 0; B < n; ++B) {
    Eigen::MatrixXd omB(n, n);
    for (int A = 0; A < n; ++A)
      for (int C = 0; C < n; ++C) omB(A, C) = conn.omega.at(A, B, C);
    out.push_back(omB * J - J * omB);
  }
  return out;
}

MultiForm kaehler_form(const CoframeAlgebra& cf, const Eigen::MatrixXd& J) {
  const int n = cf.dim();
  Eigen::MatrixXd Om = cf.metric().g() * J;  // Omega_{AB} = g(e_A, J e_B)
  MultiForm f(2, n);
  for (int A = 0; A < n; ++A)
    for (int B = A + 1; B < n; ++B)
      if (Om(A, B) != 0.0) f.add_term(mask_of(std::vector<int>{A, B}), Om(A, B));
  return f;
}

double value3(const std::vector<cplx>& dense, int n, int A, int B, int C) {
  return dense[(static_cast<std::size_t>(A) * n + B) * n + C].real();
}

}  // namespace

HermitianPackage hermitian_package(const CoframeAlgebra& cf, const Eigen::MatrixXd& J) {
  require_hermitian(cf, J);
  const int n = cf.dim();
  const auto& g = cf.metric().g();
  const auto& gi = cf.metric().g_inv();

  HermitianPackage pkg;
  pkg.Omega = kaehler_form(cf, J);
  pkg.dOmega = d_invariant(pkg.Omega, cf);
  pkg.dc_Omega = -1.0 * pullback(pkg.dOmega, J);

  FrameConnection lc = levi_civita(cf);

  // theta_i = -(nabla^g)^k Omega_{kj} J^j_i
  auto gradOm = covariant_derivative(pkg.Omega, lc);
  pkg.lee_form = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
      auto dense = dense_coefficients(gradOm[a]);
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
          double d2 = dense[static_cast<std::size_t>(k) * n + j].real();
          s += -gi(a, k) * d2 * J(j, i);
        }
    }
    pkg.lee_form[i] = s;
  }

  // Nijenhuis via structure constants
  pkg.nijenhuis = Tensor3(n);
  for (int B = 0; B < n; ++B)
    for (int C = 0; C < n; ++C) {
      Eigen::VectorXd eB = Eigen::VectorXd::Zero(n), eC = Eigen::VectorXd::Zero(n);
      eB[B] = 1.0;
      eC[C] = 1.0;
      Eigen::VectorXd N = cf.bracket(J * eB, J * eC) - cf.bracket(eB, eC) -
                          J * cf.bracket(J * eB, eC) - J * cf.bracket(eB, J * eC);
      for (int A = 0; A < n; ++A) pkg.nijenhuis.at(A, B, C) = N[A];
    }

  auto dense_dc = dense_coefficients(pkg.dc_Omega);
  auto dense_d = dense_coefficients(pkg.dOmega);
  Tensor3 wb(n), wc(n);
  for (int B = 0; B < n; ++B)
    for (int C = 0; C < n; ++C) {
      Eigen::VectorXd rb = Eigen::VectorXd::Zero(n), rc = Eigen::VectorXd::Zero(n);
      for (int D = 0; D < n; ++D) {
        rb[D] = 0.5 * value3(dense_dc, n, B, C, D);
        double v = 0.0;
        for (int Bp = 0; Bp < n; ++Bp)
          if (J(Bp, B) != 0.0) v += J(Bp, B) * value3(dense_d, n, Bp, C, D);
        rc[D] = 0.5 * v;
      }
      Eigen::VectorXd ab = gi * rb, ac = gi * rc;
      for (int A = 0; A < n; ++A) {
        wb.at(A, B, C) = lc.omega.at(A, B, C) + ab[A];
        wc.at(A, B, C) = lc.omega.at(A, B, C) + ac[A];
      }
    }
  pkg.bismut = FrameConnection(std::move(wb));
  pkg.chern = FrameConnection(std::move(wc));

  Tensor3 Tb = pkg.bismut.torsion_tensor(cf);
  double r3 = 0.0;
  for (int A = 0; A < n; ++A)
    for (int B = 0; B < n; ++B)
      for (int C = 0; C < n; ++C) {
        double tABC = 0.0, tBAC = 0.0;
        for (int D = 0; D < n; ++D) {
          tABC += g(A, D) * Tb.at(D, B, C);
          tBAC += g(B, D) * Tb.at(D, A, C);
        }
        r3 = std::max(r3, std::abs(tABC + tBAC));
      }
  pkg.bismut_torsion_3form_residual = r3;

  Tensor3 Tc = pkg.chern.torsion_tensor(cf);
  double r11 = 0.0;
  for (int B = 0; B < n; ++B)
    for (int C = 0; C < n; ++C) {
      Eigen::VectorXd eB = Eigen::VectorXd::Zero(n), eC = Eigen::VectorXd::Zero(n);
      eB[B] = 1.0;
      eC[C] = 1.0;
      Eigen::VectorXd JB = J * eB, JC = J * eC;
      for (int A = 0; A < n; ++A) {
        double tJJ = 0.0;
        for (int Bp = 0; Bp < n; ++Bp)
          for (int Cp = 0; Cp < n; ++Cp) tJJ += Tc.at(A, Bp, Cp) * JB[Bp] * JC[Cp];
        r11 = std::max(r11, std::abs(tJJ + Tc.at(A, B, C)));
      }
    }
  pkg.chern_torsion_11_residual = r11;
  return pkg;
}

double su_normalization_residual(const MultiForm& psi, const FrameMetric& m) {
  const int n2 = psi.dim();
  const int n = n2 / 2;
  MultiForm pp = wedge(psi, psi.conjugate());
  cplx pref = std::pow(cplx(0.0, 0.5), n);
  if (((n - 1) * n / 2) % 2 == 1) pref = -pref;
  MultiForm lhs = pref * pp;
  return (lhs - m.volume_form().promoted()).norm_inf();
}

SuConnectionResult su_connection(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                                 const MultiForm& psi) {
  require_hermitian(cf, J);
  const int n = cf.dim();
  double nres = su_normalization_residual(psi, cf.metric());
  if (nres > 1e-8) {
    // measure the factor of (nnvol): psi ^ conj(psi) = (-1)^{-m(m-1)/2+m} (2i)^m f^2 dvol
    const int m = n / 2;
    MultiForm pp = wedge(psi, psi.conjugate());
    cplx top = pp.coeff((Mask{1} << n) - 1);
    cplx denom = std::pow(cplx(0.0, 2.0), m) * cf.metric().volume_form().coeff((Mask{1} << n) - 1);
    if (((m * (m - 1) / 2) % 2) == 1) denom = -denom;
    double f2 = (top / denom).real();
    throw std::invalid_argument("psi is not normalized: measured f^2 = " + std::to_string(f2));
  }

  FrameConnection lc = levi_civita(cf);
  auto nJ = nabla_J(lc, J);
  Tensor3 w(n);
  for (int B = 0; B < n; ++B) {
    Eigen::MatrixXd omB(n, n);
    for (int A = 0; A < n; ++A)
      for (int C = 0; C < n; ++C) omB(A, C) = lc.omega.at(A, B, C);
    Eigen::MatrixXd corr = omB - 0.5 * J * nJ[B];  // (ahc)
    for (int A = 0; A < n; ++A)
      for (int C = 0; C < n; ++C) w.at(A, B, C) = corr(A, C);
  }
  FrameConnection gj(std::move(w));

  // trace-part correction: nabla^{gJ}_B psi = mu_B psi; J acts on psi by kappa;
  // subtracting (mu_B/kappa) J makes psi parallel and keeps g, J parallel.
  MultiForm Jpsi = act(J, psi.promoted());
  cplx psi2 = dot(psi, psi);
  cplx kappa = dot(Jpsi, psi) / psi2;
  if ((Jpsi - kappa * psi.promoted()).norm_inf() > 1e-9)
    throw std::invalid_argument("psi is not a (n,0)-form for this J");
  auto grad = covariant_derivative(psi.promoted(), gj);
  FrameConnection su = gj;
  for (int B = 0; B < n; ++B) {
    cplx mu = dot(grad[B], psi) / psi2;
    cplx alpha = mu / kappa;
    for (int A = 0; A < n; ++A)
      for (int C = 0; C < n; ++C) su.omega.at(A, B, C) += alpha.real() * J(A, C);
  }

  SuConnectionResult out{su, 0.0, 0.0, 0.0};
  out.g_residual = su.metric_compat_residual(cf.metric());
  double jr = 0.0;
  for (auto& m : nabla_J(su, J)) jr = std::max(jr, m.cwiseAbs().maxCoeff());
  out.J_residual = jr;
  out.psi_residual = parallel_residual(psi.promoted(), su);
  return out;
}

G2Class g2_classify(const CoframeAlgebra& cf, const MultiForm& psi, double tol) {
  // On homogeneous presets the structure lives on the m-block; stabilizer
  // terms of d psi must cancel for an invariant psi.
  std::vector<int> m_idx = cf.m_indices();
  const int n7 = static_cast<int>(m_idx.size());
  if (n7 != 7) throw std::invalid_argument("g2_classify needs a 7-dimensional (m-)frame");

  MultiForm psi7 = cf.is_homogeneous() ? restrict_to(psi, m_idx) : psi;
  G2Class out;

  auto P = dense_coefficients(psi7);
  double giimet = 0.0;
  for (int A = 0; A < 7; ++A)
    for (int B = 0; B < 7; ++B) {
      double s = 0.0;
      for (int C = 0; C < 7; ++C)
        for (int D = 0; D < 7; ++D)
          s += value3(P, 7, A, C, D) * value3(P, 7, B, C, D);
      giimet = std::max(giimet, std::abs(s / 6.0 - (A == B ? 1.0 : 0.0)));
    }
  out.giimet_residual = giimet;
  if (giimet > 1e-8)
    throw std::invalid_argument("psi fails the pointwise G2 identity");

  FrameMetric m7 = FrameMetric::euclidean(7, cf.metric().orientation());
  MultiForm dpsi_full = d_invariant(psi, cf);
  MultiForm dpsi = cf.is_homogeneous() ? restrict_to(dpsi_full, m_idx) : dpsi_full;
  MultiForm star_psi = hodge_star(psi7, m7);
  MultiForm dstar_full = cf.is_homogeneous()
      ? d_invariant(/* re-embed */ pullback(star_psi, [&] {
          Eigen::MatrixXd E = Eigen::MatrixXd::Zero(7, cf.dim());
          for (int p = 0; p < 7; ++p) E(p, m_idx[p]) = 1.0;
          return E;
        }()), cf)
      : d_invariant(star_psi, cf);
  MultiForm dstar = cf.is_homogeneous() ? restrict_to(dstar_full, m_idx) : dstar_full;

  out.calibrated = dpsi.norm_inf() <= tol;
  out.cocalibrated = dstar.norm_inf() <= tol;
  out.pure_type = out.cocalibrated && wedge(dpsi, psi7).norm_inf() <= tol;

  double sp2 = dot(star_psi, star_psi).real();
  double lam = dot(dpsi, star_psi).real() / sp2;
  out.nearly_parallel_residual = (dpsi - cplx(lam) * star_psi).norm_inf();
  if (out.nearly_parallel_residual <= tol) out.nearly_parallel_lambda = lam;

  // 3 theta = -*(*d psi ^ psi)
  MultiForm th = hodge_star(wedge(hodge_star(dpsi, m7), psi7), m7);
  out.lee_form = Eigen::VectorXd::Zero(7);
  for (int i = 0; i < 7; ++i)
    out.lee_form[i] = -th.coeff(Mask{1} << i).real() / 3.0;
  MultiForm theta(1, 7);
  for (int i = 0; i < 7; ++i)
    if (out.lee_form[i] != 0.0) theta.add_term(Mask{1} << i, out.lee_form[i]);

  out.integrable = (dstar - wedge(theta, star_psi)).norm_inf() <= tol;

  // (firstd): d psi = 1/6 (d psi . *psi) *psi + theta ^ psi + *H
  out.torsion_part = dpsi - cplx(dot(dpsi, star_psi).real() / 6.0) * star_psi - wedge(theta, psi7);
  return out;
}

NearlyKahlerReport nearly_kahler_check(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                                       double tol) {
  require_hermitian(cf, J);
  const int n = cf.dim();
  const auto& g = cf.metric().g();
  FrameConnection lc = levi_civita(cf);
  auto nJ = nabla_J(lc, J);

  NearlyKahlerReport rep;
  double sym = 0.0, mag = 0.0;
  for (int A : cf.m_indices())
    for (int B : cf.m_indices()) {
      Eigen::VectorXd v = nJ[A].col(B) + nJ[B].col(A);
      sym = std::max(sym, v.cwiseAbs().maxCoeff());
      mag = std::max(mag, nJ[A].col(B).cwiseAbs().maxCoeff());
    }
  rep.sym_residual = sym;
  rep.is_kahler = mag <= tol;
  rep.is_nk = sym <= tol;

  MultiForm Om = kaehler_form(cf, J);
  auto dOm = dense_coefficients(d_invariant(Om, cf));
  double relnk = 0.0;
  for (int A : cf.m_indices())
    for (int B : cf.m_indices())
      for (int C : cf.m_indices()) {
        double lhs = 4.0 * value3(dOm, n, A, B, C);
        // N(J e_A, e_B, e_C)
        Eigen::VectorXd eB = Eigen::VectorXd::Zero(n), eC = Eigen::VectorXd::Zero(n);
        eB[B] = 1.0; eC[C] = 1.0;
        Eigen::VectorXd JeA = J.col(A);
        Eigen::VectorXd Nv = cf.bracket(J * JeA, J * eB) - cf.bracket(JeA, eB) -
                             J * cf.bracket(J * JeA, eB) - J * cf.bracket(JeA, J * eB);
        double mid = 3.0 * (g * Nv)[C] * 1.0;
        double rhs = -12.0 * (g * (nJ[A] * eB))[C];
        relnk = std::max(relnk, std::max(std::abs(lhs - mid), std::abs(lhs - rhs)));
      }
  rep.relnk_residual = relnk;

  // constant type fit: ||(nabla_A J) e_B||^2 = a/2 (g_AA g_BB - g_AB^2 - Omega_AB^2)
  double num = 0.0, den = 0.0;
  for (int A : cf.m_indices())
    for (int B : cf.m_indices()) {
      Eigen::VectorXd w = nJ[A].col(B);
      double lhs = w.dot(g * w);
      Eigen::VectorXd eA = Eigen::VectorXd::Zero(n), eB = Eigen::VectorXd::Zero(n);
      eA[A] = 1.0; eB[B] = 1.0;
      double rhs = 0.5 * (g(A, A) * g(B, B) - g(A, B) * g(A, B) -
                          std::pow(eA.dot(g * (J * eB)), 2));
      num += lhs * rhs;
      den += rhs * rhs;
    }
  if (den > 1e-14) {
    double a = num / den;
    rep.type_constant = a;
    double res = 0.0;
    for (int A : cf.m_indices())
      for (int B : cf.m_indices()) {
        Eigen::VectorXd w = nJ[A].col(B);
        Eigen::VectorXd eA = Eigen::VectorXd::Zero(n), eB = Eigen::VectorXd::Zero(n);
        eA[A] = 1.0; eB[B] = 1.0;
        double rhs = 0.5 * a * (g(A, A) * g(B, B) - g(A, B) * g(A, B) -
                                std::pow(eA.dot(g * (J * eB)), 2));
        res = std::max(res, std::abs(w.dot(g * w) - rhs));
      }
    rep.type_residual = res;
  } else {
    rep.type_constant = 0.0;
  }
  return rep;
}

double lagrangian_par_residual(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                               std::span<const int> tangent_indices) {
  const auto& g = cf.metric().g();
  FrameConnection lc = levi_civita(cf);
  auto nJ = nabla_J(lc, J);
  double mx = 0.0;
  for (int X : tangent_indices)
    for (int Y : tangent_indices)
      for (int Z : tangent_indices) {
        Eigen::VectorXd eY = Eigen::VectorXd::Zero(cf.dim());
        eY[Y] = 1.0;
        mx = std::max(mx, std::abs((g * (nJ[X] * eY))[Z]));
      }
  return mx;
}

}  // namespace calib
