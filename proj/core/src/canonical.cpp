#include "calib/canonical.hpp"

#include <cmath>

namespace calib {

namespace {

// matrix action on forms by index insertion: (X . a) = sum slots replaced
MultiForm matrix_action(const Eigen::MatrixXd& X, const MultiForm& a) {
  const int n = a.dim();
  MultiForm out(a.degree(), n, a.kind());
  for (int C = 0; C < n; ++C) {
    Eigen::VectorXd eC = Eigen::VectorXd::Zero(n);
    eC[C] = 1.0;
    MultiForm iC = interior(eC, a);
    for (int A = 0; A < n; ++A) {
      if (X(C, A) == 0.0) continue;
      out += X(C, A) * wedge(MultiForm::basis(n, {A + 1}), iC);
    }
  }
  return out;
}

}  // namespace

const MultiForm& HolonomyStructure::form(const std::string& name) const {
  auto it = forms.find(name);
  if (it == forms.end()) throw std::invalid_argument("no such form: " + name);
  return it->second;
}

MultiForm HolonomyStructure::phi_k(int k) const {
  if (kind != HolonomyKind::unitary && kind != HolonomyKind::special_unitary)
    throw std::invalid_argument("phi_k needs a unitary structure");
  const MultiForm& Om = form("Omega");
  MultiForm acc = MultiForm::constant(dim, 1.0);
  double fact = 1.0;
  for (int i = 1; i <= k; ++i) {
    acc = wedge(acc, Om);
    fact *= i;
  }
  return (1.0 / fact) * acc;
}

HolonomyStructure build_unitary(int n) {
  if (n < 1) throw std::invalid_argument("build_unitary: n >= 1");
  const int d = 2 * n;
  HolonomyStructure s;
  s.kind = HolonomyKind::unitary;
  s.dim = d;
  // orientation so that the SU-normalization (nvol) holds with the block
  // frame order (1..n, 1'..n')
  int orient = (((n - 1) * n / 2) % 2 == 0) ? +1 : -1;
  s.metric = FrameMetric::euclidean(d, orient);
  MultiForm Om(2, d);
  for (int a = 0; a < n; ++a) Om.add_term((Mask{1} << a) | (Mask{1} << (n + a)), 1.0);
  s.forms["Omega"] = Om;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d, d);
  for (int a = 0; a < n; ++a) {
    J(a, n + a) = 1.0;    // J e_{a'} = e_a
    J(n + a, a) = -1.0;   // J e_a = -e_{a'}
  }
  s.J = J;
  return s;
}

HolonomyStructure build_special_unitary(int n) {
  if (n < 2) throw std::invalid_argument("build_special_unitary: n >= 2");
  HolonomyStructure s = build_unitary(n);
  s.kind = HolonomyKind::special_unitary;
  const int d = 2 * n;
  MultiForm psi = MultiForm::constant(d, cplx(1.0, 0.0)).promoted();
  for (int a = 0; a < n; ++a) {
    MultiForm z(1, d, ScalarKind::complex_);
    z.add_term(Mask{1} << a, 1.0);
    z.add_term(Mask{1} << (n + a), cplx(0.0, 1.0));
    psi = wedge(psi, z);
  }
  s.forms["psi_n0"] = psi;
  s.forms["re_psi"] = psi.real_part();
  s.forms["im_psi"] = psi.imag_part();
  return s;
}

HolonomyStructure build_g2() {
  HolonomyStructure s;
  s.kind = HolonomyKind::g2;
  s.dim = 7;
  s.metric = FrameMetric::euclidean(7);
  MultiForm psi = MultiForm::basis(7, {1, 2, 3});
  psi += MultiForm::basis(7, {1, 4, 5});
  psi += MultiForm::basis(7, {1, 6, 7}, -1.0);
  psi += MultiForm::basis(7, {2, 4, 6});
  psi += MultiForm::basis(7, {2, 5, 7});
  psi += MultiForm::basis(7, {3, 4, 7});
  psi += MultiForm::basis(7, {3, 5, 6}, -1.0);
  s.forms["psi"] = psi;
  s.forms["star_psi"] = hodge_star(psi, s.metric);

  // the anti-self-dual 2-forms pairing with e^1, e^2, e^3 in psi
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Zero(7);
    ei[i] = 1.0;
    MultiForm Oi = interior(ei, psi);
    // drop the e^{123} contribution, keep the 4567 block
    std::vector<int> blk{3, 4, 5, 6};
    MultiForm blk_form = restrict_to(Oi, blk);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4, 7);
    for (int p = 0; p < 4; ++p) E(p, blk[p]) = 1.0;
    s.asd_basis.push_back(pullback(blk_form, E));
  }

  auto c3 = [](std::initializer_list<int> a, std::initializer_list<int> b,
               std::initializer_list<int> cc, std::initializer_list<int> dd,
               double sa, double sb, double sc, double sd) {
    MultiForm f = MultiForm::basis(7, a, sa);
    f += MultiForm::basis(7, b, sb);
    f += MultiForm::basis(7, cc, sc);
    f += MultiForm::basis(7, dd, sd);
    return f;
  };
  std::vector<MultiForm> chi;
  chi.push_back(c3({2,5,6},{2,4,7},{3,4,6},{3,5,7}, 1,-1, 1, 1));
  chi.push_back(c3({1,4,7},{1,5,6},{3,4,5},{3,6,7}, 1,-1,-1, 1));
  chi.push_back(c3({2,4,5},{2,6,7},{1,4,6},{1,5,7}, 1,-1,-1,-1));
  chi.push_back(c3({5,6,7},{1,2,7},{1,3,6},{2,3,5}, 1,-1, 1,-1));
  chi.push_back(c3({1,2,6},{4,6,7},{1,3,7},{2,3,4}, 1,-1, 1, 1));
  chi.push_back(c3({4,5,7},{1,2,5},{1,3,4},{2,3,7}, 1,-1,-1, 1));
  chi.push_back(c3({1,2,4},{4,5,6},{1,3,5},{2,3,6}, 1,-1,-1,-1));
  s.chi = VectorForm(std::move(chi));
  return s;
}

HolonomyStructure build_spin7() {
  HolonomyStructure s;
  s.kind = HolonomyKind::spin7;
  s.dim = 8;
  s.metric = FrameMetric::euclidean(8);
  auto b = [](std::initializer_list<int> i, double c = 1.0) {
    return MultiForm::basis(8, i, c);
  };
  MultiForm p12 = b({1,2}) - b({3,4}), q12 = b({5,6}) - b({7,8});
  MultiForm p13 = b({1,3}) + b({2,4}), q13 = b({5,7}) + b({6,8});
  MultiForm p14 = b({1,4}) - b({2,3}), q14 = b({5,8}) - b({6,7});
  MultiForm Phi = b({1,2,3,4}) + wedge(p12, q12) + wedge(p13, q13) + wedge(p14, q14) +
                  b({5,6,7,8});
  s.forms["Phi"] = Phi;

  std::vector<MultiForm> tau;
  tau.push_back(wedge(p14, q13) - wedge(p13, q14));
  tau.push_back(wedge(p12, q14) - wedge(p14, q12));
  tau.push_back(wedge(p13, q12) - wedge(p12, q13));
  {
    MultiForm t = b({2,3,4,5}) - b({1,3,4,6}) + b({1,2,4,7}) - b({1,2,3,8});
    t += b({1,6,7,8}) - b({2,5,7,8}) + b({3,5,6,8}) - b({4,5,6,7});
    tau.push_back(t);
  }
  {
    MultiForm t = b({2,3,4,6}) + b({1,3,4,5}) + b({1,2,4,8}) + b({1,2,3,7});
    t += -b({2,6,7,8}) - b({1,5,7,8}) - b({4,5,6,8}) - b({3,5,6,7});
    tau.push_back(t);
  }
  {
    MultiForm t = b({2,3,4,7}) + b({1,3,4,8}) - b({1,2,4,5}) - b({1,2,3,6});
    t += -b({3,6,7,8}) - b({4,5,7,8}) + b({1,5,6,8}) + b({2,5,6,7});
    tau.push_back(t);
  }
  {
    MultiForm t = b({2,3,4,8}) - b({1,3,4,7}) - b({1,2,4,6}) + b({1,2,3,5});
    t += -b({4,6,7,8}) + b({3,5,7,8}) + b({2,5,6,8}) - b({1,5,6,7});
    tau.push_back(t);
  }
  s.tau = VectorForm(std::move(tau));
  return s;
}

std::vector<MultiForm> asd_basis_r4() {
  auto b = [](std::initializer_list<int> i, double c = 1.0) {
    return MultiForm::basis(4, i, c);
  };
  return {b({1,2}) - b({3,4}), b({1,3}) + b({2,4}), b({1,4}) - b({2,3})};
}

std::vector<Eigen::MatrixXd> form_stabilizer_algebra(const MultiForm& phi, double tol) {
  const int n = phi.dim();
  // so(n) basis E_{pq}, p<q; solve (X . phi) = 0
  std::vector<std::pair<int, int>> gen;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) gen.emplace_back(p, q);
  // collect the action of each generator as a column
  std::vector<Mask> rows;
  const Mask full = (Mask{1} << n) - 1;
  for (Mask m = 0; m <= full; ++m)
    if (popcount(m) == phi.degree()) rows.push_back(m);
  Eigen::MatrixXd A(static_cast<int>(rows.size()), static_cast<int>(gen.size()));
  for (std::size_t gidx = 0; gidx < gen.size(); ++gidx) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
    X(gen[gidx].first, gen[gidx].second) = 1.0;
    X(gen[gidx].second, gen[gidx].first) = -1.0;
    MultiForm Xphi = matrix_action(X, phi);
    for (std::size_t r = 0; r < rows.size(); ++r)
      A(static_cast<int>(r), static_cast<int>(gidx)) = Xphi.coeff(rows[r]).real();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  auto sv = svd.singularValues();
  std::vector<Eigen::MatrixXd> out;
  for (int i = 0; i < svd.matrixV().cols(); ++i) {
    if (i < sv.size() && sv[i] > tol * sv[0]) continue;
    Eigen::VectorXd coefs = svd.matrixV().col(i);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t gidx = 0; gidx < gen.size(); ++gidx) {
      X(gen[gidx].first, gen[gidx].second) += coefs[static_cast<int>(gidx)];
      X(gen[gidx].second, gen[gidx].first) -= coefs[static_cast<int>(gidx)];
    }
    out.push_back(X);
  }
  return out;
}

}  // namespace calib
