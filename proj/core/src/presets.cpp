#include "calib/presets.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace calib {

namespace {

constexpr double kPi = 3.14159265358979323846;

void su2_block(Tensor3& c, int o) {
  // [e_{o+i}, e_{o+j}] = eps_{ijk} e_{o+k}; equivalently d sigma^1 = -sigma^23
  const int eps[3][3][3] = {{{0,0,0},{0,0,1},{0,-1,0}},
                            {{0,0,-1},{0,0,0},{1,0,0}},
                            {{0,1,0},{-1,0,0},{0,0,0}}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c.at(o + i, o + j, o + k) = eps[i][j][k];
}

Tensor3 lie_from_matrices(const std::vector<Eigen::MatrixXcd>& basis) {
  const int n = static_cast<int>(basis.size());
  const int rows = static_cast<int>(basis[0].size()) * 2;
  Eigen::MatrixXd M(rows, n);
  auto flatten = [&](const Eigen::MatrixXcd& X) {
    Eigen::VectorXd v(rows);
    int p = 0;
    for (int i = 0; i < X.rows(); ++i)
      for (int j = 0; j < X.cols(); ++j) {
        v[p++] = X(i, j).real();
        v[p++] = X(i, j).imag();
      }
    return v;
  };
  for (int b = 0; b < n; ++b) M.col(b) = flatten(basis[b]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  Tensor3 c(n);
  for (int B = 0; B < n; ++B)
    for (int C = 0; C < n; ++C) {
      Eigen::MatrixXcd br = basis[B] * basis[C] - basis[C] * basis[B];
      Eigen::VectorXd rhs = flatten(br);
      Eigen::VectorXd coef = qr.solve(rhs);
      if ((M * coef - rhs).cwiseAbs().maxCoeff() > 1e-10)
        throw std::logic_error("bracket does not close on the given basis");
      for (int A = 0; A < n; ++A)
        c.at(A, B, C) = std::abs(coef[A]) < 1e-13 ? 0.0 : coef[A];
    }
  return c;
}

Eigen::MatrixXcd so_gen(int n, int i, int j) {  // 1-based E_{ij}
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(i - 1, j - 1) = 1.0;
  m(j - 1, i - 1) = -1.0;
  return m;
}

MultiForm complex_line(int dim, int re_idx, int im_idx, double im_sign = 1.0) {
  MultiForm z(1, dim, ScalarKind::complex_);
  z.add_term(Mask{1} << re_idx, 1.0);
  z.add_term(Mask{1} << im_idx, cplx(0.0, im_sign));
  return z;
}

MultiForm product_form(std::initializer_list<MultiForm> factors, cplx scale = 1.0) {
  MultiForm acc;
  bool first = true;
  for (const auto& f : factors) {
    acc = first ? f : wedge(acc, f);
    first = false;
  }
  return scale * acc;
}

// ---- individual preset builders ----

Preset make_s3() {
  Tensor3 c(3);
  su2_block(c, 0);
  Preset p;
  p.name = "s3";
  p.description = "SU(2) with bi-invariant metric, left-invariant coframe";
  p.cf = CoframeAlgebra(std::move(c), FrameMetric::euclidean(3));
  p.conn = flat_left_connection(p.cf);
  return p;
}

Preset make_hopf_s3() {
  Preset p = make_s3();
  p.name = "hopf_s3";
  p.description = "S^3 with the degree-one calibration sigma^3 (Hopf fibres)";
  p.forms["sigma3"] = MultiForm::basis(3, {3});
  p.parallel_forms = {"sigma3"};
  return p;
}

Preset make_s3xs3_hermitian() {
  Tensor3 c(6);
  su2_block(c, 0);
  su2_block(c, 3);
  // (nvol) fixes the orientation of the (sigma, sigma~) frame order
  CoframeAlgebra cf(std::move(c), FrameMetric::euclidean(6, -1));

  Preset p;
  p.name = "s3xs3_hermitian";
  p.description = "S^3 x S^3 hermitian structure, Omega = s12 - t12 + s3^t3";
  p.cf = cf;
  p.conn = flat_left_connection(cf);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
  // Omega = e12 - e45 + e36 and Omega = g(., J.)
  J(0, 1) = 1; J(1, 0) = -1;   // J e2 = e1
  J(3, 4) = -1; J(4, 3) = 1;   // J e5 = -e4
  J(2, 5) = 1; J(5, 2) = -1;   // J e6 = e3
  p.J = J;
  MultiForm Om = MultiForm::basis(6, {1, 2}) - MultiForm::basis(6, {4, 5}) +
                 MultiForm::basis(6, {3, 6});
  MultiForm psi = product_form({complex_line(6, 0, 1), complex_line(6, 3, 4, -1.0),
                                complex_line(6, 2, 5)},
                               std::exp(cplx(0.0, kPi / 4.0)));
  p.forms["Omega"] = Om;
  p.forms["psi"] = psi;
  p.forms["re_psi"] = psi.real_part();
  p.forms["im_psi"] = psi.imag_part();
  p.parallel_forms = {"Omega", "psi"};

  // diagonal embedding sigma^i|_X = sigma~^i|_X in an adapted frame with
  // columns (t_i, n_i), t_i = (e_i + e_{3+i})/sqrt2, n_i = (e_i - e_{3+i})/sqrt2;
  // tangent column order fixed so that Re psi evaluates to +1 on the plane
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(6, 6);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < 3; ++i) {
    Q(i, i) = s;
    Q(3 + i, i) = s;
    Q(i, 3 + i) = s;
    Q(3 + i, 3 + i) = -s;
  }
  MultiForm re_rot = pullback(psi.real_part(), Q);
  double val = re_rot.coeff(0b111).real();
  if (val < 0.0) {
    Q.col(1).swap(Q.col(2));
    Q.col(4).swap(Q.col(5));
  }
  EmbeddingSpec diag{"diag_s3", "sas", {0, 1, 2}, Q};
  p.embeddings.push_back(std::move(diag));
  return p;
}

Preset make_gxg_su2(const std::string& name) {
  Tensor3 c(6);
  su2_block(c, 0);
  su2_block(c, 3);
  CoframeAlgebra cf(std::move(c), FrameMetric::euclidean(6, -1));

  Preset p;
  p.name = name;
  p.description = "G x G almost hermitian structure (G = SU(2)), Omega = sum s^a ^ t^a";
  p.cf = cf;
  p.conn = flat_left_connection(cf);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
  for (int a = 0; a < 3; ++a) {
    J(a, 3 + a) = 1;   // J e_{a'} = e_a
    J(3 + a, a) = -1;
  }
  p.J = J;
  MultiForm Om(2, 6);
  for (int a = 0; a < 3; ++a) Om.add_term((Mask{1} << a) | (Mask{1} << (3 + a)), 1.0);
  MultiForm psi = product_form({complex_line(6, 0, 3), complex_line(6, 1, 4),
                                complex_line(6, 2, 5)});
  // second structure: the (3,0)-form calibrating {e} x G (repeated-factor
  // misprint in the source corrected to the evident third factor)
  MultiForm psi2 = product_form({complex_line(6, 0, 3), complex_line(6, 1, 4),
                                 complex_line(6, 2, 5)},
                                cplx(0.0, 1.0));
  p.forms["Omega"] = Om;
  p.forms["psi"] = psi;
  p.forms["re_psi"] = psi.real_part();
  p.forms["im_psi"] = psi.imag_part();
  p.forms["psi2"] = psi2;
  p.parallel_forms = {"Omega", "psi", "psi2"};
  p.embeddings.push_back({"g_x_e", "sas", {0, 1, 2}});
  p.embeddings.push_back({"e_x_g", "sas", {3, 4, 5}});
  return p;
}

Preset make_spin4_b13() {
  // so(4) with the left-invariant Einstein metric B_{1/3}; orthonormal basis
  // e1 = sqrt3 E12, e2 = sqrt3 E13, e3 = sqrt3 E23, e4 = E14, e5 = E24, e6 = E34
  const double s3 = std::sqrt(3.0);
  std::vector<Eigen::MatrixXcd> basis = {
      s3 * so_gen(4, 1, 2), s3 * so_gen(4, 1, 3), s3 * so_gen(4, 2, 3),
      so_gen(4, 1, 4), so_gen(4, 2, 4), so_gen(4, 3, 4)};
  CoframeAlgebra cf(lie_from_matrices(basis), FrameMetric::euclidean(6));

  Preset p;
  p.name = "spin4_b13";
  p.description = "Spin(4) = S^3 x S^3 with B_{1/3} metric, nearly Kahler";
  p.cf = cf;
  p.conn = levi_civita(cf);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
  J(5, 0) = 1; J(0, 5) = -1;   // J e1 = e6
  J(4, 1) = -1; J(1, 4) = 1;   // J e2 = -e5
  J(3, 2) = 1; J(2, 3) = -1;   // J e3 = e4
  p.J = J;
  p.forms["Omega"] = MultiForm::basis(6, {1, 6}, -1.0) + MultiForm::basis(6, {2, 5}) +
                     MultiForm::basis(6, {3, 4}, -1.0);
  p.embeddings.push_back({"lagrangian_s3", "nk_sas", {0, 1, 2}});
  return p;
}

Preset make_flag_f12() {
  // U(3)/T^3: m-block first (paper basis), then the three torus directions
  auto m_elem = [](cplx a, cplx b, cplx cc) {
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(3, 3);
    X(0, 1) = a; X(1, 0) = -std::conj(a);
    X(0, 2) = b; X(2, 0) = -std::conj(b);
    X(1, 2) = cc; X(2, 1) = -std::conj(cc);
    return X;
  };
  const double s2 = 1.0 / std::sqrt(2.0);
  const cplx i(0.0, 1.0);
  std::vector<Eigen::MatrixXcd> basis = {
      m_elem(s2, 0, 0), m_elem(i * s2, 0, 0),   // e1, e2 = J e1
      m_elem(0, s2, 0), m_elem(0, i * s2, 0),   // e3, e4 = -J e3
      m_elem(0, 0, s2), m_elem(0, 0, i * s2),   // e5, e6 = J e5
  };
  for (int d = 0; d < 3; ++d) {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(3, 3);
    H(d, d) = i;
    basis.push_back(H);
  }
  CoframeAlgebra cf(lie_from_matrices(basis), FrameMetric::euclidean(9), {},
                    {6, 7, 8});

  Preset p;
  p.name = "flag_f12";
  p.description = "flag manifold F_{1,2} = U(3)/T^3, invariant nearly Kahler structure";
  p.cf = cf;
  p.conn = levi_civita(cf);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(9, 9);
  auto set_pair = [&](int a, int b, double s) {
    // J e_a = s e_b, J e_b = -s e_a
    J(b, a) = s;
    J(a, b) = -s;
  };
  set_pair(0, 1, 1.0);   // e2 = J e1
  set_pair(2, 3, -1.0);  // e4 = -J e3
  set_pair(4, 5, 1.0);   // e6 = J e5
  p.J = J;
  p.embeddings.push_back({"lagrangian_s3", "nk_sas", {0, 2, 4}});
  return p;
}

Preset make_g2_group() {
  // S^3 x S~^3 x S^1, frame (s1,s2,s3, t0,t1,t2,t3); psi is the canonical
  // G2 three-form in this order
  Tensor3 c(7);
  su2_block(c, 0);
  su2_block(c, 4);
  CoframeAlgebra cf(std::move(c), FrameMetric::euclidean(7));

  Preset p;
  p.name = "g2_group";
  p.description = "group manifold S^3 x S~^3 x S^1 with left-invariant G2 structure";
  p.cf = cf;
  p.conn = flat_left_connection(cf);
  HolonomyStructure g2 = build_g2();
  p.forms["psi"] = g2.form("psi");
  p.forms["star_psi"] = g2.form("star_psi");
  for (int A = 0; A < 7; ++A) {
    p.forms["chi" + std::to_string(A + 1)] = (*g2.chi)[A];
  }
  p.parallel_forms = {"psi", "star_psi"};
  p.embeddings.push_back({"assoc_s3", "associative", {0, 1, 2}});
  p.embeddings.push_back({"coassoc_s1xs3", "coassociative", {3, 4, 5, 6}});
  return p;
}

Preset make_cayley_group() {
  // S^3 x S~^3 x S^1 x S~^1, frame (s0, s1,s2,s3, t0, t1,t2,t3)
  Tensor3 c(8);
  su2_block(c, 1);
  su2_block(c, 5);
  CoframeAlgebra cf(std::move(c), FrameMetric::euclidean(8));

  Preset p;
  p.name = "cayley_group";
  p.description = "group manifold S^3 x S~^3 x T^2 with left-invariant Spin(7) structure";
  p.cf = cf;
  p.conn = flat_left_connection(cf);
  HolonomyStructure s7 = build_spin7();
  p.forms["Phi"] = s7.form("Phi");
  for (int A = 0; A < 7; ++A)
    p.forms["tau" + std::to_string(A + 1)] = (*s7.tau)[A];
  p.parallel_forms = {"Phi"};
  p.embeddings.push_back({"cayley_s1xs3", "cayley", {0, 1, 2, 3}});
  return p;
}

Preset make_iwasawa() {
  // complex Heisenberg quotient; real frame (x1,x2,x3,y1,y2,y3) with
  // alpha_j = x^j + i y^j, d alpha3 = -alpha1 ^ alpha2
  Tensor3 c(6);
  c.at(2, 0, 1) = 1;  c.at(2, 1, 0) = -1;   // dx3 = -x1^x2 + y1^y2
  c.at(2, 3, 4) = -1; c.at(2, 4, 3) = 1;
  c.at(5, 0, 4) = 1;  c.at(5, 4, 0) = -1;   // dy3 = -x1^y2 - y1^x2
  c.at(5, 1, 3) = -1; c.at(5, 3, 1) = 1;
  CoframeAlgebra cf(std::move(c), FrameMetric::euclidean(6, -1));

  Preset p;
  p.name = "iwasawa";
  p.description = "Iwasawa manifold (complex Heisenberg / Gaussian integers), flat Chern connection";
  p.cf = cf;
  p.conn = flat_left_connection(cf);  // = the Chern connection of this metric
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(6, 6);
  for (int j = 0; j < 3; ++j) {
    J(3 + j, j) = -1;  // J x_j = -y_j
    J(j, 3 + j) = 1;
  }
  p.J = J;
  MultiForm Om(2, 6);
  for (int j = 0; j < 3; ++j) Om.add_term((Mask{1} << j) | (Mask{1} << (3 + j)), 1.0);
  MultiForm psi = product_form({complex_line(6, 0, 3), complex_line(6, 1, 4),
                                complex_line(6, 2, 5)});
  p.forms["Omega"] = Om;
  p.forms["psi"] = psi;
  p.forms["re_psi"] = psi.real_part();
  p.forms["im_psi"] = psi.imag_part();
  p.parallel_forms = {"Omega", "psi"};
  p.embeddings.push_back({"real_iwasawa", "sas", {0, 1, 2}});
  return p;
}

Preset make_so5_so3() {
  // so(5) split: sigma (self-dual, stabilizer), rho (anti-self-dual), e (R^4);
  // frame scales (rho, sqrt5 e) make the structure nearly parallel.
  std::vector<Eigen::MatrixXcd> basis;
  auto sd = [&](int a, int b, int cc, int d, double s2) {
    return 0.5 * (so_gen(5, a, b) + s2 * so_gen(5, cc, d));
  };
  basis.push_back(sd(1, 2, 3, 4, +1.0));   // sigma_1..3 self-dual
  basis.push_back(sd(1, 3, 2, 4, -1.0));
  basis.push_back(sd(1, 4, 2, 3, +1.0));
  basis.push_back(sd(1, 2, 3, 4, -1.0));   // rho_1..3 anti-self-dual
  basis.push_back(sd(1, 3, 2, 4, +1.0));
  basis.push_back(sd(1, 4, 2, 3, -1.0));
  // e-frame forms carry scale sqrt5, so the basis vectors carry 1/sqrt5;
  // this is the scaling with d psi = lambda * (*psi), lambda = -6/5
  const double z = 1.0 / std::sqrt(5.0);
  for (int a = 1; a <= 4; ++a) basis.push_back(z * so_gen(5, a, 5));
  CoframeAlgebra cf(lie_from_matrices(basis), FrameMetric::euclidean(10), {},
                    {0, 1, 2});

  Preset p;
  p.name = "so5_so3";
  p.description = "SO(5)/SO(3) extended coframe with stabilizer forms, nearly parallel G2 structure";
  p.cf = cf;
  p.conn = levi_civita(cf);
  // psi = rho^123 + sum rho^i ^ Omega_i on the e-block (m-frame indices 3..9)
  MultiForm psi = MultiForm::basis(10, {4, 5, 6});
  auto b10 = [](std::initializer_list<int> idx, double s = 1.0) {
    return MultiForm::basis(10, idx, s);
  };
  std::vector<MultiForm> Om = {b10({7, 8}) - b10({9, 10}), b10({7, 9}) + b10({8, 10}),
                               b10({7, 10}) - b10({8, 9})};
  for (int i = 0; i < 3; ++i) psi += wedge(MultiForm::basis(10, {4 + i}), Om[i]);
  p.forms["psi"] = psi;
  return p;
}

Preset make_flat(const std::string& name, int n) {
  Preset p;
  p.name = name;
  p.cf = CoframeAlgebra::flat(n);
  p.conn = flat_left_connection(p.cf);
  if (n == 7) {
    HolonomyStructure g2 = build_g2();
    p.forms["psi"] = g2.form("psi");
    p.forms["star_psi"] = g2.form("star_psi");
    p.parallel_forms = {"psi", "star_psi"};
    p.embeddings.push_back({"assoc_plane", "associative", {0, 1, 2}});
    p.embeddings.push_back({"coassoc_plane", "coassociative", {3, 4, 5, 6}});
    p.description = "flat R^7 with the canonical G2 structure";
  } else if (n == 8) {
    HolonomyStructure s7 = build_spin7();
    p.forms["Phi"] = s7.form("Phi");
    p.parallel_forms = {"Phi"};
    p.embeddings.push_back({"cayley_plane", "cayley", {0, 1, 2, 3}});
    p.description = "flat R^8 with the canonical Spin(7) structure";
  } else if (n == 6) {
    HolonomyStructure su3 = build_special_unitary(3);
    p.cf = CoframeAlgebra::flat(6, su3.metric.orientation());
    p.J = su3.J;
    p.forms["Omega"] = su3.form("Omega");
    p.forms["psi"] = su3.form("psi_n0");
    p.forms["re_psi"] = su3.form("re_psi");
    p.forms["im_psi"] = su3.form("im_psi");
    p.parallel_forms = {"Omega", "psi"};
    p.embeddings.push_back({"slag_plane", "sas", {0, 1, 2}});
    p.description = "flat C^3 with the canonical SU(3) structure";
  }
  return p;
}

using Factory = Preset (*)();

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> reg = {
      {"s3", +[] { return make_s3(); }},
      {"hopf_s3", +[] { return make_hopf_s3(); }},
      {"s3xs3_hermitian", +[] { return make_s3xs3_hermitian(); }},
      {"s3xs3_almost_hermitian", +[] { return make_gxg_su2("s3xs3_almost_hermitian"); }},
      {"gxg_su2", +[] { return make_gxg_su2("gxg_su2"); }},
      {"spin4_b13", +[] { return make_spin4_b13(); }},
      {"flag_f12", +[] { return make_flag_f12(); }},
      {"g2_group", +[] { return make_g2_group(); }},
      {"cayley_group", +[] { return make_cayley_group(); }},
      {"iwasawa", +[] { return make_iwasawa(); }},
      {"so5_so3", +[] { return make_so5_so3(); }},
      {"flat_c3", +[] { return make_flat("flat_c3", 6); }},
      {"flat_r7", +[] { return make_flat("flat_r7", 7); }},
      {"flat_r8", +[] { return make_flat("flat_r8", 8); }},
  };
  return reg;
}

}  // namespace

const MultiForm& Preset::form(const std::string& key) const {
  auto it = forms.find(key);
  if (it == forms.end()) throw std::invalid_argument(name + ": no form " + key);
  return it->second;
}

const EmbeddingSpec& Preset::embedding(const std::string& ename) const {
  for (auto& e : embeddings)
    if (e.name == ename) return e;
  throw std::invalid_argument(name + ": no embedding " + ename);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (auto& [k, f] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

Preset preset(const std::string& name) {
  auto it = registry().find(name);
  if (it == registry().end()) {
    std::string msg = "unknown preset '" + name + "'; registry:";
    for (auto& n : preset_names()) msg += " " + n;
    throw std::invalid_argument(msg);
  }
  return it->second();
}

std::string export_preset(const std::string& name) {
  Preset p = preset(name);
  std::ostringstream os;
  os.precision(17);
  os << "preset " << p.name << "\n";
  os << "description " << p.description << "\n";
  os << "dim " << p.cf.dim() << "\n";
  os << "orientation " << p.cf.metric().orientation() << "\n";
  if (!p.cf.stabilizer_indices().empty()) {
    os << "stabilizer";
    for (int s : p.cf.stabilizer_indices()) os << " " << s + 1;
    os << "\n";
  }
  os << "metric";
  for (int i = 0; i < p.cf.dim(); ++i)
    for (int j = 0; j < p.cf.dim(); ++j) os << " " << p.cf.metric().g()(i, j);
  os << "\n";
  for (int A = 0; A < p.cf.dim(); ++A)
    for (int B = 0; B < p.cf.dim(); ++B)
      for (int C = B + 1; C < p.cf.dim(); ++C)
        if (p.cf.bracket(A, B, C) != 0.0)
          os << "c " << A + 1 << " " << B + 1 << " " << C + 1 << " "
             << p.cf.bracket(A, B, C) << "\n";
  for (auto& [key, f] : p.forms) {
    os << "form " << key << " degree " << f.degree();
    for (auto& [m, v] : f.terms()) {
      os << "  (";
      bool first = true;
      for (int i : mask_indices(m)) {
        os << (first ? "" : ",") << i + 1;
        first = false;
      }
      os << ")=" << v.real();
      if (v.imag() != 0.0) os << (v.imag() > 0 ? "+" : "") << v.imag() << "i";
    }
    os << "\n";
  }
  for (auto& e : p.embeddings) {
    os << "embedding " << e.name << " kind " << e.kind << " tangent";
    for (int t : e.tangent) os << " " << t + 1;
    os << "\n";
  }
  return os.str();
}

Eigen::Vector2d squashed_s7_residual(double y, double z, double lambda) {
  Eigen::Vector2d r;
  r[0] = -3.0 * y - lambda * z * z;
  r[1] = 0.5 * y * y + z * z + 0.5 * lambda * y * z * z;
  return r;
}

Eigen::Vector3d aloff_wallach_residual(int n, int m, double x, double y, double z, double f) {
  const double delta = std::atan2(-static_cast<double>(n), static_cast<double>(m));
  const double cd = std::cos(delta), sd = std::sin(delta);
  const double lambda = x * x + y * y + z * z;
  const double s8 = 2.0 * std::sqrt(2.0);
  Eigen::Vector3d r;
  r[0] = 4 * x * y * z + s8 * f * (y * y * (cd - sd) + z * z * sd) - lambda * y * y * z * z;
  r[1] = 4 * x * y * z + s8 * f * (x * x * (cd - sd) - z * z * cd) - lambda * x * x * z * z;
  r[2] = 4 * x * y * z + s8 * f * (x * x * sd - y * y * cd) - lambda * y * y * x * x;
  return r;
}

std::optional<AWRoot> solve_aloff_wallach(int n, int m, std::uint64_t seed, int restarts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.2, 2.0);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  std::optional<AWRoot> best;
  for (int r = 0; r < restarts; ++r) {
    Eigen::Vector4d v(uni(rng), uni(rng), 1.0, unif(rng));  // z pinned to 1
    for (int it = 0; it < 120; ++it) {
      Eigen::Vector3d F = aloff_wallach_residual(n, m, v[0], v[1], v[2], v[3]);
      if (F.norm() < 1e-14) break;
      Eigen::Matrix3d Jm;  // wrt (x, y, f), z fixed
      const double h = 1e-7;
      for (int c = 0; c < 3; ++c) {
        Eigen::Vector4d vp = v, vm = v;
        int slot = (c == 2) ? 3 : c;
        vp[slot] += h;
        vm[slot] -= h;
        Jm.col(c) = (aloff_wallach_residual(n, m, vp[0], vp[1], vp[2], vp[3]) -
                     aloff_wallach_residual(n, m, vm[0], vm[1], vm[2], vm[3])) /
                    (2 * h);
      }
      Eigen::Vector3d step = Jm.fullPivLu().solve(-F);
      double damp = 1.0;
      Eigen::Vector4d vn = v;
      for (int ls = 0; ls < 30; ++ls) {
        vn = v;
        vn[0] += damp * step[0];
        vn[1] += damp * step[1];
        vn[3] += damp * step[2];
        if (aloff_wallach_residual(n, m, vn[0], vn[1], vn[2], vn[3]).norm() < F.norm())
          break;
        damp *= 0.5;
      }
      v = vn;
    }
    double res = aloff_wallach_residual(n, m, v[0], v[1], v[2], v[3]).norm();
    if (res < 1e-11 && v[0] > 1e-3 && v[1] > 1e-3 && std::abs(v[3]) > 1e-6) {
      if (!best || res < best->residual) best = AWRoot{v, res};
    }
  }
  return best;
}

S6Point s6_pointwise(const Eigen::VectorXd& x_unit) {
  if (x_unit.size() != 7) throw std::invalid_argument("s6_pointwise: need a point in R^7");
  Eigen::VectorXd x = x_unit / x_unit.norm();
  HolonomyStructure g2 = build_g2();
  // orthonormal basis of the tangent space x-perp
  Eigen::FullPivLU<Eigen::MatrixXd> lu(x.transpose());
  Eigen::MatrixXd K = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
  Eigen::MatrixXd T = qr.householderQ() * Eigen::MatrixXd::Identity(7, 6);

  S6Point pt;
  pt.x = x;
  pt.tangent = T;
  MultiForm omega7 = interior(x, g2.form("psi"));
  pt.omega = pullback(omega7, T);
  // J from Omega on the tangent frame (orthonormal): J = Omega matrix
  Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(6, 6);
  auto dense = dense_coefficients(pt.omega);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) Jm(a, b) = dense[static_cast<std::size_t>(a) * 6 + b].real();
  pt.J = Jm;
  return pt;
}

GroupPoint::GroupPoint(const CoframeAlgebra& cf, std::vector<Eigen::VectorXd> factors)
    : cf_(cf) {
  const int n = cf.dim();
  // Ad(q^{-1}) = exp(-ad X_k) ... exp(-ad X_1) for q = exp(X_1)...exp(X_k)
  ad_qinv_ = Eigen::MatrixXd::Identity(n, n);
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
    Eigen::MatrixXd step = (-cf.ad(*it)).exp();
    ad_qinv_ = ad_qinv_ * step;
  }
}

Eigen::VectorXd GroupPoint::right_invariant(const Eigen::VectorXd& a) const {
  return ad_qinv_ * a;
}

Eigen::MatrixXd GroupPoint::right_invariant_derivative(const Eigen::VectorXd& a) const {
  const int n = cf_.dim();
  Eigen::VectorXd V = ad_qinv_ * a;
  Eigen::MatrixXd D(n, n);
  for (int B = 0; B < n; ++B) {
    Eigen::VectorXd eB = Eigen::VectorXd::Zero(n);
    eB[B] = 1.0;
    D.row(B) = (-cf_.ad(eB) * V).transpose();
  }
  return D;
}

GroupPoint random_subgroup_point(const CoframeAlgebra& cf, std::span<const int> tangent,
                                 std::mt19937_64& rng, int factors) {
  std::normal_distribution<double> gauss(0.0, 0.8);
  std::vector<Eigen::VectorXd> fs;
  for (int f = 0; f < factors; ++f) {
    Eigen::VectorXd X = Eigen::VectorXd::Zero(cf.dim());
    for (int t : tangent) X[t] = gauss(rng);
    fs.push_back(X);
  }
  return GroupPoint(cf, std::move(fs));
}

}  // namespace calib
