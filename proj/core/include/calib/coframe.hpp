#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "calib/multiform.hpp"

namespace calib {

// Rank-3 array of frame coefficients, t[A][B][C] with A the "output" slot.
struct Tensor3 {
  Tensor3() = default;
  explicit Tensor3(int n) : n(n), v(static_cast<std::size_t>(n) * n * n, 0.0) {}
  double& at(int A, int B, int C) { return v[(static_cast<std::size_t>(A) * n + B) * n + C]; }
  double at(int A, int B, int C) const { return v[(static_cast<std::size_t>(A) * n + B) * n + C]; }
  double norm_inf() const;
  int n = 0;
  std::vector<double> v;
};

// Constant-structure coframe: de^A = -1/2 c^A_{BC} e^B ^ e^C, equivalently
// [e_B, e_C] = c^A_{BC} e_A, with a frame metric. Homogeneous presets carry
// stabilizer directions; the metric block and connections live on the
// complementary ("m") indices.
class CoframeAlgebra {
 public:
  CoframeAlgebra() = default;
  CoframeAlgebra(Tensor3 c, FrameMetric metric,
                 std::vector<std::string> labels = {},
                 std::vector<int> stabilizer_indices = {});

  // Abelian coframe (c = 0), Euclidean metric.
  static CoframeAlgebra flat(int n, int orientation = +1);

  int dim() const { return c_.n; }
  const Tensor3& c() const { return c_; }
  const FrameMetric& metric() const { return metric_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& stabilizer_indices() const { return stab_; }
  const std::vector<int>& m_indices() const { return m_; }
  bool is_homogeneous() const { return !stab_.empty(); }

  double bracket(int A, int B, int C) const { return c_.at(A, B, C); }
  // [u, v] in frame coefficients
  Eigen::VectorXd bracket(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
  // ad_u as a matrix, (ad_u)^A_C = c^A_{BC} u^B
  Eigen::MatrixXd ad(const Eigen::VectorXd& u) const;

  // max |d(d e^A)| over A; zero iff the Jacobi identity holds
  double jacobi_residual() const;

  // Re-express everything in the frame f_a = sum_A Q(A,a) e_A, Q orthogonal.
  CoframeAlgebra rotated(const Eigen::MatrixXd& Q) const;

 private:
  Tensor3 c_;
  FrameMetric metric_;
  std::vector<std::string> labels_;
  std::vector<int> stab_, m_;
};

// Connection coefficients in the coframe: nabla_{e_B} e_C = omega^A_{BC} e_A.
struct FrameConnection {
  FrameConnection() = default;
  explicit FrameConnection(Tensor3 omega) : omega(std::move(omega)) {}
  int dim() const { return omega.n; }
  Tensor3 omega;

  // torsion T^A_{BC} under T(X,Y) = nabla_X Y - nabla_Y X - [X,Y]
  Tensor3 torsion_tensor(const CoframeAlgebra& cf) const;
  std::vector<MultiForm> torsion_two_forms(const CoframeAlgebra& cf) const;
  // the companion connection with torsion -T
  FrameConnection tilde(const CoframeAlgebra& cf) const;
  double metric_compat_residual(const FrameMetric& m) const;
};

// Maurer-Cartan / Leibniz exterior derivative of a constant-coefficient form.
MultiForm d_invariant(const MultiForm& a, const CoframeAlgebra& cf);

// Codifferential on invariant forms: delta = (-1)^{...} * d * with the frame
// metric; implemented as -g^{AB} i_{e_A} nabla^g_B for constant coefficients.
MultiForm codifferential_invariant(const MultiForm& a, const CoframeAlgebra& cf);

// Levi-Civita (Koszul on groups; Nomizu-projected Koszul on homogeneous
// presets, coefficients on the m-block).
FrameConnection levi_civita(const CoframeAlgebra& cf);

// omega = 0: the left-invariant parallelism. Torsion is -c.
FrameConnection flat_left_connection(const CoframeAlgebra& cf);

// nabla_B applied to a constant-coefficient k-form, returned as the list of
// k-forms (nabla_B a) indexed by B.
std::vector<MultiForm> covariant_derivative(const MultiForm& a, const FrameConnection& conn);
double parallel_residual(const MultiForm& a, const FrameConnection& conn);

// Lie derivative of a nabla-parallel form via the companion connection:
// L_V chi = (1/(k-1)!) chi_{A A_1...} tilde_nabla_B V^A e^B ^ e^{A_1...}.
// dV(B,A) = e_B(V^A) are the frame derivatives of the coefficients; zero for
// an invariant field.
MultiForm lie_derivative_parallel(const Eigen::VectorXd& V, const MultiForm& chi,
                                  const CoframeAlgebra& cf,
                                  const FrameConnection& conn_tilde,
                                  const Eigen::MatrixXd* dV = nullptr);

// ---- hermitian / G2 / nearly-Kahler structure analysis ----

struct HermitianPackage {
  MultiForm Omega;          // Omega(X,Y) = g(X, JY)
  MultiForm dOmega;
  MultiForm dc_Omega;       // d^c Omega(X,Y,Z) = -dOmega(JX,JY,JZ)
  Eigen::VectorXd lee_form;  // theta_i = -(nabla^g)^k Omega_{kj} J^j_i
  Tensor3 nijenhuis;         // N^A_{BC}
  FrameConnection bismut;
  FrameConnection chern;
  double bismut_torsion_3form_residual = 0.0;  // deviation from total antisymmetry
  double chern_torsion_11_residual = 0.0;      // deviation of C(J.,J.) from -C(.,.)
};

HermitianPackage hermitian_package(const CoframeAlgebra& cf, const Eigen::MatrixXd& J);

// SU(n) holonomy connection: the U(n) connection of g(nabla J)-correction
// plus the trace-part correction that makes psi parallel. Requires psi
// normalized so that psi ^ conj(psi) is the volume form up to the standard
// prefactor; otherwise reports the measured normalization factor.
struct SuConnectionResult {
  FrameConnection conn;
  double g_residual, J_residual, psi_residual;
};
SuConnectionResult su_connection(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                                 const MultiForm& psi);

// |(-1)^{n(n-1)/2} (i/2)^n psi ^ conj(psi) - dvol|, the (nvol) normalization.
double su_normalization_residual(const MultiForm& psi, const FrameMetric& m);

struct G2Class {
  bool calibrated = false;     // d psi = 0
  bool cocalibrated = false;   // d *psi = 0
  bool pure_type = false;      // cocalibrated and d psi ^ psi = 0
  bool integrable = false;     // d *psi = theta ^ *psi
  std::optional<double> nearly_parallel_lambda;  // d psi = lambda *psi
  double nearly_parallel_residual = 0.0;
  Eigen::VectorXd lee_form;    // 3 theta = -*(*d psi ^ psi)
  MultiForm torsion_part;      // *H of the d psi decomposition
  double giimet_residual = 0.0;
};
G2Class g2_classify(const CoframeAlgebra& cf, const MultiForm& psi, double tol = 1e-10);

struct NearlyKahlerReport {
  bool is_nk = false;
  bool is_kahler = false;      // degenerate case nabla^g J = 0
  double sym_residual = 0.0;   // (nabla_X J)Y + (nabla_Y J)X
  double relnk_residual = 0.0; // 4 dOmega = 3 N(J.,.,.) = -12 g((nabla J).,.)
  std::optional<double> type_constant;  // a of the constant-type identity
  double type_residual = 0.0;
};
NearlyKahlerReport nearly_kahler_check(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                                       double tol = 1e-10);

// g((nabla^g_X J)Y, Z) restricted to a sub-frame; zero on Lagrangian
// submanifolds of nearly Kahler manifolds.
double lagrangian_par_residual(const CoframeAlgebra& cf, const Eigen::MatrixXd& J,
                               std::span<const int> tangent_indices);

}  // namespace calib
