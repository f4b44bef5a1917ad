#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace calib {

using cplx = std::complex<double>;

// Canonical storage key for a strictly increasing index tuple: bit i set
// means frame index i (0-based) is present. Numeric order of masks gives a
// deterministic term order.
using Mask = std::uint32_t;

constexpr int kMaxDim = 24;

enum class ScalarKind { real, complex_ };

int popcount(Mask m);
std::vector<int> mask_indices(Mask m);
Mask mask_of(std::span<const int> idx0);  // 0-based, must be distinct

// Sign of e^{A} ^ e^{B} relative to the increasing merge, masks disjoint.
int merge_sign(Mask a, Mask b);

// Degree-k exterior form over an n-dimensional frame, sparse canonical
// coefficients. Values are immutable in spirit: operations return new forms.
class MultiForm {
 public:
  MultiForm() = default;
  MultiForm(int degree, int dim, ScalarKind kind = ScalarKind::real);

  // 1-based indices, the way frames are written on paper: basis(7, {1,2,3}).
  static MultiForm basis(int dim, std::initializer_list<int> idx, cplx c = 1.0);
  static MultiForm zero(int degree, int dim) { return MultiForm(degree, dim); }
  static MultiForm constant(int dim, cplx c);  // degree-0

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  ScalarKind kind() const { return kind_; }
  bool is_zero(double tol = 0.0) const;

  void set(Mask m, cplx v);
  void add_term(Mask m, cplx v);
  cplx coeff(Mask m) const;
  const std::map<Mask, cplx>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  MultiForm real_part() const;
  MultiForm imag_part() const;
  MultiForm conjugate() const;
  MultiForm promoted() const;  // same coefficients, kind = complex

  double norm_inf() const;
  // Frame inner product sum_{I increasing} a_I conj(b_I) (orthonormal frame).
  friend cplx dot(const MultiForm& a, const MultiForm& b);

  MultiForm& operator+=(const MultiForm& o);
  MultiForm& operator-=(const MultiForm& o);
  MultiForm& operator*=(cplx s);
  friend MultiForm operator+(MultiForm a, const MultiForm& b) { return a += b; }
  friend MultiForm operator-(MultiForm a, const MultiForm& b) { return a -= b; }
  friend MultiForm operator*(cplx s, MultiForm a) { return a *= s; }
  friend MultiForm operator*(MultiForm a, cplx s) { return a *= s; }
  friend MultiForm operator-(MultiForm a) { return a *= -1.0; }

  bool approx_equal(const MultiForm& o, double tol = 1e-12) const;

 private:
  void check_kind();

  int degree_ = 0;
  int dim_ = 0;
  ScalarKind kind_ = ScalarKind::real;
  std::map<Mask, cplx> terms_;
};

// Frame inner products g_AB plus an orientation sign for the volume form
// e^1 ^ ... ^ e^n.
class FrameMetric {
 public:
  FrameMetric() = default;
  explicit FrameMetric(Eigen::MatrixXd g, int orientation = +1);
  static FrameMetric euclidean(int n, int orientation = +1);

  int dim() const { return static_cast<int>(g_.rows()); }
  int orientation() const { return orientation_; }
  const Eigen::MatrixXd& g() const { return g_; }
  const Eigen::MatrixXd& g_inv() const { return g_inv_; }
  double det() const { return det_; }
  bool is_euclidean(double tol = 1e-14) const;

  MultiForm volume_form() const;

 private:
  Eigen::MatrixXd g_, g_inv_;
  double det_ = 1.0;
  int orientation_ = +1;
};

// Fiber-valued form: an ordered list of same-shape components.
class VectorForm {
 public:
  VectorForm() = default;
  explicit VectorForm(std::vector<MultiForm> components);

  int fiber_dim() const { return static_cast<int>(components_.size()); }
  int degree() const { return components_.at(0).degree(); }
  int dim() const { return components_.at(0).dim(); }
  const MultiForm& operator[](int i) const { return components_.at(i); }
  const std::vector<MultiForm>& components() const { return components_; }
  double norm_inf() const;

 private:
  std::vector<MultiForm> components_;
};

MultiForm wedge(const MultiForm& a, const MultiForm& b);
MultiForm interior(std::span<const double> v, const MultiForm& a);
MultiForm interior(const Eigen::VectorXd& v, const MultiForm& a);

// Hodge star with respect to a frame metric. For an orthonormal metric
// star(star(a)) = (-1)^{k(n-k)} a; general SPD metrics go through index
// raising by k x k minors of g^{-1}.
MultiForm hodge_star(const MultiForm& a, const FrameMetric& m);

// Keep only coefficients supported inside tangent_indices (0-based) and
// re-express them on the sub-frame, which inherits the induced order.
MultiForm restrict_to(const MultiForm& a, std::span<const int> tangent_indices);

// Pullback along a linear map: columns of Q are the new frame vectors in the
// old frame; coefficients become sums of k x k minors. Q may be rectangular.
MultiForm pullback(const MultiForm& a, const Eigen::MatrixXd& Q);

// Dense fully antisymmetric coefficient array (size dim^degree, row-major),
// a_{A1...Ak} with all permutations filled in.
std::vector<cplx> dense_coefficients(const MultiForm& a);
MultiForm from_dense(std::span<const cplx> t, int degree, int dim,
                     ScalarKind kind);

}  // namespace calib
