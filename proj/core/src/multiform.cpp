#include "calib/multiform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace calib {

int popcount(Mask m) { return std::popcount(m); }

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (int i = 0; m; ++i, m >>= 1)
    if (m & 1u) out.push_back(i);
  return out;
}

Mask mask_of(std::span<const int> idx0) {
  Mask m = 0;
  for (int i : idx0) {
    Mask bit = Mask{1} << i;
    if (m & bit) throw std::invalid_argument("repeated frame index");
    m |= bit;
  }
  return m;
}

int merge_sign(Mask a, Mask b) {
  // parity of #{(i,j) : i in a, j in b, i > j}
  int swaps = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    int j = std::countr_zero(bb);
    Mask above = a & ~((Mask{2} << j) - 1);
    swaps += std::popcount(above);
  }
  return (swaps & 1) ? -1 : +1;
}

MultiForm::MultiForm(int degree, int dim, ScalarKind kind)
    : degree_(degree), dim_(dim), kind_(kind) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("bad frame dimension");
  if (degree < 0 || degree > dim) throw std::invalid_argument("degree must satisfy 0 <= k <= n");
}

MultiForm MultiForm::basis(int dim, std::initializer_list<int> idx, cplx c) {
  MultiForm f(static_cast<int>(idx.size()), dim,
              c.imag() == 0.0 ? ScalarKind::real : ScalarKind::complex_);
  std::vector<int> v;
  for (int i : idx) {
    if (i < 1 || i > dim) throw std::invalid_argument("frame index out of range");
    v.push_back(i - 1);
  }
  // canonicalize the written order
  int sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j)
      if (v[j] > v[j + 1]) { std::swap(v[j], v[j + 1]); sign = -sign; }
  f.set(mask_of(v), static_cast<double>(sign) * c);
  return f;
}

MultiForm MultiForm::constant(int dim, cplx c) {
  MultiForm f(0, dim, c.imag() == 0.0 ? ScalarKind::real : ScalarKind::complex_);
  f.set(0, c);
  return f;
}

bool MultiForm::is_zero(double tol) const {
  for (auto& [m, v] : terms_)
    if (std::abs(v) > tol) return false;
  return true;
}

void MultiForm::set(Mask m, cplx v) {
  if (popcount(m) != degree_) throw std::invalid_argument("index tuple size != degree");
  if (m >= (Mask{1} << dim_)) throw std::invalid_argument("index out of range");
  if (v == cplx{0.0}) terms_.erase(m); else terms_[m] = v;
  check_kind();
}

void MultiForm::add_term(Mask m, cplx v) {
  if (popcount(m) != degree_) throw std::invalid_argument("index tuple size != degree");
  auto it = terms_.find(m);
  cplx nv = (it == terms_.end() ? v : it->second + v);
  if (std::abs(nv) == 0.0) { if (it != terms_.end()) terms_.erase(it); }
  else terms_[m] = nv;
  check_kind();
}

void MultiForm::check_kind() {
  if (kind_ == ScalarKind::complex_) return;
  for (auto& [m, v] : terms_)
    if (v.imag() != 0.0) { kind_ = ScalarKind::complex_; return; }
}

cplx MultiForm::coeff(Mask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? cplx{0.0} : it->second;
}

MultiForm MultiForm::real_part() const {
  MultiForm out(degree_, dim_, ScalarKind::real);
  for (auto& [m, v] : terms_)
    if (v.real() != 0.0) out.terms_[m] = v.real();
  return out;
}

MultiForm MultiForm::imag_part() const {
  MultiForm out(degree_, dim_, ScalarKind::real);
  for (auto& [m, v] : terms_)
    if (v.imag() != 0.0) out.terms_[m] = v.imag();
  return out;
}

MultiForm MultiForm::conjugate() const {
  MultiForm out = *this;
  for (auto& [m, v] : out.terms_) v = std::conj(v);
  return out;
}

MultiForm MultiForm::promoted() const {
  MultiForm out = *this;
  out.kind_ = ScalarKind::complex_;
  return out;
}

double MultiForm::norm_inf() const {
  double mx = 0.0;
  for (auto& [m, v] : terms_) mx = std::max(mx, std::abs(v));
  return mx;
}

cplx dot(const MultiForm& a, const MultiForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree())
    throw std::invalid_argument("dot: shape mismatch");
  cplx s = 0.0;
  for (auto& [m, v] : a.terms_) s += v * std::conj(b.coeff(m));
  return s;
}

MultiForm& MultiForm::operator+=(const MultiForm& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw std::invalid_argument("form sum: shape mismatch");
  if (o.kind_ == ScalarKind::complex_) kind_ = ScalarKind::complex_;
  for (auto& [m, v] : o.terms_) add_term(m, v);
  return *this;
}

MultiForm& MultiForm::operator-=(const MultiForm& o) {
  if (dim_ != o.dim_ || degree_ != o.degree_)
    throw std::invalid_argument("form difference: shape mismatch");
  if (o.kind_ == ScalarKind::complex_) kind_ = ScalarKind::complex_;
  for (auto& [m, v] : o.terms_) add_term(m, -v);
  return *this;
}

MultiForm& MultiForm::operator*=(cplx s) {
  if (s.imag() != 0.0) kind_ = ScalarKind::complex_;
  if (s == cplx{0.0}) { terms_.clear(); return *this; }
  for (auto& [m, v] : terms_) v *= s;
  return *this;
}

bool MultiForm::approx_equal(const MultiForm& o, double tol) const {
  if (dim_ != o.dim_ || degree_ != o.degree_) return false;
  for (auto& [m, v] : terms_)
    if (std::abs(v - o.coeff(m)) > tol) return false;
  for (auto& [m, v] : o.terms_)
    if (std::abs(v - coeff(m)) > tol) return false;
  return true;
}

FrameMetric::FrameMetric(Eigen::MatrixXd g, int orientation)
    : g_(std::move(g)), orientation_(orientation) {
  if (g_.rows() != g_.cols()) throw std::invalid_argument("metric must be square");
  if (orientation != 1 && orientation != -1)
    throw std::invalid_argument("orientation must be +1 or -1");
  if ((g_ - g_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("metric must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("metric must be positive definite");
  g_inv_ = g_.inverse();
  det_ = g_.determinant();
}

FrameMetric FrameMetric::euclidean(int n, int orientation) {
  return FrameMetric(Eigen::MatrixXd::Identity(n, n), orientation);
}

bool FrameMetric::is_euclidean(double tol) const {
  return (g_ - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
}

MultiForm FrameMetric::volume_form() const {
  MultiForm vol(dim(), dim());
  vol.set((Mask{1} << dim()) - 1, orientation_ * std::sqrt(det_));
  return vol;
}

VectorForm::VectorForm(std::vector<MultiForm> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("empty vector form");
  for (auto& c : components_)
    if (c.dim() != components_[0].dim() || c.degree() != components_[0].degree() ||
        c.kind() != components_[0].kind())
      throw std::invalid_argument("vector form components must share shape");
}

double VectorForm::norm_inf() const {
  double mx = 0.0;
  for (auto& c : components_) mx = std::max(mx, c.norm_inf());
  return mx;
}

MultiForm wedge(const MultiForm& a, const MultiForm& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim())
    throw std::invalid_argument("wedge: degree exceeds dimension");
  ScalarKind kind = (a.kind() == ScalarKind::complex_ || b.kind() == ScalarKind::complex_)
                        ? ScalarKind::complex_
                        : ScalarKind::real;
  MultiForm out(a.degree() + b.degree(), a.dim(), kind);
  for (auto& [ma, va] : a.terms()) {
    for (auto& [mb, vb] : b.terms()) {
      if (ma & mb) continue;
      out.add_term(ma | mb, static_cast<double>(merge_sign(ma, mb)) * va * vb);
    }
  }
  return out;
}

MultiForm interior(std::span<const double> v, const MultiForm& a) {
  if (static_cast<int>(v.size()) != a.dim())
    throw std::invalid_argument("interior: vector length != frame dimension");
  if (a.degree() < 1) throw std::invalid_argument("interior: degree-0 form");
  MultiForm out(a.degree() - 1, a.dim(), a.kind());
  for (auto& [m, c] : a.terms()) {
    int pos = 0;
    for (Mask mm = m; mm; mm &= mm - 1, ++pos) {
      int i = std::countr_zero(mm);
      if (v[i] == 0.0) continue;
      double sign = (pos & 1) ? -1.0 : 1.0;
      out.add_term(m & ~(Mask{1} << i), sign * v[i] * c);
    }
  }
  return out;
}

MultiForm interior(const Eigen::VectorXd& v, const MultiForm& a) {
  return interior(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())), a);
}

namespace {

// det of the minor of M with rows r, cols c (same size, <= 4 in practice)
double minor_det(const Eigen::MatrixXd& M, const std::vector<int>& r,
                 const std::vector<int>& c) {
  const int k = static_cast<int>(r.size());
  Eigen::MatrixXd sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = M(r[i], c[j]);
  return sub.determinant();
}

}  // namespace

MultiForm hodge_star(const MultiForm& a, const FrameMetric& m) {
  if (m.dim() != a.dim()) throw std::invalid_argument("hodge: metric dimension mismatch");
  const int n = a.dim();
  const int k = a.degree();
  const Mask full = (Mask{1} << n) - 1;
  MultiForm out(n - k, n, a.kind());
  const double scale = m.orientation() * std::sqrt(m.det());
  const bool euclid = m.is_euclidean();
  for (auto& [mi, vi] : a.terms()) {
    // raised component a^I = sum_J det(g^{-1}[I,J]) a_J; for orthonormal g it
    // is just a_I.
    if (euclid) {
      Mask comp = full & ~mi;
      out.add_term(comp, static_cast<double>(merge_sign(mi, comp)) * scale * vi);
    }
  }
  if (euclid) return out;
  // general metric: iterate over raised increasing tuples
  std::vector<Mask> k_masks;
  for (Mask mm = 0; mm <= full; ++mm)
    if (popcount(mm) == k) k_masks.push_back(mm);
  for (Mask I : k_masks) {
    cplx raised = 0.0;
    auto ri = mask_indices(I);
    for (auto& [J, vj] : a.terms()) raised += minor_det(m.g_inv(), ri, mask_indices(J)) * vj;
    if (std::abs(raised) == 0.0) continue;
    Mask comp = full & ~I;
    out.add_term(comp, static_cast<double>(merge_sign(I, comp)) * scale * raised);
  }
  return out;
}

MultiForm restrict_to(const MultiForm& a, std::span<const int> tangent_indices) {
  std::vector<int> idx(tangent_indices.begin(), tangent_indices.end());
  std::sort(idx.begin(), idx.end());
  for (int i : idx)
    if (i < 0 || i >= a.dim()) throw std::invalid_argument("restrict: index out of range");
  const int nsub = static_cast<int>(idx.size());
  if (a.degree() > nsub) return MultiForm(a.degree() > nsub ? 0 : a.degree(), std::max(nsub, 1));
  Mask keep = 0;
  std::vector<int> newpos(a.dim(), -1);
  for (int p = 0; p < nsub; ++p) { keep |= Mask{1} << idx[p]; newpos[idx[p]] = p; }
  MultiForm out(a.degree(), nsub, a.kind());
  for (auto& [m, v] : a.terms()) {
    if ((m & keep) != m) continue;
    Mask nm = 0;
    for (int i : mask_indices(m)) nm |= Mask{1} << newpos[i];
    out.add_term(nm, v);  // order preserved, no sign
  }
  return out;
}

MultiForm pullback(const MultiForm& a, const Eigen::MatrixXd& Q) {
  if (Q.rows() != a.dim()) throw std::invalid_argument("pullback: row count != frame dimension");
  const int nn = static_cast<int>(Q.cols());
  const int k = a.degree();
  if (k > nn) throw std::invalid_argument("pullback: degree exceeds new dimension");
  MultiForm out(k, nn, a.kind());
  const Mask full = (Mask{1} << nn) - 1;
  for (Mask J = 0; J <= full; ++J) {
    if (popcount(J) != k) continue;
    auto cj = mask_indices(J);
    cplx val = 0.0;
    for (auto& [I, vi] : a.terms()) val += minor_det(Q, mask_indices(I), cj) * vi;
    if (std::abs(val) > 0.0) out.add_term(J, val);
  }
  return out;
}

std::vector<cplx> dense_coefficients(const MultiForm& a) {
  const int n = a.dim();
  const int k = a.degree();
  std::size_t size = 1;
  for (int i = 0; i < k; ++i) size *= static_cast<std::size_t>(n);
  std::vector<cplx> t(size, cplx{0.0});
  std::vector<int> perm(k);
  for (auto& [m, v] : a.terms()) {
    auto idx = mask_indices(m);
    for (int i = 0; i < k; ++i) perm[i] = i;
    // enumerate permutations with sign
    std::sort(perm.begin(), perm.end());
    do {
      int sign = 1;
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
          if (perm[i] > perm[j]) sign = -sign;
      std::size_t off = 0;
      for (int i = 0; i < k; ++i) off = off * n + static_cast<std::size_t>(idx[perm[i]]);
      t[off] = static_cast<double>(sign) * v;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return t;
}

MultiForm from_dense(std::span<const cplx> t, int degree, int dim, ScalarKind kind) {
  MultiForm out(degree, dim, kind);
  std::vector<int> idx(degree);
  // iterate increasing tuples
  for (int i = 0; i < degree; ++i) idx[i] = i;
  if (degree == 0) {
    out.set(0, t[0]);
    return out;
  }
  while (true) {
    std::size_t off = 0;
    for (int i = 0; i < degree; ++i) off = off * dim + static_cast<std::size_t>(idx[i]);
    if (std::abs(t[off]) > 0.0) out.set(mask_of(idx), t[off]);
    int p = degree - 1;
    while (p >= 0 && idx[p] == dim - degree + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < degree; ++q) idx[q] = idx[q - 1] + 1;
  }
  return out;
}

}  // namespace calib
