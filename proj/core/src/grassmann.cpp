#include "calib/grassmann.hpp"

#include <cmath>

namespace calib {

namespace {

Eigen::MatrixXd orthonormalized(const Eigen::MatrixXd& M) {
  // thin QR with positive diagonal so the orientation follows continuously
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(M.rows(), M.cols());
  Eigen::MatrixXd R = Q.transpose() * M;
  for (int j = 0; j < M.cols(); ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

// compiled term list for fast repeated evaluation
struct CompiledForm {
  int k = 0;
  std::vector<std::array<int, 4>> idx;  // k <= 4 in this project
  std::vector<double> coeff;
};

CompiledForm compile(const MultiForm& f) {
  if (f.degree() > 4) throw std::invalid_argument("evaluate: degree > 4 not supported");
  if (f.kind() == ScalarKind::complex_)
    throw std::invalid_argument("evaluate: complex form; take real/imag parts first");
  CompiledForm c;
  c.k = f.degree();
  for (auto& [m, v] : f.terms()) {
    auto ids = mask_indices(m);
    std::array<int, 4> a{0, 0, 0, 0};
    for (int i = 0; i < c.k; ++i) a[static_cast<std::size_t>(i)] = ids[static_cast<std::size_t>(i)];
    c.idx.push_back(a);
    c.coeff.push_back(v.real());
  }
  return c;
}

double eval_compiled(const CompiledForm& c, const Eigen::MatrixXd& B) {
  double tot = 0.0;
  const int k = c.k;
  for (std::size_t t = 0; t < c.idx.size(); ++t) {
    const auto& id = c.idx[t];
    double det = 1.0;
    switch (k) {
      case 0: det = 1.0; break;
      case 1: det = B(id[0], 0); break;
      case 2: det = B(id[0], 0) * B(id[1], 1) - B(id[0], 1) * B(id[1], 0); break;
      case 3: {
        det = B(id[0], 0) * (B(id[1], 1) * B(id[2], 2) - B(id[1], 2) * B(id[2], 1)) -
              B(id[0], 1) * (B(id[1], 0) * B(id[2], 2) - B(id[1], 2) * B(id[2], 0)) +
              B(id[0], 2) * (B(id[1], 0) * B(id[2], 1) - B(id[1], 1) * B(id[2], 0));
        break;
      }
      default: {
        Eigen::Matrix4d sub;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) sub(i, j) = B(id[static_cast<std::size_t>(i)], j);
        det = sub.determinant();
        break;
      }
    }
    tot += c.coeff[t] * det;
  }
  return tot;
}

// exact gradient d phi / d B(r, c): multilinear in columns
Eigen::MatrixXd eval_gradient(const CompiledForm& c, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(B.rows());
  const int k = c.k;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, k);
  Eigen::MatrixXd sub(k, k);
  for (std::size_t t = 0; t < c.idx.size(); ++t) {
    const auto& id = c.idx[t];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) sub(i, j) = B(id[static_cast<std::size_t>(i)], j);
    // cofactor expansion: d det / d sub(i,j) = cof(i,j)
    Eigen::MatrixXd cof = sub.determinant() * sub.inverse().transpose();
    if (!cof.allFinite()) {
      // fall back to explicit minors near singular submatrices
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          Eigen::MatrixXd m(k - 1, k - 1);
          for (int a = 0, ai = 0; a < k; ++a) {
            if (a == i) continue;
            for (int b = 0, bj = 0; b < k; ++b) {
              if (b == j) continue;
              m(ai, bj++) = sub(a, b);
            }
            ++ai;
          }
          double s = ((i + j) % 2 == 0) ? 1.0 : -1.0;
          cof(i, j) = s * (k > 1 ? m.determinant() : 1.0);
        }
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        G(id[static_cast<std::size_t>(i)], j) += c.coeff[t] * cof(i, j);
  }
  return G;
}

// second derivative of phi(orth(Q + t Delta)) at t=0 in a horizontal chart;
// entries of the quadratic form on basis perturbations q_p e_i^T.
Eigen::MatrixXd chart_hessian(const CompiledForm& c, const Eigen::MatrixXd& Q,
                              const Eigen::MatrixXd& comp, double phi0) {
  const int k = static_cast<int>(Q.cols());
  const int nk = static_cast<int>(comp.cols());
  Eigen::MatrixXd H(nk * k, nk * k);
  Eigen::MatrixXd C = Q;
  for (int p = 0; p < nk; ++p)
    for (int i = 0; i < k; ++i)
      for (int q = 0; q < nk; ++q)
        for (int j = 0; j < k; ++j) {
          double val;
          if (i == j) {
            val = (p == q) ? -phi0 : 0.0;
          } else {
            C = Q;
            C.col(i) = comp.col(p);
            C.col(j) = comp.col(q);
            val = eval_compiled(c, C);
          }
          H(p * k + i, q * k + j) = val;
        }
  return H;
}

}  // namespace

OrientedPlane::OrientedPlane(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
    throw std::invalid_argument("plane basis must be n x k with k <= n");
  Eigen::MatrixXd gram = basis_.transpose() * basis_ -
                         Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols());
  if (gram.cwiseAbs().maxCoeff() > 1e-10) basis_ = orthonormalized(basis_);
}

OrientedPlane OrientedPlane::span(int n, std::initializer_list<int> axes) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, static_cast<int>(axes.size()));
  int j = 0;
  for (int a : axes) B(a - 1, j++) = 1.0;
  return OrientedPlane(B);
}

OrientedPlane OrientedPlane::random(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd B(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) B(i, j) = gauss(rng);
  return OrientedPlane(orthonormalized(B));
}

double evaluate(const MultiForm& form, const OrientedPlane& plane) {
  if (form.degree() != plane.k())
    throw std::invalid_argument("evaluate: form degree != plane dimension");
  if (form.dim() != plane.n())
    throw std::invalid_argument("evaluate: frame dimension mismatch");
  return eval_compiled(compile(form), plane.basis());
}

ComassReport comass(const MultiForm& form, int k, int restarts, double tol,
                    std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("comass: restarts >= 1");
  if (k < 1 || k > form.dim()) throw std::invalid_argument("comass: 1 <= k <= n");
  if (form.degree() != k) throw std::invalid_argument("comass: form degree != k");
  const int n = form.dim();
  CompiledForm cf = compile(form);
  std::mt19937_64 rng(seed);

  ComassReport rep;
  rep.restarts = restarts;
  rep.seed = seed;
  int converged = 0;
  for (int r = 0; r < restarts; ++r) {
    Eigen::MatrixXd Q = OrientedPlane::random(n, k, rng).basis();
    double f = eval_compiled(cf, Q);
    if (f < 0.0) { Q.col(0) = -Q.col(0); f = -f; }  // orientation flip
    bool ok = false;
    double step = 1.0;
    for (int it = 0; it < 600; ++it) {
      Eigen::MatrixXd G = eval_gradient(cf, Q);
      Eigen::MatrixXd H = G - Q * (Q.transpose() * G);  // horizontal part
      double gn = H.norm();
      if (gn < 1e-9) { ok = true; break; }
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls) {
        Eigen::MatrixXd Qn = orthonormalized(Q + step * H);
        double fn = eval_compiled(cf, Qn);
        if (fn > f + 1e-16) {
          Q = Qn;
          f = fn;
          improved = true;
          step = std::min(step * 1.6, 4.0);
          break;
        }
        step *= 0.5;
      }
      if (!improved || step < tol) { ok = improved; break; }
    }
    // Newton polish on the chart: solve H delta = -grad in horizontal coords
    {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(Q.transpose());
      Eigen::MatrixXd comp = lu.kernel();  // n x (n-k)
      if (comp.cols() == n - k) {
        comp = orthonormalized(comp);
        for (int polish = 0; polish < 12; ++polish) {
          double f0 = eval_compiled(cf, Q);
          Eigen::MatrixXd G = eval_gradient(cf, Q);
          Eigen::MatrixXd Hh = comp.transpose() * G;  // (n-k) x k horizontal gradient
          Eigen::VectorXd g(Eigen::Map<Eigen::VectorXd>(Hh.data(), Hh.size()));
          if (g.norm() < 1e-15) break;
          Eigen::MatrixXd Hm = chart_hessian(cf, Q, comp, f0);
          Eigen::VectorXd delta =
              (Hm - 1e-13 * Eigen::MatrixXd::Identity(Hm.rows(), Hm.cols()))
                  .fullPivLu()
                  .solve(-g);
          // map chart coords back, laid out as (p, i) -> p*k+i
          Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, k);
          for (int p = 0; p < n - k; ++p)
            for (int i = 0; i < k; ++i) D += delta[p * k + i] * comp.col(p) * Eigen::RowVectorXd::Unit(k, i);
          Eigen::MatrixXd Qn = orthonormalized(Q + D);
          if (eval_compiled(cf, Qn) >= f0) Q = Qn; else break;
        }
        f = eval_compiled(cf, Q);
      }
    }
    if (ok) ++converged;
    if (f > rep.max_value) {
      rep.max_value = f;
      rep.argmax_basis = Q;
    }
  }
  rep.converged_fraction = static_cast<double>(converged) / restarts;
  return rep;
}

double comass_sampled(const MultiForm& form, int k, long samples, std::uint64_t seed) {
  const int n = form.dim();
  CompiledForm cf = compile(form);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd B(n, k);
  double mx = 0.0;
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) B(i, j) = gauss(rng);
    double v = std::abs(eval_compiled(cf, orthonormalized(B)));
    if (v > mx) mx = v;
  }
  return mx;
}

bool is_contact(const MultiForm& form, const OrientedPlane& plane, double tol) {
  return std::abs(evaluate(form, plane) - 1.0) <= tol;
}

ContactDimensionReport contact_dimension(const MultiForm& form, const OrientedPlane& seed_plane,
                                         double kernel_tol, double gap_factor) {
  const int n = seed_plane.n(), k = seed_plane.k();
  CompiledForm cf = compile(form);
  const Eigen::MatrixXd& Q = seed_plane.basis();
  double phi0 = eval_compiled(cf, Q);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Q.transpose());
  Eigen::MatrixXd comp = orthonormalized(lu.kernel());
  Eigen::MatrixXd H = chart_hessian(cf, Q, comp, phi0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
  Eigen::VectorXd sv = svd.singularValues();

  ContactDimensionReport rep;
  rep.singular_values = sv;
  const double cutoff = kernel_tol * std::max(sv[0], 1e-300);
  int kernel = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] < cutoff) ++kernel;
  rep.dimension = kernel;
  if (kernel == 0 || kernel == sv.size()) {
    rep.conclusive = true;
    rep.gap = 0.0;
  } else {
    double kept = sv[sv.size() - kernel - 1];  // smallest kept
    double dropped = sv[sv.size() - kernel];   // largest dropped
    // singular values sorted descending in Eigen
    kept = sv[sv.size() - kernel - 1];
    dropped = sv[sv.size() - kernel];
    rep.gap = kept / std::max(dropped, 1e-300);
    rep.conclusive = rep.gap >= gap_factor;
  }
  return rep;
}

}  // namespace calib
