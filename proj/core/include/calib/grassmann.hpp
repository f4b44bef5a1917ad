#pragma once

#include <cstdint>
#include <random>

#include "calib/multiform.hpp"

namespace calib {

// Oriented k-plane as an n x k matrix with orthonormal columns; column order
// fixes the orientation.
class OrientedPlane {
 public:
  explicit OrientedPlane(Eigen::MatrixXd basis);
  static OrientedPlane span(int n, std::initializer_list<int> axes);  // 1-based
  static OrientedPlane random(int n, int k, std::mt19937_64& rng);

  int n() const { return static_cast<int>(basis_.rows()); }
  int k() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

 private:
  Eigen::MatrixXd basis_;
};

// phi(xi): the form on the plane's unit k-vector.
double evaluate(const MultiForm& form, const OrientedPlane& plane);

struct ComassReport {
  double max_value = 0.0;
  Eigen::MatrixXd argmax_basis;
  int restarts = 0;
  double converged_fraction = 0.0;
  std::uint64_t seed = 0;
};

// Multi-start projected-gradient ascent with exact multilinear gradients and
// a Newton polish on the Grassmannian chart. Deterministic under the seed.
ComassReport comass(const MultiForm& form, int k, int restarts = 24,
                    double tol = 1e-12, std::uint64_t seed = 1);

// max of phi over `samples` seeded random planes
double comass_sampled(const MultiForm& form, int k, long samples, std::uint64_t seed = 1);

bool is_contact(const MultiForm& form, const OrientedPlane& plane, double tol = 1e-9);

struct ContactDimensionReport {
  int dimension = -1;
  bool conclusive = false;
  double gap = 0.0;
  Eigen::VectorXd singular_values;
};

// Numerical dimension of {xi : phi(xi) = 1} near a contact plane: kernel of
// the exact Hessian of phi on the Grassmannian tangent space at the maximum.
ContactDimensionReport contact_dimension(const MultiForm& form, const OrientedPlane& seed_plane,
                                         double kernel_tol = 1e-6, double gap_factor = 10.0);

}  // namespace calib
