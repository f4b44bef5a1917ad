#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "calib/canonical.hpp"
#include "calib/coframe.hpp"

namespace calib {

// A calibrated-submanifold binding inside a preset, already expressed in an
// adapted frame (tangent indices first come from `tangent`).
struct EmbeddingSpec {
  std::string name;
  std::string kind;  // sas | associative | coassociative | cayley | nk_sas
  std::vector<int> tangent;  // 0-based adapted-frame indices
  // change of frame when the submanifold is not frame-aligned: adapted frame
  // f_a = sum_A Q(A,a) e_A; forms and J are pulled back along Q
  std::optional<Eigen::MatrixXd> frame_Q;
};

// One registered geometry: coframe, bound structure data, declared
// connection, and the (connection, form) pairs asserted parallel.
struct Preset {
  std::string name;
  std::string description;
  CoframeAlgebra cf;
  FrameConnection conn;  // the declared nabla
  std::optional<Eigen::MatrixXd> J;
  std::map<std::string, MultiForm> forms;
  std::vector<std::string> parallel_forms;  // keys of `forms` parallel under conn
  std::vector<EmbeddingSpec> embeddings;

  const MultiForm& form(const std::string& key) const;
  const EmbeddingSpec& embedding(const std::string& name) const;
};

const std::vector<std::string>& preset_names();
Preset preset(const std::string& name);

// structured text export of a preset definition for audit
std::string export_preset(const std::string& name);

// ---- algebraic-layer data (S^7 and Aloff-Wallach scalar systems) ----

// Squashed S^7 nearly-parallel system: returns the two residuals of
// (-3y = lambda z^2, y^2/2 + z^2 = -lambda y z^2 / 2).
Eigen::Vector2d squashed_s7_residual(double y, double z, double lambda);

// Aloff-Wallach N(n,m) nearly-parallel system residuals for scales
// (x, y, z, f) with lambda = x^2 + y^2 + z^2 and tan(delta) = -n/m.
Eigen::Vector3d aloff_wallach_residual(int n, int m, double x, double y, double z, double f);

struct AWRoot {
  Eigen::Vector4d xyzf;
  double residual;
};
// damped-Newton multistart root finder for N(n,m); deterministic under seed.
std::optional<AWRoot> solve_aloff_wallach(int n, int m, std::uint64_t seed = 1,
                                          int restarts = 64);

// ---- S^6 pointwise almost-hermitian data (from the G2 three-form) ----
struct S6Point {
  Eigen::VectorXd x;        // unit point in R^7
  Eigen::MatrixXd tangent;  // 7 x 6 orthonormal basis of x-perp
  MultiForm omega;          // Kahler form on the 6-dim tangent frame
  Eigen::MatrixXd J;        // 6 x 6, J^2 = -1
};
S6Point s6_pointwise(const Eigen::VectorXd& x_unit);

// ---- group-point calculus (adjoint representation) ----

// A point of the group is exp(X1) exp(X2) ... ; Ad(q^{-1}) = prod exp(-ad X_i)
// in reverse order. Works on any preset whose coframe is a Lie algebra.
class GroupPoint {
 public:
  GroupPoint(const CoframeAlgebra& cf, std::vector<Eigen::VectorXd> factors);
  // coefficients of the right-invariant field generated by algebra element a
  // in the left-invariant frame at this point
  Eigen::VectorXd right_invariant(const Eigen::VectorXd& a) const;
  // frame derivative e_B( right-invariant coefficients ), returned as
  // matrix D with D(B, A) = e_B(V^A)
  Eigen::MatrixXd right_invariant_derivative(const Eigen::VectorXd& a) const;

 private:
  const CoframeAlgebra& cf_;
  Eigen::MatrixXd ad_qinv_;
};

// random tangent-subalgebra point of an embedded subgroup
GroupPoint random_subgroup_point(const CoframeAlgebra& cf, std::span<const int> tangent,
                                 std::mt19937_64& rng, int factors = 2);

}  // namespace calib
