#pragma once

#include <map>
#include <optional>
#include <string>

#include "calib/multiform.hpp"

namespace calib {

enum class HolonomyKind { unitary, special_unitary, g2, spin7 };

// Canonical calibration data for one holonomy block in its model frame.
// Unitary frames are ordered (1..n, 1'..n'); G2 uses indices 1-7, Spin(7)
// indices 1-8 with the standard sign conventions.
struct HolonomyStructure {
  HolonomyKind kind;
  int dim = 0;
  FrameMetric metric;
  std::optional<Eigen::MatrixXd> J;
  std::map<std::string, MultiForm> forms;
  std::optional<VectorForm> chi;   // associative defect, vector-valued 3-form
  std::optional<VectorForm> tau;   // Cayley defect, vector-valued 4-form
  std::vector<MultiForm> asd_basis;  // G2: the Omega_i on the 4567 block

  const MultiForm& form(const std::string& name) const;
  // phi_k = Omega^k / k! for unitary structures
  MultiForm phi_k(int k) const;
};

HolonomyStructure build_unitary(int n);
HolonomyStructure build_special_unitary(int n);
HolonomyStructure build_g2();
HolonomyStructure build_spin7();

// Anti-self-dual basis on an abstract oriented R^4:
// e^{12}-e^{34}, e^{13}+e^{24}, e^{14}-e^{23}.
std::vector<MultiForm> asd_basis_r4();

// Lie algebra of the stabilizer of a form inside so(n): a basis (as matrices)
// of {X in so(n) : X . phi = 0} where X acts by index insertion.
std::vector<Eigen::MatrixXd> form_stabilizer_algebra(const MultiForm& phi, double tol = 1e-10);

}  // namespace calib
