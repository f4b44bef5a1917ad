#pragma once

#include "calib/presets.hpp"

namespace calib {

// An embedded calibrated submanifold in an adapted frame: tangent directions
// are frame-aligned, the declared connection and structure data live in the
// same frame.
struct CalibratedEmbedding {
  std::string kind;  // sas | associative | coassociative | cayley | nk_sas
  CoframeAlgebra cf;
  std::vector<int> tangent, normal;
  FrameConnection conn;
  std::optional<Eigen::MatrixXd> J;
  std::map<std::string, MultiForm> forms;

  // type-specific restriction criterion: max |restricted form|
  double criterion_residual() const;
  // calibration value on the tangent plane (Re psi, psi, *psi or Phi)
  double calibration_value() const;
};

CalibratedEmbedding make_embedding(const Preset& p, const std::string& name);

// Linear deformation operator restricted to invariant (constant-coefficient)
// sections.
struct DeformationSystem {
  std::string kind;
  Eigen::MatrixXd matrix;  // rows constraints, cols unknowns
  std::vector<std::string> col_labels;
};

DeformationSystem sas_system(const CalibratedEmbedding& emb);
DeformationSystem associative_system(const CalibratedEmbedding& emb);
DeformationSystem coassociative_system(const CalibratedEmbedding& emb);
DeformationSystem cayley_system(const CalibratedEmbedding& emb);
DeformationSystem nk_sas_system(const CalibratedEmbedding& emb);
DeformationSystem deformation_system(const CalibratedEmbedding& emb);  // dispatch on kind

// the alpha_V = i_V psi encoding of the coassociative system, assembled from
// d(alpha_V) + i_V d psi restricted to X; kernel must match the V-encoding
DeformationSystem coassociative_system_alpha(const CalibratedEmbedding& emb);

// the (dU, delta U) torsion form of the SAS system, assembled independently
// from the torsion two-forms; used as a cross-check of the primary encoding
DeformationSystem sas_system_torsion_form(const CalibratedEmbedding& emb);

struct KernelReport {
  int dim = 0;
  bool conclusive = false;
  double gap = 0.0;
  Eigen::VectorXd singular_values;
};
KernelReport kernel_dim(const Eigen::MatrixXd& M, double tol = 1e-8,
                        double gap_factor = 100.0);

// plain numeric text export (rows of the matrix)
std::string export_system(const DeformationSystem& sys);

// pointwise residual of the deformation equations for a candidate field
// family sampled on the submanifold
struct PointSample {
  Eigen::VectorXd V;      // field coefficients in the adapted frame
  Eigen::MatrixXd dV;     // dV(B, A) = e_B(V^A)
};
using FieldFamily = std::function<PointSample(int sample_index)>;
double verify_candidate(const CalibratedEmbedding& emb, const FieldFamily& family,
                        int samples);

// principal symbol injectivity over seeded random nonzero covectors
bool symbol_ellipticity(const std::string& kind, int covector_samples,
                        std::uint64_t seed, double* min_sv = nullptr);

}  // namespace calib
