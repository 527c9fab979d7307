// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_CHOL_STRUCTURE_HPP
#define OPAQUE_CHOL_STRUCTURE_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opaque/distributions.hpp"
#include "opaque/matrix_pattern.hpp"
#include "opaque/rng.hpp"

namespace opaque {

enum class CholClass { FreePositive, Free, Determined, StructuralZero };

/// Classification of each lower-triangle entry of the Cholesky factor of a
/// patterned covariance matrix whose fixed entries are all zero.
struct CholStructure {
  int dim = 0;
  std::vector<std::string> names;
  std::vector<CholClass> tri;  // row-major lower triangle

  CholClass at(int i, int j) const { return tri[i * (i + 1) / 2 + j]; }
  int free_count() const;  // Free + FreePositive
};

const char* chol_class_name(CholClass c);

/// Row-major, left-to-right sweep: L(i,j) is Free where Sigma(i,j) is free;
/// where Sigma(i,j) is Fixed(0) it is StructuralZero if every L(i,k), k<j is
/// StructuralZero and Determined otherwise, with value
/// -(sum_{k<j} L(i,k) L(j,k)) / L(j,j). Diagonals are FreePositive.
///
/// Requires covariance kind with free diagonals and only Fixed(0)
/// off-diagonal constraints; reorder rows first (block_partition) if wanted.
/// Note the classification depends on the variable order.
CholStructure derive_structure(const MatrixPattern& p);

/// Lower factor with FreePositive entries drawn from diag_prior (support must
/// be positive), Free entries from offdiag_prior, Determined entries filled
/// by the formula above.
Eigen::MatrixXd sample_structured_chol(const CholStructure& s,
                                       const UnivariatePrior& diag_prior,
                                       const UnivariatePrior& offdiag_prior, Rng& rng);

SymmetricMatrix chol_to_cov(const Eigen::MatrixXd& lower);

/// Sigma = L L^T; positive definite by construction, exact zeros where the
/// pattern fixed them.
SymmetricMatrix sample_structured_cov(const CholStructure& s,
                                      const UnivariatePrior& diag_prior,
                                      const UnivariatePrior& offdiag_prior, Rng& rng);

/// D^(-1/2) Sigma D^(-1/2); throws on a nonpositive diagonal.
SymmetricMatrix cov_to_corr(const SymmetricMatrix& m);

/// log det of the correlation rescaling of L L^T, computed stably from the
/// factor itself.
double corr_log_det_from_factor(const Eigen::MatrixXd& lower);

/// Confirms positive definiteness of a sampled Sigma = L L^T. The stored
/// matrix is sign-tested through its correlation rescaling (scale-free);
/// when the exact correlation determinant, known from the factor, is below
/// double resolution the assembled values cannot carry the margin and the
/// factor's positive diagonal is the certificate.
bool verifies_positive_definite(const Eigen::MatrixXd& lower, const SymmetricMatrix& sigma);

}  // namespace opaque

#endif  // OPAQUE_CHOL_STRUCTURE_HPP
