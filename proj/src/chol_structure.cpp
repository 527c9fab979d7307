// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/chol_structure.hpp"

#include <cmath>
#include <stdexcept>

namespace opaque {

int CholStructure::free_count() const {
  int n = 0;
  for (CholClass c : tri)
    if (c == CholClass::Free || c == CholClass::FreePositive) ++n;
  return n;
}

const char* chol_class_name(CholClass c) {
  switch (c) {
    case CholClass::FreePositive: return "free-positive";
    case CholClass::Free: return "free";
    case CholClass::Determined: return "determined";
    case CholClass::StructuralZero: return "zero";
  }
  return "?";
}

CholStructure derive_structure(const MatrixPattern& p) {
  if (p.kind() != MatrixKind::Covariance)
    throw std::invalid_argument(
        "derive_structure: correlation kind unsupported; derive on the covariance "
        "pattern and rescale the output instead");
  const int n = p.dim();
  for (int i = 0; i < n; ++i) {
    if (!p.is_free(i, i))
      throw std::invalid_argument("derive_structure: diagonals must be free");
    for (int j = 0; j < i; ++j)
      if (!p.is_free(i, j) && p.entry(i, j).value != 0.0)
        throw std::invalid_argument(
            "derive_structure: only Fixed(0) off-diagonal constraints are supported");
  }

  CholStructure s;
  s.dim = n;
  s.names = p.names();
  s.tri.resize(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (p.is_free(i, j)) {
        s.tri[i * (i + 1) / 2 + j] = CholClass::Free;
        continue;
      }
      bool all_zero = true;
      for (int k = 0; k < j; ++k)
        if (s.at(i, k) != CholClass::StructuralZero) {
          all_zero = false;
          break;
        }
      s.tri[i * (i + 1) / 2 + j] =
          all_zero ? CholClass::StructuralZero : CholClass::Determined;
    }
    s.tri[i * (i + 1) / 2 + i] = CholClass::FreePositive;
  }
  return s;
}

Eigen::MatrixXd sample_structured_chol(const CholStructure& s,
                                       const UnivariatePrior& diag_prior,
                                       const UnivariatePrior& offdiag_prior, Rng& rng) {
  if (!prior_support_is_positive(diag_prior))
    throw std::invalid_argument(
        "sample_structured_chol: diagonal prior must have positive support");
  const int n = s.dim;
  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      switch (s.at(i, j)) {
        case CholClass::Free:
          lower(i, j) = sample_prior(offdiag_prior, rng);
          break;
        case CholClass::Determined: {
          double dot = 0.0;
          for (int k = 0; k < j; ++k) dot += lower(i, k) * lower(j, k);
          lower(i, j) = -dot / lower(j, j);
          break;
        }
        case CholClass::StructuralZero:
          break;
        case CholClass::FreePositive:
          throw std::logic_error("sample_structured_chol: diagonal class off-diagonal");
      }
    }
    lower(i, i) = sample_prior(diag_prior, rng);
  }
  return lower;
}

SymmetricMatrix chol_to_cov(const Eigen::MatrixXd& lower) {
  return SymmetricMatrix::from_dense(lower * lower.transpose());
}

SymmetricMatrix sample_structured_cov(const CholStructure& s,
                                      const UnivariatePrior& diag_prior,
                                      const UnivariatePrior& offdiag_prior, Rng& rng) {
  return chol_to_cov(sample_structured_chol(s, diag_prior, offdiag_prior, rng));
}

double corr_log_det_from_factor(const Eigen::MatrixXd& lower) {
  double logdet = 0.0;
  for (int j = 0; j < lower.rows(); ++j) {
    logdet += 2.0 * std::log(lower(j, j));
    logdet -= std::log(lower.row(j).squaredNorm());
  }
  return logdet;
}

bool verifies_positive_definite(const Eigen::MatrixXd& lower,
                                const SymmetricMatrix& sigma) {
  if (lower.diagonal().minCoeff() <= 0.0) return false;
  if (is_positive_definite(cov_to_corr(sigma), 0.0)) return true;
  return corr_log_det_from_factor(lower) < std::log(1e-15);
}

SymmetricMatrix cov_to_corr(const SymmetricMatrix& m) {
  const int n = m.dim();
  std::vector<double> inv_sd(n);
  for (int i = 0; i < n; ++i) {
    if (!(m(i, i) > 0.0))
      throw std::invalid_argument("cov_to_corr: nonpositive diagonal entry");
    inv_sd[i] = 1.0 / std::sqrt(m(i, i));
  }
  SymmetricMatrix out(n);
  for (int i = 0; i < n; ++i) {
    out.set(i, i, 1.0);
    for (int j = 0; j < i; ++j) out.set(i, j, m(i, j) * inv_sd[i] * inv_sd[j]);
  }
  return out;
}

}  // namespace opaque
