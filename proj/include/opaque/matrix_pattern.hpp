// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_MATRIX_PATTERN_HPP
#define OPAQUE_MATRIX_PATTERN_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace opaque {

enum class MatrixKind { Correlation, Covariance };

enum class EntryClass { FreeDiagonal, FreeOffDiagonal, Fixed };

struct PatternEntry {
  EntryClass cls = EntryClass::Fixed;
  double value = 0.0;  // meaningful only when cls == Fixed
};

/// Symmetric pattern of free/fixed entries; only the lower triangle is stored,
/// so the pattern is symmetric by construction.
class MatrixPattern {
 public:
  MatrixPattern(MatrixKind kind, std::vector<std::string> names);

  static MatrixPattern parse(const std::string& json_text);
  static MatrixPattern from_json(const nlohmann::json& doc);

  int dim() const { return dim_; }
  MatrixKind kind() const { return kind_; }
  const std::vector<std::string>& names() const { return names_; }
  int name_index(const std::string& name) const;  // throws on unknown name

  const PatternEntry& entry(int i, int j) const { return tri_[tri_index(i, j)]; }
  bool is_free(int i, int j) const { return entry(i, j).cls != EntryClass::Fixed; }

  void set_free(int i, int j);
  void set_fixed(int i, int j, double value);

  /// Free entries in row-major lower-triangle order (diagonal included).
  std::vector<std::pair<int, int>> free_entries() const;
  std::vector<std::pair<int, int>> free_offdiagonal() const;

  /// Stable identifier of an entry; used to key RNG substreams.
  int entry_id(int i, int j) const { return tri_index(i, j); }

  /// Pattern with rows/columns reordered; perm[k] = original index at slot k.
  MatrixPattern permuted(const std::vector<int>& perm) const;

  /// Copy with the given entries pinned to Fixed(0) (restricted models).
  MatrixPattern with_fixed_zero(const std::vector<std::pair<int, int>>& entries) const;

  std::string entry_label(int i, int j) const;  // "name_i~~name_j"

 private:
  static int tri_size(int n) { return n * (n + 1) / 2; }
  int tri_index(int i, int j) const;

  int dim_;
  MatrixKind kind_;
  std::vector<std::string> names_;
  std::vector<PatternEntry> tri_;  // row-major lower triangle
};

/// Dense symmetric matrix, lower triangle stored.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(int dim);
  static SymmetricMatrix identity(int dim);
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& m);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return tri_[tri_index(i, j)]; }
  void set(int i, int j, double v) { tri_[tri_index(i, j)] = v; }

  Eigen::MatrixXd dense() const;
  SymmetricMatrix permuted(const std::vector<int>& perm) const;

 private:
  int tri_index(int i, int j) const {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }

  int dim_;
  std::vector<double> tri_;
};

struct BlockPartition {
  std::vector<int> permutation;          // permutation[k] = original index at slot k
  std::vector<std::vector<int>> blocks;  // original indices, RCM order within block
};

/// Connected components of the free-off-diagonal graph, each ordered by
/// reverse Cuthill-McKee; blocks sorted by size, ties by smallest original
/// index, which reproduces the permuted layout used throughout.
BlockPartition block_partition(const MatrixPattern& p);

/// Cholesky with explicit pivot tolerance: true iff every pivot > tol.
bool is_positive_definite(const SymmetricMatrix& m, double tol = 1e-12);

double determinant(const SymmetricMatrix& m);

/// Determinant of the 4x4 correlation block with the two-couples structure:
/// r1=(a,b), r2=(a,c), r3=(b,d), r4=(c,d), entries (a,d) and (b,c) zero.
/// Equals 1 + (r1*r4 - r2*r3)^2 - (r1^2 + r2^2 + r3^2 + r4^2).
double bollen_block_det(double r1, double r2, double r3, double r4);

/// Assemble the 4x4 correlation matrix the closed form above refers to,
/// in variable order (a, b, c, d) = (y2, y4, y6, y8).
SymmetricMatrix bollen_block_matrix(double r1, double r2, double r3, double r4);

/// Residual correlation pattern of the political-democracy model: 11
/// variables x1..x3, y1..y8 with six free residual correlations.
MatrixPattern bollen_pattern();

}  // namespace opaque

#endif  // OPAQUE_MATRIX_PATTERN_HPP
