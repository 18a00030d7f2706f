#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfm {

using Vector = std::vector<double>;

/// Row-major dense matrix; used for small systems and test oracles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  static DenseMatrix identity(std::size_t n);
};

/// Compressed-row matrix with a fixed sparsity pattern.
///
/// The pattern is set once; values are accumulated with `add`. Column indices
/// are strictly increasing within a row.
class SparseMatrix {
public:
  SparseMatrix() = default;

  /// `pattern[i]` lists the columns of row i (any order, duplicates allowed).
  SparseMatrix(std::size_t rows, std::size_t cols, const std::vector<std::vector<int>>& pattern);
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
               std::vector<int> columns, std::vector<double> values);

  static SparseMatrix from_dense(const DenseMatrix& a, double drop = 0.0);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> offsets() const { return offsets_; }
  std::span<const int> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Position of (i, j) in the value array; throws if outside the pattern.
  std::size_t find(std::size_t i, int j) const;
  void add(std::size_t i, int j, double v) { values_[find(i, j)] += v; }
  double at(std::size_t i, int j) const;

  void set_zero();
  void scale(double s);
  /// this += s * other; patterns must be identical.
  void axpy(double s, const SparseMatrix& other);

  void multiply(std::span<const double> x, std::span<double> y) const;
  Vector operator*(std::span<const double> x) const;

  Vector diagonal() const;
  DenseMatrix to_dense() const;

  /// Submatrix on the given (sorted) row/column index set.
  SparseMatrix principal_submatrix(std::span<const int> index) const;

  /// Replace row i with the identity row.
  void set_identity_row(std::size_t i);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<int> columns_;
  std::vector<double> values_;
};

/// Impose x[dofs[k]] = values[k] by row replacement. With `symmetric`, the
/// known values are also eliminated from the other rows' columns, which keeps
/// a symmetric matrix symmetric.
void apply_dirichlet(SparseMatrix& a, std::span<double> b, std::span<const int> dofs,
                     std::span<const double> values, bool symmetric);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

struct SolveResult {
  Vector x;
  int iterations = 0;
  double residual = 0.0; ///< final ||Ax - b|| / ||b||
};

/// Jacobi-preconditioned conjugate gradients. Requires A symmetric positive
/// definite. Throws NonConvergence at the iteration limit.
SolveResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter,
                     std::span<const double> x0 = {});

/// Jacobi-preconditioned BiCGStab for general nonsingular A.
SolveResult solve_bicgstab(const SparseMatrix& a, std::span<const double> b, double tol,
                           int max_iter, std::span<const double> x0 = {});

/// Gaussian elimination with partial pivoting.
Vector lu_solve_dense(DenseMatrix a, std::span<const double> b);

} // namespace tfm
