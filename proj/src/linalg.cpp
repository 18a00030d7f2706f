#include "tfm/linalg.hpp"

#include "tfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace tfm {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           const std::vector<std::vector<int>>& pattern)
    : rows_(rows), cols_(cols) {
  if (pattern.size() != rows) throw InvalidArgument("sparsity pattern has wrong row count");
  offsets_.assign(rows + 1, 0);
  std::vector<int> row;
  for (std::size_t i = 0; i < rows; ++i) {
    row = pattern[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    if (!row.empty() && (row.front() < 0 || static_cast<std::size_t>(row.back()) >= cols))
      throw InvalidArgument("sparsity pattern column out of range");
    columns_.insert(columns_.end(), row.begin(), row.end());
    offsets_[i + 1] = columns_.size();
  }
  values_.assign(columns_.size(), 0.0);
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> offsets,
                           std::vector<int> columns, std::vector<double> values)
    : rows_(rows), cols_(cols), offsets_(std::move(offsets)), columns_(std::move(columns)),
      values_(std::move(values)) {
  if (offsets_.size() != rows + 1 || offsets_.front() != 0 || offsets_.back() != columns_.size() ||
      values_.size() != columns_.size())
    throw InvalidArgument("inconsistent compressed-row arrays");
  for (std::size_t i = 0; i < rows; ++i) {
    if (offsets_[i + 1] < offsets_[i]) throw InvalidArgument("row offsets must be nondecreasing");
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (columns_[k] < 0 || static_cast<std::size_t>(columns_[k]) >= cols)
        throw InvalidArgument("column index out of range");
      if (k > offsets_[i] && columns_[k] <= columns_[k - 1])
        throw InvalidArgument("column indices must be strictly increasing within a row");
    }
  }
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& a, double drop) {
  std::vector<std::size_t> offsets{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) {
      if (std::abs(a(i, j)) > drop || (drop == 0.0 && a(i, j) != 0.0)) {
        cols.push_back(static_cast<int>(j));
        vals.push_back(a(i, j));
      }
    }
    offsets.push_back(cols.size());
  }
  return SparseMatrix(a.rows, a.cols, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<int> cols(n);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), 0);
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

std::size_t SparseMatrix::find(std::size_t i, int j) const {
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
    throw InvalidArgument("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is outside the sparsity pattern");
  return static_cast<std::size_t>(it - columns_.begin());
}

double SparseMatrix::at(std::size_t i, int j) const {
  const auto first = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto last = columns_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - columns_.begin())];
}

void SparseMatrix::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

void SparseMatrix::scale(double s) {
  for (double& v : values_) v *= s;
}

void SparseMatrix::axpy(double s, const SparseMatrix& other) {
  if (other.columns_ != columns_ || other.offsets_ != offsets_)
    throw InvalidArgument("axpy requires identical sparsity patterns");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw InvalidArgument("matrix-vector size mismatch");
  const double* v = values_.data();
  const int* c = columns_.data();
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += v[k] * x[c[k]];
    y[i] = s;
  }
}

Vector SparseMatrix::operator*(std::span<const double> x) const {
  Vector y(rows_);
  multiply(x, y);
  return y;
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, static_cast<int>(i));
  return d;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) d(i, columns_[k]) += values_[k];
  return d;
}

SparseMatrix SparseMatrix::principal_submatrix(std::span<const int> index) const {
  std::vector<int> local(cols_, -1);
  for (std::size_t k = 0; k < index.size(); ++k) local[index[k]] = static_cast<int>(k);
  std::vector<std::size_t> offsets{0};
  std::vector<int> cols;
  std::vector<double> vals;
  for (int gi : index) {
    for (std::size_t k = offsets_[gi]; k < offsets_[gi + 1]; ++k) {
      const int lj = local[columns_[k]];
      if (lj >= 0) {
        cols.push_back(lj);
        vals.push_back(values_[k]);
      }
    }
    offsets.push_back(cols.size());
  }
  return SparseMatrix(index.size(), index.size(), std::move(offsets), std::move(cols),
                      std::move(vals));
}

void SparseMatrix::set_identity_row(std::size_t i) {
  for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
    values_[k] = columns_[k] == static_cast<int>(i) ? 1.0 : 0.0;
}

void apply_dirichlet(SparseMatrix& a, std::span<double> b, std::span<const int> dofs,
                     std::span<const double> values, bool symmetric) {
  if (dofs.size() != values.size()) throw InvalidArgument("Dirichlet dofs/values size mismatch");
  if (a.rows() != b.size()) throw InvalidArgument("Dirichlet: right-hand side size mismatch");
  if (symmetric) {
    std::vector<double> known(a.cols(), 0.0);
    std::vector<char> fixed(a.cols(), 0);
    for (std::size_t k = 0; k < dofs.size(); ++k) {
      known[dofs[k]] = values[k];
      fixed[dofs[k]] = 1;
    }
    const auto offsets = a.offsets();
    const auto cols = a.columns();
    auto vals = a.values();
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (fixed[i]) continue;
      for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        if (fixed[cols[k]]) {
          b[i] -= vals[k] * known[cols[k]];
          vals[k] = 0.0;
        }
      }
    }
  }
  for (std::size_t k = 0; k < dofs.size(); ++k) {
    a.set_identity_row(static_cast<std::size_t>(dofs[k]));
    b[dofs[k]] = values[k];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

namespace {

Vector inverse_diagonal(const SparseMatrix& a) {
  Vector d = a.diagonal();
  for (double& v : d) v = v != 0.0 ? 1.0 / v : 1.0;
  return d;
}

double true_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b,
                     Vector& r) {
  a.multiply(x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

void check_system(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0) {
  if (a.rows() != a.cols()) throw InvalidArgument("linear solve requires a square matrix");
  if (b.size() != a.rows()) throw InvalidArgument("right-hand side size mismatch");
  if (!x0.empty() && x0.size() != a.rows()) throw InvalidArgument("initial guess size mismatch");
}

} // namespace

SolveResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter,
                     std::span<const double> x0) {
  check_system(a, b, x0);
  const std::size_t n = b.size();
  SolveResult out;
  out.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    return out;
  }
  const Vector dinv = inverse_diagonal(a);
  Vector r(n), z(n), p(n), q(n);
  double rnorm = true_residual(a, out.x, b, r);
  int it = 0;
  // outer loop restarts from the true residual if the recursive one drifted
  while (rnorm > tol * bnorm) {
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    while (it < max_iter) {
      a.multiply(p, q);
      const double pq = dot(p, q);
      if (pq <= 0.0) break;
      const double step = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        out.x[i] += step * p[i];
        r[i] -= step * q[i];
      }
      ++it;
      if (norm2(r) <= 0.5 * tol * bnorm) break;
      for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    const double previous = rnorm;
    rnorm = true_residual(a, out.x, b, r);
    if (it >= max_iter || (rnorm > tol * bnorm && rnorm >= previous)) {
      if (rnorm <= tol * bnorm) break;
      throw NonConvergence("CG did not converge: relative residual " + std::to_string(rnorm / bnorm),
                           rnorm / bnorm, it);
    }
  }
  out.iterations = it;
  out.residual = rnorm / bnorm;
  return out;
}

SolveResult solve_bicgstab(const SparseMatrix& a, std::span<const double> b, double tol,
                           int max_iter, std::span<const double> x0) {
  check_system(a, b, x0);
  const std::size_t n = b.size();
  SolveResult out;
  out.x = x0.empty() ? Vector(n, 0.0) : Vector(x0.begin(), x0.end());
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    return out;
  }
  const Vector dinv = inverse_diagonal(a);
  Vector r(n), rhat(n), p(n, 0.0), v(n, 0.0), ph(n), s(n), sh(n), t(n);
  double rnorm = true_residual(a, out.x, b, r);
  int it = 0;
  int restarts = 0;
  while (rnorm > tol * bnorm) {
    rhat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    while (it < max_iter) {
      const double rho_new = dot(rhat, r);
      if (std::abs(rho_new) < 1e-300) break; // breakdown: restart
      const double beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      for (std::size_t i = 0; i < n; ++i) ph[i] = dinv[i] * p[i];
      a.multiply(ph, v);
      const double rv = dot(rhat, v);
      if (rv == 0.0) break;
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      if (norm2(s) <= 0.5 * tol * bnorm) {
        for (std::size_t i = 0; i < n; ++i) out.x[i] += alpha * ph[i];
        r = s;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) sh[i] = dinv[i] * s[i];
      a.multiply(sh, t);
      const double tt = dot(t, t);
      omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        out.x[i] += alpha * ph[i] + omega * sh[i];
        r[i] = s[i] - omega * t[i];
      }
      if (norm2(r) <= 0.5 * tol * bnorm || omega == 0.0) break;
    }
    const double previous = rnorm;
    rnorm = true_residual(a, out.x, b, r);
    if (rnorm <= tol * bnorm) break;
    if (it >= max_iter || (rnorm >= previous && ++restarts > 20))
      throw NonConvergence("BiCGStab did not converge: relative residual " +
                               std::to_string(rnorm / bnorm),
                           rnorm / bnorm, it);
  }
  out.iterations = it;
  out.residual = rnorm / bnorm;
  return out;
}

Vector lu_solve_dense(DenseMatrix a, std::span<const double> b) {
  if (a.rows != a.cols) throw InvalidArgument("dense LU requires a square matrix");
  if (b.size() != a.rows) throw InvalidArgument("dense LU: right-hand side size mismatch");
  const std::size_t n = a.rows;
  Vector x(b.begin(), b.end());
  double scale = 0.0;
  for (double v : a.data) scale = std::max(scale, std::abs(v));
  const double eps = 1e-14 * std::max(scale, 1e-300) * static_cast<double>(std::max<std::size_t>(n, 1));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= eps || scale == 0.0)
      throw SingularMatrix("matrix is singular to working precision");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      x[i] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
    x[k] = s / a(k, k);
  }
  return x;
}

} // namespace tfm
