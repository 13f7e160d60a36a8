#pragma once

// Dense matrix types and the symmetric eigensolver everything else builds on.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hs {

/// Dense row-major real matrix of arbitrary shape (data matrices, bases).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Dense real symmetric p x p matrix. Entries are exactly symmetric and finite;
/// every constructor and mutator enforces both.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t p);

  /// Throws std::invalid_argument unless `m` is square, exactly symmetric and finite.
  explicit SymMatrix(const Matrix& m);

  /// Row-major p*p buffer; same checks as the Matrix constructor.
  static SymMatrix from_row_major(std::size_t p, std::vector<double> values);
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows);
  static SymMatrix identity(std::size_t p);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * p_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * p_, p_}; }
  const std::vector<double>& data() const { return data_; }

  /// Writes (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double value);

  std::vector<double> diagonal() const;
  Matrix to_matrix() const;

  double frobenius_norm() const;
  double trace() const;
  bool is_zero() const;
  bool is_diagonal() const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double scale);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t p_ = 0;
  std::vector<double> data_;
};

/// p x r matrix whose columns are orthonormal (UᵀU = I within 1e-10 Frobenius).
class OrthonormalBasis {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit OrthonormalBasis(Matrix columns);

  std::size_t ambient_dim() const { return columns_.rows(); }
  std::size_t rank() const { return columns_.cols(); }
  const Matrix& columns() const { return columns_; }
  std::vector<double> column(std::size_t j) const;

  /// U Uᵀ
  SymMatrix projector() const;

  /// First `r` columns.
  OrthonormalBasis leading(std::size_t r) const;

 private:
  Matrix columns_;
};

/// Eigenpairs sorted by descending eigenvalue.
struct EigenDecomp {
  std::vector<double> values;
  OrthonormalBasis vectors;
};

/// Raised when the Jacobi sweeps do not reach the off-diagonal tolerance.
class EigenNonConvergence : public std::runtime_error {
 public:
  EigenNonConvergence(int sweeps, double off_norm);
  int sweeps() const { return sweeps_; }
  double off_norm() const { return off_norm_; }

 private:
  int sweeps_;
  double off_norm_;
};

struct JacobiLimits {
  int max_sweeps = 100;
  double relative_tolerance = 1e-12;
};

/// Cyclic Jacobi eigendecomposition. Eigenvalues descend; ties keep the
/// order Jacobi produced them in. Each eigenvector is signed so that its
/// largest-magnitude entry is positive (first such index on ties).
EigenDecomp eig_sym(const SymMatrix& m, const JacobiLimits& limits = {});

/// Σ_i w_i v_i v_iᵀ over the eigenvectors of `eig`; zero weights are skipped.
SymMatrix spectral_compose(const EigenDecomp& eig, std::span<const double> weights);

SymMatrix pdiag(const SymMatrix& m);
SymMatrix poffdiag(const SymMatrix& m);

double nuclear_norm_sym(const SymMatrix& m);
double spectral_norm_sym(const SymMatrix& m);

/// Σ_ij a_ij b_ij
double frobenius_inner(const SymMatrix& a, const SymMatrix& b);

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* what);

}  // namespace hs
