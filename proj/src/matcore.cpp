#include "hetero_spectra/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hs {

namespace {

void check_finite(const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      std::ostringstream msg;
      msg << "non-finite entry at flat index " << k;
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Matrix: buffer size does not match shape");
  }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

// ------------------------------------------------------------- SymMatrix

SymMatrix::SymMatrix(std::size_t p) : p_(p), data_(p * p, 0.0) {}

SymMatrix::SymMatrix(const Matrix& m) : p_(m.rows()), data_(m.data()) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << "SymMatrix: matrix is " << m.rows() << "x" << m.cols() << ", not square";
    throw std::invalid_argument(msg.str());
  }
  check_finite(data_);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = i + 1; j < p_; ++j)
      if (data_[i * p_ + j] != data_[j * p_ + i]) {
        std::ostringstream msg;
        msg << "SymMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
            << ") differ";
        throw std::invalid_argument(msg.str());
      }
}

SymMatrix SymMatrix::from_row_major(std::size_t p, std::vector<double> values) {
  return SymMatrix(Matrix(p, p, std::move(values)));
}

SymMatrix SymMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  return SymMatrix(Matrix::from_rows(rows));
}

SymMatrix SymMatrix::identity(std::size_t p) {
  SymMatrix m(p);
  for (std::size_t i = 0; i < p; ++i) m.data_[i * p + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("SymMatrix::set: non-finite value");
  data_[i * p_ + j] = value;
  data_[j * p_ + i] = value;
}

std::vector<double> SymMatrix::diagonal() const {
  std::vector<double> d(p_);
  for (std::size_t i = 0; i < p_; ++i) d[i] = data_[i * p_ + i];
  return d;
}

Matrix SymMatrix::to_matrix() const { return Matrix(p_, p_, data_); }

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < p_; ++i) t += data_[i * p_ + i];
  return t;
}

bool SymMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return v == 0.0; });
}

bool SymMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = i + 1; j < p_; ++j)
      if (data_[i * p_ + j] != 0.0) return false;
  return true;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_same_dim(*this, other, "operator+");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  require_same_dim(*this, other, "operator-");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double scale) {
  if (!std::isfinite(scale)) throw std::invalid_argument("SymMatrix: non-finite scale");
  for (double& v : data_) v *= scale;
  return *this;
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw std::invalid_argument(msg.str());
  }
}

// ------------------------------------------------------ OrthonormalBasis

OrthonormalBasis::OrthonormalBasis(Matrix columns) : columns_(std::move(columns)) {
  const std::size_t p = columns_.rows();
  const std::size_t r = columns_.cols();
  if (r > p) throw std::invalid_argument("OrthonormalBasis: more columns than rows");
  double err2 = 0.0;
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a; b < r; ++b) {
      double dot = 0.0;
      for (std::size_t i = 0; i < p; ++i) dot += columns_(i, a) * columns_(i, b);
      const double d = dot - (a == b ? 1.0 : 0.0);
      err2 += (a == b ? 1.0 : 2.0) * d * d;
    }
  }
  if (!(std::sqrt(err2) <= kTolerance)) {
    std::ostringstream msg;
    msg << "OrthonormalBasis: |UᵀU - I|_F = " << std::sqrt(err2) << " exceeds " << kTolerance;
    throw std::invalid_argument(msg.str());
  }
}

std::vector<double> OrthonormalBasis::column(std::size_t j) const {
  std::vector<double> v(columns_.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = columns_(i, j);
  return v;
}

SymMatrix OrthonormalBasis::projector() const {
  const std::size_t p = columns_.rows();
  std::vector<double> out(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    auto ra = columns_.row(a);
    for (std::size_t b = a; b < p; ++b) {
      auto rb = columns_.row(b);
      double s = 0.0;
      for (std::size_t k = 0; k < ra.size(); ++k) s += ra[k] * rb[k];
      out[a * p + b] = s;
      out[b * p + a] = s;
    }
  }
  return SymMatrix::from_row_major(p, std::move(out));
}

OrthonormalBasis OrthonormalBasis::leading(std::size_t r) const {
  if (r > rank()) throw std::invalid_argument("OrthonormalBasis::leading: r exceeds rank");
  Matrix sub(ambient_dim(), r);
  for (std::size_t i = 0; i < ambient_dim(); ++i)
    for (std::size_t j = 0; j < r; ++j) sub(i, j) = columns_(i, j);
  return OrthonormalBasis(std::move(sub));
}

// ------------------------------------------------------------- Jacobi

EigenNonConvergence::EigenNonConvergence(int sweeps, double off_norm)
    : std::runtime_error("eig_sym: Jacobi did not converge after " + std::to_string(sweeps) +
                         " sweeps (off-diagonal norm " + std::to_string(off_norm) + ")"),
      sweeps_(sweeps),
      off_norm_(off_norm) {}

namespace {

double off_diagonal_norm(const std::vector<double>& a, std::size_t p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) s += a[i * p + j] * a[i * p + j];
  return std::sqrt(2.0 * s);
}

// One Jacobi rotation annihilating a(k,l), k < l; a is full symmetric row-major,
// vt holds the eigenvector estimates as rows.
void rotate(std::vector<double>& a, std::vector<double>& vt, std::size_t p, std::size_t k,
            std::size_t l) {
  const double akl = a[k * p + l];
  const double akk = a[k * p + k];
  const double all = a[l * p + l];
  const double theta = (all - akk) / (2.0 * akl);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  double* rk = a.data() + k * p;
  double* rl = a.data() + l * p;
  for (std::size_t i = 0; i < p; ++i) {
    const double x = rk[i];
    const double y = rl[i];
    rk[i] = c * x - s * y;
    rl[i] = s * x + c * y;
  }
  rk[k] = akk - t * akl;
  rl[l] = all + t * akl;
  rk[l] = 0.0;
  rl[k] = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    a[i * p + k] = rk[i];
    a[i * p + l] = rl[i];
  }

  double* vk = vt.data() + k * p;
  double* vl = vt.data() + l * p;
  for (std::size_t i = 0; i < p; ++i) {
    const double x = vk[i];
    const double y = vl[i];
    vk[i] = c * x - s * y;
    vl[i] = s * x + c * y;
  }
}

}  // namespace

EigenDecomp eig_sym(const SymMatrix& m, const JacobiLimits& limits) {
  const std::size_t p = m.dim();
  std::vector<double> a = m.data();
  std::vector<double> v(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) v[i * p + i] = 1.0;

  const double tol = limits.relative_tolerance * m.frobenius_norm();
  double off = off_diagonal_norm(a, p);
  int sweep = 0;
  while (off > tol) {
    if (sweep == limits.max_sweeps) throw EigenNonConvergence(sweep, off);
    ++sweep;
    for (std::size_t k = 0; k + 1 < p; ++k)
      for (std::size_t l = k + 1; l < p; ++l) {
        const double akl = a[k * p + l];
        if (akl == 0.0) continue;
        // Past the first sweeps, an entry below the rounding of both diagonal
        // entries is dropped instead of rotated.
        const double g = 100.0 * std::abs(akl);
        if (sweep > 4 && std::abs(a[k * p + k]) + g == std::abs(a[k * p + k]) &&
            std::abs(a[l * p + l]) + g == std::abs(a[l * p + l])) {
          a[k * p + l] = 0.0;
          a[l * p + k] = 0.0;
          continue;
        }
        rotate(a, v, p, k, l);
      }
    off = off_diagonal_norm(a, p);
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * p + x] > a[y * p + y]; });

  std::vector<double> values(p);
  Matrix vectors(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t src = order[j];
    values[j] = a[src * p + src];

    double max_abs = 0.0;
    const double* col = v.data() + src * p;
    for (std::size_t i = 0; i < p; ++i) max_abs = std::max(max_abs, std::abs(col[i]));
    // First index whose magnitude is within rounding of the maximum decides the sign.
    double sign = 1.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double x = col[i];
      if (std::abs(x) >= max_abs * (1.0 - 1e-12)) {
        sign = x < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < p; ++i) vectors(i, j) = sign * col[i];
  }
  return EigenDecomp{std::move(values), OrthonormalBasis(std::move(vectors))};
}

SymMatrix spectral_compose(const EigenDecomp& eig, std::span<const double> weights) {
  const Matrix& vec = eig.vectors.columns();
  const std::size_t p = vec.rows();
  if (weights.size() != vec.cols()) {
    throw std::invalid_argument("spectral_compose: weight count differs from eigenpair count");
  }
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] != 0.0) active.push_back(k);

  const std::size_t m = active.size();
  std::vector<double> plain(p * m), scaled(p * m);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 0; c < m; ++c) {
      plain[i * m + c] = vec(i, active[c]);
      scaled[i * m + c] = weights[active[c]] * vec(i, active[c]);
    }

  std::vector<double> out(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    const double* sa = scaled.data() + a * m;
    for (std::size_t b = a; b < p; ++b) {
      const double* pb = plain.data() + b * m;
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += sa[c] * pb[c];
      out[a * p + b] = s;
      out[b * p + a] = s;
    }
  }
  return SymMatrix::from_row_major(p, std::move(out));
}

SymMatrix pdiag(const SymMatrix& m) { return SymMatrix::diagonal(m.diagonal()); }

SymMatrix poffdiag(const SymMatrix& m) {
  SymMatrix out = m;
  for (std::size_t i = 0; i < m.dim(); ++i) out.set(i, i, 0.0);
  return out;
}

double nuclear_norm_sym(const SymMatrix& m) {
  if (m.is_zero()) return 0.0;
  const auto eig = eig_sym(m);
  double s = 0.0;
  for (double l : eig.values) s += std::abs(l);
  return s;
}

double spectral_norm_sym(const SymMatrix& m) {
  if (m.is_zero() || m.dim() == 0) return 0.0;
  const auto eig = eig_sym(m);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

double frobenius_inner(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "frobenius_inner");
  double s = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) s += a.data()[k] * b.data()[k];
  return s;
}

}  // namespace hs
