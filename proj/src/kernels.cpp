#include "hetero_spectra/kernels.hpp"

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hs::kernels {

namespace {

inline double row_dot(const Matrix& y, std::size_t a, std::size_t b) {
  const auto ra = y.row(a);
  const auto rb = y.row(b);
  double s = 0.0;
  for (std::size_t k = 0; k < ra.size(); ++k) s += ra[k] * rb[k];
  return s;
}

}  // namespace

SymMatrix gram_serial(const Matrix& y) {
  const std::size_t p = y.rows();
  std::vector<double> out(p * p, 0.0);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      const double s = row_dot(y, a, b);
      out[a * p + b] = s;
      out[b * p + a] = s;
    }
  return SymMatrix::from_row_major(p, std::move(out));
}

SymMatrix gram_parallel(const Matrix& y, int threads) {
  const std::size_t p = y.rows();
  std::vector<double> out(p * p, 0.0);
  const long long rows = static_cast<long long>(p);
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
#else
  (void)threads;
#endif
  for (long long ai = 0; ai < rows; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    for (std::size_t b = a; b < p; ++b) {
      const double s = row_dot(y, a, b);
      out[a * p + b] = s;
      out[b * p + a] = s;
    }
  }
  return SymMatrix::from_row_major(p, std::move(out));
}

SymMatrix gram(const Matrix& y) {
#ifdef _OPENMP
  if (omp_in_parallel()) return gram_serial(y);
#endif
  return gram_parallel(y);
}

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hs::kernels
