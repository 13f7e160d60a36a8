#pragma once

// Data-parallel kernels. Each OpenMP kernel has a serial twin that computes
// every output entry with the same operation order, so results are bitwise
// identical; the serial versions are the references the tests compare to.

#include "hetero_spectra/matcore.hpp"

namespace hs::kernels {

/// Y Yᵀ for a p x n matrix Y.
SymMatrix gram_serial(const Matrix& y);
SymMatrix gram_parallel(const Matrix& y, int threads = 0);

/// Dispatches to gram_parallel, or to gram_serial when already inside a
/// parallel region.
SymMatrix gram(const Matrix& y);

bool openmp_enabled();
int max_threads();

}  // namespace hs::kernels
