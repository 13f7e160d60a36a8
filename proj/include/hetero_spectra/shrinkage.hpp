#pragma once

// Spectral proximal maps used by the alternating solvers.

#include <cstddef>
#include <string>

#include "hetero_spectra/matcore.hpp"

namespace hs {

enum class ProxKind { psd_soft, sym_soft, rank_r, rank_r_psd };

/// Which proximal map to apply, with its control parameter.
struct ProxSpec {
  ProxKind kind = ProxKind::psd_soft;
  double tau = 0.0;
  std::size_t rank = 0;

  static ProxSpec psd_soft(double tau) { return {ProxKind::psd_soft, tau, 0}; }
  static ProxSpec sym_soft(double tau) { return {ProxKind::sym_soft, tau, 0}; }
  static ProxSpec rank_r(std::size_t r) { return {ProxKind::rank_r, 0.0, r}; }
  static ProxSpec rank_r_psd(std::size_t r) { return {ProxKind::rank_r_psd, 0.0, r}; }

  /// Throws std::invalid_argument if the spec cannot be applied in dimension p.
  void validate(std::size_t p) const;
  std::string describe() const;
};

/// Σ (λ_i − τ)_+ u_i u_iᵀ: minimizer of τ‖X‖_* + ½‖X − M‖_F² over PSD X.
SymMatrix soft_threshold_psd(const SymMatrix& m, double tau);

/// Σ sign(λ_i)(|λ_i| − τ)_+ u_i u_iᵀ: same problem over all symmetric X.
SymMatrix soft_threshold_sym(const SymMatrix& m, double tau);

/// Frobenius-nearest symmetric matrix of rank ≤ r (keeps the r eigenvalues
/// of largest magnitude; magnitude ties keep the earlier eigenpair).
SymMatrix best_rank_r(const SymMatrix& m, std::size_t r);

/// Frobenius-nearest PSD matrix of rank ≤ r.
SymMatrix best_rank_r_psd(const SymMatrix& m, std::size_t r);

SymMatrix apply_prox(const ProxSpec& spec, const SymMatrix& m);

/// Result of a proximal step plus the penalty it incurs at the output
/// (τ‖X‖_* for the soft maps, 0 for the rank constraints, which are met).
struct ProxOutput {
  SymMatrix value;
  double penalty = 0.0;
};

ProxOutput apply_prox_with_penalty(const ProxSpec& spec, const SymMatrix& m);

/// Penalty of an arbitrary L under `spec` (infinite when a rank or PSD
/// constraint is violated beyond rounding).
double prox_penalty(const ProxSpec& spec, const SymMatrix& l);

}  // namespace hs
