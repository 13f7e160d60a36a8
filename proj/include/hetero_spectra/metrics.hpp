#pragma once

// Scalar diagnostics: subspace distances, coherence, closed forms and bounds.

#include <cstddef>
#include <span>

#include "hetero_spectra/matcore.hpp"
#include "hetero_spectra/solvers.hpp"

namespace hs {

/// ‖UUᵀ − VVᵀ‖ (spectral), the largest principal-angle sine. In [0, 1].
double sin_theta(const OrthonormalBasis& u, const OrthonormalBasis& v);

/// ‖U‖²_{2,∞}: largest squared row norm, in [r/p, 1].
double coherence(const OrthonormalBasis& u);

/// ‖U‖_{2,∞} (not squared); this is the quantity in the sin-theta event.
double two_to_infinity_norm(const OrthonormalBasis& u);

/// (2p + 1 − √(8p + 1)) / 2
double ledermann_bound(std::size_t p);

/// |β_i| ≤ Σ_{j≠i} |β_j| for every i. Throws on the zero vector.
bool is_balanced(std::span<const double> beta);

/// eᵀLe / eᵀΣe with e the all-ones vector.
double reliability_coefficient(const SymMatrix& l, const SymMatrix& sigma);

/// ‖Σ − (L + D)‖_F²
double psi_residual(const SymMatrix& sigma, const SymMatrix& l, const SymMatrix& d);
double psi_residual(const SymMatrix& sigma, const Decomposition& dec);

/// True when some D_ii ≤ 0 (a zero variance counts as improper).
bool heywood_check(const SymMatrix& d);
bool heywood_check(const Decomposition& dec);

/// Count of eigenvalues with |λ| > rel_cutoff · max|λ|.
std::size_t numerical_rank(const SymMatrix& m, double rel_cutoff = 1e-8);

/// sin-theta distance between β and the top eigenvector of
/// Σ = s·ββᵀ + ηηᵀ, with ‖β‖ = 1, η a coordinate vector and q = βᵀη.
/// Throws std::domain_error for |q| ≥ 1, s ≤ 0, or the tie q = 0, s = 1.
double spike_pca_sin_theta(double q, double s);

struct SinThetaEvent {
  double coherence_term = 0.0;  // 3‖U‖_{2,∞}
  double noise_term = 0.0;      // (τ + ‖poffdiag(W)‖) / λ_r
  double rho = 0.0;
  bool holds = false;
  double bound = 0.0;  // 2(1 − ϱ)⁻¹ · noise_term
};

/// Evaluates the event 0 < 3‖U‖_{2,∞} + 2(1−ϱ)⁻¹·noise_term < ϱ < 1 under which
/// the estimated subspace of the relaxed-MTFA solution is within `bound`.
SinThetaEvent sin_theta_event(const OrthonormalBasis& u, const SymMatrix& w, double tau,
                              double lambda_r, double rho);

}  // namespace hs
