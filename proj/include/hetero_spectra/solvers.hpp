#pragma once

// Covariance decomposition Σ ≈ L + D (L low-rank or PSD, D diagonal):
// the relaxed trace-minimization solver and the heteroskedastic-PCA family.

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "hetero_spectra/matcore.hpp"
#include "hetero_spectra/shrinkage.hpp"

namespace hs {

enum class Method { svd, dd, hpca, dhpca, hpca_plus, rmtfa, si };

inline constexpr Method kAllMethods[] = {Method::svd,       Method::dd,    Method::hpca,
                                         Method::dhpca,     Method::hpca_plus,
                                         Method::rmtfa,     Method::si};

/// Lower-case tag used in configs and CSV files ("hpca_plus").
std::string_view method_tag(Method m);
/// Display acronym ("HPCA+").
std::string_view method_label(Method m);
std::optional<Method> parse_method(std::string_view tag);
/// True for methods controlled by τ (rmtfa, si); the rest take a rank.
bool method_uses_tau(Method m);

/// Stopping rule for open-ended iterations: stop once the step
/// ‖L^(k) − L^(k−1)‖_F is at most rel_tol · max(1, ‖L^(k−1)‖_F) and also at
/// most max(abs_tol, kRoundoffFloor · ‖L^(k−1)‖_F), or after max_iter.
/// The step bounds the fixed-point residual of the returned iterate, so the
/// absolute part keeps that residual small on large-scale inputs too; set
/// abs_tol to infinity for the purely relative rule.
struct StopRule {
  static constexpr double kRoundoffFloor = 1e-13;

  double rel_tol = 1e-10;
  int max_iter = 1000;
  double abs_tol = 1e-9;

  void validate() const;
};

struct TraceEntry {
  int k = 0;
  double objective = 0.0;
  double fixed_point_residual = 0.0;  // ‖L^(k) − L^(k−1)‖_F
  double psi = 0.0;                   // ‖poffdiag(Σ − L^(k))‖_F²
};

struct SolverTrace {
  /// Relative slack allowed when checking that the objective never increases;
  /// covers rounding in evaluating F, nothing more.
  static constexpr double kMonotoneSlack = 1e-12;

  std::vector<TraceEntry> entries;
  bool converged = false;
  int iterations = 0;

  /// Number of k with F(k) > F(k−1) + slack·max(1, |F(k−1)|).
  std::size_t monotone_violations() const;
  bool monotone() const { return monotone_violations() == 0; }
};

/// A fitted pair: L PSD, D diagonal.
struct Decomposition {
  SymMatrix L;
  SymMatrix D;
  Method method = Method::rmtfa;
  double control = 0.0;  // τ for shrinkage methods, r otherwise
};

/// Output of the generic alternating minimization; L need not be PSD.
struct AlternatingResult {
  SymMatrix L;
  SymMatrix D;
  SolverTrace trace;
};

/// Called after each iteration with (k, L^(k)).
using IterateObserver = std::function<void(int, const SymMatrix&)>;

/// Alternating minimization of Π(L) + ½‖Σ − (L + D)‖_F²:
///   L^(k) = prox(Σ − D^(k−1)),  D^(k) = pdiag(Σ − L^(k)).
/// L^(0) is taken as 0; on the first iteration the D update must also be
/// stationary before the rule may stop. Non-convergence is reported through
/// trace.converged, never thrown.
AlternatingResult alternating_solve(const SymMatrix& sigma, const ProxSpec& prox,
                                    const SymMatrix& d0, const StopRule& stop = {},
                                    const IterateObserver& observer = {});

struct RmtfaResult {
  Decomposition decomposition;
  SolverTrace trace;
};

/// Relaxed MTFA: minimize τ‖L‖_* + ½‖Σ − (L + D)‖_F² over PSD L, diagonal D.
/// Starts from D^(0) = pdiag(Σ).
RmtfaResult rmtfa(const SymMatrix& sigma, double tau, const StopRule& stop = {});

/// Warm-started variant; any diagonal D^(0) reaches the same minimizer.
RmtfaResult rmtfa(const SymMatrix& sigma, double tau, const SymMatrix& d0,
                  const StopRule& stop = {});

/// Diagonal imputation by singular value thresholding (no PSD constraint).
AlternatingResult soft_impute_diag(const SymMatrix& sigma, double tau,
                                   const StopRule& stop = {});

inline constexpr int kDefaultHeteroPcaIterations = 30;

struct HeteroPcaResult {
  SymMatrix L;
  SymMatrix G;
};

/// HeteroPCA from G^(0) = poffdiag(Σ).
HeteroPcaResult heteropca(const SymMatrix& sigma, std::size_t r,
                          int t_max = kDefaultHeteroPcaIterations);

/// HeteroPCA from an explicit symmetric G^(0):
///   L^(k) = best_rank_r(G^(k−1)),  G^(k) = poffdiag(G^(k−1)) + pdiag(L^(k)).
HeteroPcaResult heteropca_from(const SymMatrix& g0, std::size_t r, int t_max,
                               const IterateObserver& observer = {});

/// Rank chosen for the next deflation stage from the singular values
/// (descending) of the current iterate: the largest r' in (r_prev, r] with
/// σ_{r_prev+1}/σ_{r'} ≤ 4 and (σ_{r'} − σ_{r'+1})/σ_{r'} ≥ 1/r, else r.
std::size_t deflation_next_rank(std::span<const double> singular_values, std::size_t r_prev,
                                std::size_t r);

struct DeflatedResult {
  SymMatrix L;
  SymMatrix G;
  std::vector<std::size_t> stage_ranks;
};

DeflatedResult deflated_heteropca(const SymMatrix& sigma, std::size_t r,
                                  int t_max_per_stage = kDefaultHeteroPcaIterations);

/// HeteroPCA with a PSD constraint: exactly t_max alternating steps with the
/// rank-r PSD projection, from D^(0) = pdiag(Σ).
AlternatingResult heteropca_psd(const SymMatrix& sigma, std::size_t r,
                                int t_max = kDefaultHeteroPcaIterations);

/// best_rank_r(poffdiag(Σ))
SymMatrix diag_deleted_pca(const SymMatrix& sigma, std::size_t r);

/// Leading-r eigenvectors of Σ.
OrthonormalBasis pca_baseline(const SymMatrix& sigma, std::size_t r);

/// τ‖L‖_* + ½‖Σ − (L + D)‖_F²
double objective_F(const SymMatrix& sigma, const SymMatrix& l, const SymMatrix& d, double tau);

enum class SubspaceOrder {
  signed_value,  // leading = largest eigenvalues
  magnitude,     // leading = largest |eigenvalues|
};

struct SubspaceEstimate {
  OrthonormalBasis basis;
  std::size_t numerical_rank = 0;  // eigenvalues above 1e-8 · max |λ|
  bool rank_deficient = false;     // r exceeded numerical_rank; basis was completed
};

SubspaceEstimate extract_subspace(const SymMatrix& l, std::size_t r,
                                  SubspaceOrder order = SubspaceOrder::signed_value);
SubspaceEstimate extract_subspace(const Decomposition& dec, std::size_t r);

/// ‖L − D_τ⁺(poffdiag(Σ) + pdiag(L))‖_F; zero exactly at the relaxed-MTFA optimum.
double rmtfa_fixed_point_residual(const SymMatrix& sigma, const SymMatrix& l, double tau);

/// Same with the unconstrained soft threshold D_τ (Soft-Impute optimum).
double soft_impute_fixed_point_residual(const SymMatrix& sigma, const SymMatrix& l, double tau);

}  // namespace hs
