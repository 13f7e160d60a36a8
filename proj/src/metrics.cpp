#include "hetero_spectra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hs {

double sin_theta(const OrthonormalBasis& u, const OrthonormalBasis& v) {
  if (u.ambient_dim() != v.ambient_dim() || u.rank() != v.rank()) {
    throw std::invalid_argument("sin_theta: bases must share p and r");
  }
  const double s = spectral_norm_sym(u.projector() - v.projector());
  return std::clamp(s, 0.0, 1.0);
}

double coherence(const OrthonormalBasis& u) {
  const Matrix& c = u.columns();
  double best = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double s = 0.0;
    for (double x : c.row(i)) s += x * x;
    best = std::max(best, s);
  }
  return best;
}

double two_to_infinity_norm(const OrthonormalBasis& u) { return std::sqrt(coherence(u)); }

double ledermann_bound(std::size_t p) {
  if (p < 1) throw std::invalid_argument("ledermann_bound: p must be positive");
  const double pd = static_cast<double>(p);
  return (2.0 * pd + 1.0 - std::sqrt(8.0 * pd + 1.0)) / 2.0;
}

bool is_balanced(std::span<const double> beta) {
  double total = 0.0;
  for (double b : beta) total += std::abs(b);
  if (total == 0.0) throw std::invalid_argument("is_balanced: zero vector");
  return std::all_of(beta.begin(), beta.end(),
                     [&](double b) { return std::abs(b) <= total - std::abs(b); });
}

double reliability_coefficient(const SymMatrix& l, const SymMatrix& sigma) {
  require_same_dim(l, sigma, "reliability_coefficient");
  const double denom = std::accumulate(sigma.data().begin(), sigma.data().end(), 0.0);
  if (!(denom > 0.0)) throw std::invalid_argument("reliability_coefficient: eᵀΣe must be positive");
  return std::accumulate(l.data().begin(), l.data().end(), 0.0) / denom;
}

double psi_residual(const SymMatrix& sigma, const SymMatrix& l, const SymMatrix& d) {
  require_same_dim(sigma, l, "psi_residual");
  require_same_dim(sigma, d, "psi_residual");
  double acc = 0.0;
  for (std::size_t k = 0; k < sigma.data().size(); ++k) {
    const double r = sigma.data()[k] - l.data()[k] - d.data()[k];
    acc += r * r;
  }
  return acc;
}

double psi_residual(const SymMatrix& sigma, const Decomposition& dec) {
  return psi_residual(sigma, dec.L, dec.D);
}

bool heywood_check(const SymMatrix& d) {
  const auto diag = d.diagonal();
  return std::any_of(diag.begin(), diag.end(), [](double v) { return v <= 0.0; });
}

bool heywood_check(const Decomposition& dec) { return heywood_check(dec.D); }

std::size_t numerical_rank(const SymMatrix& m, double rel_cutoff) {
  if (m.is_zero()) return 0;
  const auto eig = eig_sym(m);
  const double top = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  return static_cast<std::size_t>(std::count_if(eig.values.begin(), eig.values.end(),
                                                [&](double v) { return std::abs(v) > rel_cutoff * top; }));
}

double spike_pca_sin_theta(double q, double s) {
  if (!std::isfinite(q) || !(std::abs(q) < 1.0)) {
    throw std::domain_error("spike_pca_sin_theta: requires |q| < 1");
  }
  if (!std::isfinite(s) || !(s > 0.0)) throw std::domain_error("spike_pca_sin_theta: requires s > 0");
  if (q == 0.0) {
    if (s == 1.0) throw std::domain_error("spike_pca_sin_theta: q = 0, s = 1 is a tie");
    return s < 1.0 ? 1.0 : 0.0;
  }
  // Top eigenvector ∝ β + tη. Both expressions for t are the same quantity;
  // each avoids cancellation on its side of s = 1.
  const double root = std::sqrt((1.0 - s) * (1.0 - s) + 4.0 * s * q * q);
  const double t = s >= 1.0 ? 2.0 * q / (s - 1.0 + root) : (root + 1.0 - s) / (2.0 * s * q);
  const double inv = 1.0 / t;
  // sin² = t²(1 − q²) / (1 + 2tq + t²), divided through by t².
  const double sin2 = (1.0 - q * q) / (inv * inv + 2.0 * q * inv + 1.0);
  return std::sqrt(std::clamp(sin2, 0.0, 1.0));
}

SinThetaEvent sin_theta_event(const OrthonormalBasis& u, const SymMatrix& w, double tau,
                              double lambda_r, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("sin_theta_event: rho must be in (0, 1)");
  if (!(lambda_r > 0.0)) throw std::invalid_argument("sin_theta_event: lambda_r must be positive");
  if (!(tau >= 0.0)) throw std::invalid_argument("sin_theta_event: tau must be nonnegative");
  if (w.dim() != u.ambient_dim()) throw std::invalid_argument("sin_theta_event: W dimension mismatch");

  SinThetaEvent ev;
  ev.rho = rho;
  ev.coherence_term = 3.0 * two_to_infinity_norm(u);
  ev.noise_term = (tau + spectral_norm_sym(poffdiag(w))) / lambda_r;
  ev.bound = 2.0 / (1.0 - rho) * ev.noise_term;
  const double lhs = ev.coherence_term + ev.bound;
  ev.holds = 0.0 < lhs && lhs < rho && rho < 1.0;
  return ev;
}

}  // namespace hs
