#include "hetero_spectra/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hs {

std::string_view method_tag(Method m) {
  switch (m) {
    case Method::svd: return "svd";
    case Method::dd: return "dd";
    case Method::hpca: return "hpca";
    case Method::dhpca: return "dhpca";
    case Method::hpca_plus: return "hpca_plus";
    case Method::rmtfa: return "rmtfa";
    case Method::si: return "si";
  }
  return "?";
}

std::string_view method_label(Method m) {
  switch (m) {
    case Method::svd: return "SVD";
    case Method::dd: return "DD";
    case Method::hpca: return "HPCA";
    case Method::dhpca: return "DHPCA";
    case Method::hpca_plus: return "HPCA+";
    case Method::rmtfa: return "rMTFA";
    case Method::si: return "SI";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view tag) {
  for (Method m : kAllMethods)
    if (method_tag(m) == tag) return m;
  return std::nullopt;
}

bool method_uses_tau(Method m) { return m == Method::rmtfa || m == Method::si; }

void StopRule::validate() const {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("StopRule: rel_tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("StopRule: max_iter must be at least 1");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("StopRule: abs_tol must be positive");
}

std::size_t SolverTrace::monotone_violations() const {
  std::size_t bad = 0;
  for (std::size_t k = 1; k < entries.size(); ++k) {
    const double prev = entries[k - 1].objective;
    if (entries[k].objective > prev + kMonotoneSlack * std::max(1.0, std::abs(prev))) ++bad;
  }
  return bad;
}

namespace {

void require_symmetric_input(const SymMatrix& sigma) {
  if (sigma.dim() == 0) throw std::invalid_argument("solver: empty covariance matrix");
}

void require_rank(std::size_t r, std::size_t p) {
  if (r < 1 || r > p) {
    std::ostringstream msg;
    msg << "solver: rank " << r << " outside [1, " << p << "]";
    throw std::invalid_argument(msg.str());
  }
}

void require_iterations(int t_max) {
  if (t_max < 1) throw std::invalid_argument("solver: iteration count must be at least 1");
}

double half_residual_sq(const SymMatrix& sigma, const SymMatrix& l, const SymMatrix& d) {
  const auto& s = sigma.data();
  const auto& a = l.data();
  const auto& b = d.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double r = s[k] - a[k] - b[k];
    acc += r * r;
  }
  return 0.5 * acc;
}

double offdiag_residual_sq(const SymMatrix& sigma, const SymMatrix& l) {
  const std::size_t p = sigma.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      if (i == j) continue;
      const double r = sigma(i, j) - l(i, j);
      acc += r * r;
    }
  return acc;
}

double distance(const SymMatrix& a, const SymMatrix& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    const double d = a.data()[k] - b.data()[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

// Shared engine. With early_stop=false it runs exactly max_iter steps and
// reports whether the stopping rule held at the last one.
AlternatingResult run_alternating(const SymMatrix& sigma, const ProxSpec& prox,
                                  const SymMatrix& d0, const StopRule& stop, bool early_stop,
                                  const IterateObserver& observer) {
  require_symmetric_input(sigma);
  require_same_dim(sigma, d0, "alternating_solve");
  if (!d0.is_diagonal()) throw std::invalid_argument("alternating_solve: D0 must be diagonal");
  prox.validate(sigma.dim());

  const std::size_t p = sigma.dim();
  AlternatingResult out{SymMatrix(p), SymMatrix(p), {}};
  if (sigma.is_zero()) {
    out.trace.converged = true;
    return out;
  }

  SymMatrix l_prev(p);
  SymMatrix d = d0;
  bool stationary = false;
  for (int k = 1; k <= stop.max_iter; ++k) {
    ProxOutput step = apply_prox_with_penalty(prox, sigma - d);
    SymMatrix d_next = pdiag(sigma - step.value);

    const double residual = distance(step.value, l_prev);
    const double l_norm = l_prev.frobenius_norm();
    const double limit =
        std::min(stop.rel_tol * std::max(1.0, l_norm),
                 std::max(stop.abs_tol, StopRule::kRoundoffFloor * l_norm));
    stationary = residual <= limit;
    if (k == 1) {
      stationary = stationary &&
                   distance(d_next, d) <= stop.rel_tol * std::max(1.0, d.frobenius_norm());
    }

    out.trace.entries.push_back(TraceEntry{k, step.penalty + half_residual_sq(sigma, step.value, d_next),
                                           residual, offdiag_residual_sq(sigma, step.value)});
    out.trace.iterations = k;
    if (observer) observer(k, step.value);

    l_prev = std::move(step.value);
    d = std::move(d_next);
    if (early_stop && stationary) break;
  }
  out.trace.converged = stationary;
  out.L = std::move(l_prev);
  out.D = std::move(d);
  return out;
}

}  // namespace

AlternatingResult alternating_solve(const SymMatrix& sigma, const ProxSpec& prox,
                                    const SymMatrix& d0, const StopRule& stop,
                                    const IterateObserver& observer) {
  stop.validate();
  return run_alternating(sigma, prox, d0, stop, true, observer);
}

RmtfaResult rmtfa(const SymMatrix& sigma, double tau, const StopRule& stop) {
  return rmtfa(sigma, tau, pdiag(sigma), stop);
}

RmtfaResult rmtfa(const SymMatrix& sigma, double tau, const SymMatrix& d0,
                  const StopRule& stop) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("rmtfa: tau must be positive (uniqueness needs tau > 0)");
  }
  auto res = alternating_solve(sigma, ProxSpec::psd_soft(tau), d0, stop);
  return RmtfaResult{Decomposition{std::move(res.L), std::move(res.D), Method::rmtfa, tau},
                     std::move(res.trace)};
}

AlternatingResult soft_impute_diag(const SymMatrix& sigma, double tau, const StopRule& stop) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("soft_impute_diag: tau must be positive");
  }
  return alternating_solve(sigma, ProxSpec::sym_soft(tau), pdiag(sigma), stop);
}

HeteroPcaResult heteropca(const SymMatrix& sigma, std::size_t r, int t_max) {
  require_symmetric_input(sigma);
  return heteropca_from(poffdiag(sigma), r, t_max);
}

HeteroPcaResult heteropca_from(const SymMatrix& g0, std::size_t r, int t_max,
                               const IterateObserver& observer) {
  require_symmetric_input(g0);
  require_rank(r, g0.dim());
  require_iterations(t_max);
  const std::size_t p = g0.dim();
  HeteroPcaResult out{SymMatrix(p), g0};
  for (int k = 1; k <= t_max; ++k) {
    out.L = best_rank_r(out.G, r);
    for (std::size_t i = 0; i < p; ++i) out.G.set(i, i, out.L(i, i));
    if (observer) observer(k, out.L);
  }
  return out;
}

std::size_t deflation_next_rank(std::span<const double> sv, std::size_t r_prev, std::size_t r) {
  if (r_prev >= r) throw std::invalid_argument("deflation_next_rank: r_prev must be below r");
  if (sv.size() < r) throw std::invalid_argument("deflation_next_rank: too few singular values");
  // 1-based σ_i = sv[i-1]; σ_{p+1} := 0.
  auto sigma_at = [&](std::size_t i) { return i <= sv.size() ? sv[i - 1] : 0.0; };
  const double head = sigma_at(r_prev + 1);
  const double min_gap = 1.0 / static_cast<double>(r);
  for (std::size_t cand = r; cand > r_prev; --cand) {
    const double s = sigma_at(cand);
    if (!(s > 0.0)) continue;
    if (head / s <= 4.0 && (s - sigma_at(cand + 1)) / s >= min_gap) return cand;
  }
  return r;
}

DeflatedResult deflated_heteropca(const SymMatrix& sigma, std::size_t r, int t_max_per_stage) {
  require_symmetric_input(sigma);
  require_rank(r, sigma.dim());
  require_iterations(t_max_per_stage);
  const std::size_t p = sigma.dim();
  DeflatedResult out{SymMatrix(p), poffdiag(sigma), {}};
  std::size_t current = 0;
  while (current < r) {
    std::vector<double> sv(p, 0.0);
    if (!out.G.is_zero()) {
      const auto eig = eig_sym(out.G);
      for (std::size_t i = 0; i < p; ++i) sv[i] = std::abs(eig.values[i]);
      std::sort(sv.begin(), sv.end(), std::greater<>());
    }
    current = deflation_next_rank(sv, current, r);
    out.stage_ranks.push_back(current);
    auto stage = heteropca_from(out.G, current, t_max_per_stage);
    out.L = std::move(stage.L);
    out.G = std::move(stage.G);
  }
  return out;
}

AlternatingResult heteropca_psd(const SymMatrix& sigma, std::size_t r, int t_max) {
  require_symmetric_input(sigma);
  require_rank(r, sigma.dim());
  require_iterations(t_max);
  StopRule fixed;
  fixed.max_iter = t_max;
  return run_alternating(sigma, ProxSpec::rank_r_psd(r), pdiag(sigma), fixed, false, {});
}

SymMatrix diag_deleted_pca(const SymMatrix& sigma, std::size_t r) {
  require_symmetric_input(sigma);
  require_rank(r, sigma.dim());
  return best_rank_r(poffdiag(sigma), r);
}

OrthonormalBasis pca_baseline(const SymMatrix& sigma, std::size_t r) {
  require_symmetric_input(sigma);
  require_rank(r, sigma.dim());
  return eig_sym(sigma).vectors.leading(r);
}

double objective_F(const SymMatrix& sigma, const SymMatrix& l, const SymMatrix& d, double tau) {
  require_same_dim(sigma, l, "objective_F");
  require_same_dim(sigma, d, "objective_F");
  const double penalty = tau == 0.0 ? 0.0 : tau * nuclear_norm_sym(l);
  return penalty + half_residual_sq(sigma, l, d);
}

SubspaceEstimate extract_subspace(const SymMatrix& l, std::size_t r, SubspaceOrder order) {
  require_rank(r, l.dim());
  const std::size_t p = l.dim();
  const auto eig = eig_sym(l);

  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (order == SubspaceOrder::magnitude) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(eig.values[a]) > std::abs(eig.values[b]);
    });
  }
  double max_abs = 0.0;
  for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
  std::size_t rank = 0;
  for (double v : eig.values) rank += (max_abs > 0.0 && std::abs(v) > 1e-8 * max_abs) ? 1 : 0;

  Matrix cols(p, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < p; ++i) cols(i, j) = eig.vectors.columns()(i, idx[j]);
  return SubspaceEstimate{OrthonormalBasis(std::move(cols)), rank, r > rank};
}

SubspaceEstimate extract_subspace(const Decomposition& dec, std::size_t r) {
  return extract_subspace(dec.L, r, SubspaceOrder::signed_value);
}

double rmtfa_fixed_point_residual(const SymMatrix& sigma, const SymMatrix& l, double tau) {
  require_same_dim(sigma, l, "rmtfa_fixed_point_residual");
  return distance(l, soft_threshold_psd(poffdiag(sigma) + pdiag(l), tau));
}

double soft_impute_fixed_point_residual(const SymMatrix& sigma, const SymMatrix& l, double tau) {
  require_same_dim(sigma, l, "soft_impute_fixed_point_residual");
  return distance(l, soft_threshold_sym(poffdiag(sigma) + pdiag(l), tau));
}

}  // namespace hs
