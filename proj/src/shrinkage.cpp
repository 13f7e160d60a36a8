#include "hetero_spectra/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hs {

namespace {

void require_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("shrinkage: tau must be finite and nonnegative");
  }
}

void require_rank(std::size_t r, std::size_t p) {
  if (r < 1 || r > p) {
    std::ostringstream msg;
    msg << "shrinkage: rank " << r << " outside [1, " << p << "]";
    throw std::invalid_argument(msg.str());
  }
}

struct Shrunk {
  SymMatrix value;
  double nuclear = 0.0;
};

Shrunk psd_soft_impl(const SymMatrix& m, double tau) {
  require_tau(tau);
  if (m.is_zero()) return {SymMatrix(m.dim()), 0.0};
  const auto eig = eig_sym(m);
  std::vector<double> w(eig.values.size());
  double nuclear = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::max(eig.values[i] - tau, 0.0);
    nuclear += w[i];
  }
  return {spectral_compose(eig, w), nuclear};
}

Shrunk sym_soft_impl(const SymMatrix& m, double tau) {
  require_tau(tau);
  if (m.is_zero()) return {SymMatrix(m.dim()), 0.0};
  const auto eig = eig_sym(m);
  std::vector<double> w(eig.values.size());
  double nuclear = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double mag = std::max(std::abs(eig.values[i]) - tau, 0.0);
    w[i] = eig.values[i] < 0.0 ? -mag : mag;
    nuclear += mag;
  }
  return {spectral_compose(eig, w), nuclear};
}

}  // namespace

void ProxSpec::validate(std::size_t p) const {
  switch (kind) {
    case ProxKind::psd_soft:
    case ProxKind::sym_soft:
      require_tau(tau);
      break;
    case ProxKind::rank_r:
    case ProxKind::rank_r_psd:
      require_rank(rank, p);
      break;
  }
}

std::string ProxSpec::describe() const {
  std::ostringstream out;
  switch (kind) {
    case ProxKind::psd_soft: out << "psd_soft(" << tau << ")"; break;
    case ProxKind::sym_soft: out << "sym_soft(" << tau << ")"; break;
    case ProxKind::rank_r: out << "rank_r(" << rank << ")"; break;
    case ProxKind::rank_r_psd: out << "rank_r_psd(" << rank << ")"; break;
  }
  return out.str();
}

SymMatrix soft_threshold_psd(const SymMatrix& m, double tau) {
  return psd_soft_impl(m, tau).value;
}

SymMatrix soft_threshold_sym(const SymMatrix& m, double tau) {
  return sym_soft_impl(m, tau).value;
}

SymMatrix best_rank_r(const SymMatrix& m, std::size_t r) {
  require_rank(r, m.dim());
  if (m.is_zero()) return SymMatrix(m.dim());
  const auto eig = eig_sym(m);
  std::vector<std::size_t> order(eig.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(eig.values[a]) > std::abs(eig.values[b]);
  });
  std::vector<double> w(eig.values.size(), 0.0);
  for (std::size_t k = 0; k < r; ++k) w[order[k]] = eig.values[order[k]];
  return spectral_compose(eig, w);
}

SymMatrix best_rank_r_psd(const SymMatrix& m, std::size_t r) {
  require_rank(r, m.dim());
  if (m.is_zero()) return SymMatrix(m.dim());
  const auto eig = eig_sym(m);
  std::vector<double> w(eig.values.size(), 0.0);
  for (std::size_t k = 0; k < r; ++k) w[k] = std::max(eig.values[k], 0.0);
  return spectral_compose(eig, w);
}

ProxOutput apply_prox_with_penalty(const ProxSpec& spec, const SymMatrix& m) {
  spec.validate(m.dim());
  switch (spec.kind) {
    case ProxKind::psd_soft: {
      auto s = psd_soft_impl(m, spec.tau);
      return {std::move(s.value), spec.tau * s.nuclear};
    }
    case ProxKind::sym_soft: {
      auto s = sym_soft_impl(m, spec.tau);
      return {std::move(s.value), spec.tau * s.nuclear};
    }
    case ProxKind::rank_r:
      return {best_rank_r(m, spec.rank), 0.0};
    case ProxKind::rank_r_psd:
      return {best_rank_r_psd(m, spec.rank), 0.0};
  }
  throw std::logic_error("apply_prox: unknown kind");
}

SymMatrix apply_prox(const ProxSpec& spec, const SymMatrix& m) {
  return apply_prox_with_penalty(spec, m).value;
}

double prox_penalty(const ProxSpec& spec, const SymMatrix& l) {
  spec.validate(l.dim());
  if (l.is_zero()) return 0.0;
  const auto eig = eig_sym(l);
  const double scale =
      std::max({1.0, std::abs(eig.values.front()), std::abs(eig.values.back())});
  const double floor = -1e-8 * scale;
  switch (spec.kind) {
    case ProxKind::psd_soft: {
      if (eig.values.back() < floor) return std::numeric_limits<double>::infinity();
      double s = 0.0;
      for (double v : eig.values) s += std::abs(v);
      return spec.tau * s;
    }
    case ProxKind::sym_soft: {
      double s = 0.0;
      for (double v : eig.values) s += std::abs(v);
      return spec.tau * s;
    }
    case ProxKind::rank_r:
    case ProxKind::rank_r_psd: {
      const double cutoff = 1e-8 * scale;
      std::size_t rank = 0;
      for (double v : eig.values) rank += std::abs(v) > cutoff ? 1 : 0;
      if (rank > spec.rank) return std::numeric_limits<double>::infinity();
      if (spec.kind == ProxKind::rank_r_psd && eig.values.back() < floor) {
        return std::numeric_limits<double>::infinity();
      }
      return 0.0;
    }
  }
  throw std::logic_error("prox_penalty: unknown kind");
}

}  // namespace hs
