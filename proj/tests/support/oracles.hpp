#pragma once

// Slow, independent reference implementations used only by tests. Nothing
// here calls into the library's eigensolver or shrinkage code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

struct Dense {
  std::size_t n = 0;
  std::vector<double> a;  // row-major n x n

  Dense() = default;
  explicit Dense(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

inline Dense operator-(const Dense& x, const Dense& y) {
  Dense out(x.n);
  for (std::size_t k = 0; k < x.a.size(); ++k) out.a[k] = x.a[k] - y.a[k];
  return out;
}

inline Dense operator+(const Dense& x, const Dense& y) {
  Dense out(x.n);
  for (std::size_t k = 0; k < x.a.size(); ++k) out.a[k] = x.a[k] + y.a[k];
  return out;
}

inline double fro(const Dense& x) {
  double s = 0.0;
  for (double v : x.a) s += v * v;
  return std::sqrt(s);
}

inline Dense diag_part(const Dense& x) {
  Dense out(x.n);
  for (std::size_t i = 0; i < x.n; ++i) out(i, i) = x(i, i);
  return out;
}

inline Dense offdiag_part(const Dense& x) {
  Dense out = x;
  for (std::size_t i = 0; i < x.n; ++i) out(i, i) = 0.0;
  return out;
}

struct Eig {
  std::vector<double> values;               // descending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
};

/// Classical (largest-pivot) Jacobi, deliberately different from the
/// library's cyclic sweep.
inline Eig eig(const Dense& m) {
  const std::size_t n = m.n;
  Dense a = m;
  Dense v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  const double scale = std::max(fro(m), 1e-300);
  for (int iter = 0; iter < 200000; ++iter) {
    std::size_t p = 0, q = 1;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a(i, j)) > best) {
          best = std::abs(a(i, j));
          p = i;
          q = j;
        }
    if (best <= 1e-15 * scale || n < 2) break;
    const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t k = 0; k < n; ++k) {
      const double akp = a(k, p), akq = a(k, q);
      a(k, p) = c * akp - s * akq;
      a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double apk = a(p, k), aqk = a(q, k);
      a(p, k) = c * apk - s * aqk;
      a(q, k) = s * apk + c * aqk;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double vkp = v(k, p), vkq = v(k, q);
      v(k, p) = c * vkp - s * vkq;
      v(k, q) = s * vkp + c * vkq;
    }
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  Eig out;
  for (std::size_t k : idx) {
    out.values.push_back(a(k, k));
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

inline Dense compose(const Eig& e, const std::vector<double>& w) {
  const std::size_t n = e.vectors.empty() ? 0 : e.vectors[0].size();
  Dense out(n);
  for (std::size_t k = 0; k < w.size(); ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += w[k] * e.vectors[k][i] * e.vectors[k][j];
  return out;
}

inline Dense project_psd(const Dense& m) {
  Eig e = eig(m);
  for (double& v : e.values) v = std::max(v, 0.0);
  return compose(e, e.values);
}

/// Eigenvalues of a 2x2 or 3x3 symmetric matrix from the characteristic
/// polynomial, descending.
inline std::vector<double> charpoly_eigenvalues(const Dense& m) {
  if (m.n == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return {tr / 2.0 + disc, tr / 2.0 - disc};
  }
  // trigonometric solution of the depressed cubic
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  const double q = (m(0, 0) + m(1, 1) + m(2, 2)) / 3.0;
  const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                    (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  Dense b(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = (m(i, j) - (i == j ? q : 0.0)) / p;
  const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double pi = std::acos(-1.0);
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return {e1, e2, e3};
}

/// argmin_X tau*tr(X) + ½‖X − M‖² over PSD X by projected gradient.
inline Dense prox_psd_nuclear(const Dense& m, double tau, int iters = 100000) {
  Dense x(m.n);
  for (int it = 0; it < iters; ++it) {
    Dense g = x - m;
    for (std::size_t i = 0; i < m.n; ++i) g(i, i) += tau;
    Dense step = x;
    for (std::size_t k = 0; k < x.a.size(); ++k) step.a[k] -= 0.5 * g.a[k];
    Dense next = project_psd(step);
    const double change = fro(next - x);
    x = std::move(next);
    if (change < 1e-15) break;
  }
  return x;
}

/// argmin_X tau*‖X‖_* + ½‖X − M‖² with X = P − N, P, N PSD (the nuclear
/// norm is the minimum of tr P + tr N over such splits).
inline Dense prox_nuclear(const Dense& m, double tau, int iters = 100000) {
  Dense p(m.n), n(m.n);
  for (int it = 0; it < iters; ++it) {
    Dense r = (p - n) - m;  // gradient of the fit term wrt P; −r wrt N
    Dense sp = p, sn = n;
    for (std::size_t k = 0; k < r.a.size(); ++k) {
      sp.a[k] -= 0.5 * r.a[k];
      sn.a[k] += 0.5 * r.a[k];
    }
    for (std::size_t i = 0; i < m.n; ++i) {
      sp(i, i) -= 0.5 * tau;
      sn(i, i) -= 0.5 * tau;
    }
    Dense np = project_psd(sp), nn = project_psd(sn);
    const double change = fro(np - p) + fro(nn - n);
    p = std::move(np);
    n = std::move(nn);
    if (change < 1e-15) break;
  }
  return p - n;
}

/// min over rank-≤r PSD X of ½‖X − M‖², by gradient descent on X = FFᵀ with
/// random restarts. Returns the best objective found.
inline double rank_r_psd_objective(const Dense& m, std::size_t r, unsigned seed,
                                   int restarts = 8, int iters = 20000) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t n = m.n;
  double scale = 1.0;
  for (double v : m.a) scale = std::max(scale, std::abs(v));
  const double step = 0.05 / scale;
  double best = INFINITY;
  for (int rs = 0; rs < restarts; ++rs) {
    std::vector<double> f(n * r);
    for (double& v : f) v = nd(gen) * std::sqrt(scale / static_cast<double>(n));
    auto residual = [&] {
      Dense x(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          double acc = 0.0;
          for (std::size_t c = 0; c < r; ++c) acc += f[i * r + c] * f[j * r + c];
          x(i, j) = acc - m(i, j);
        }
      return x;
    };
    for (int it = 0; it < iters; ++it) {
      const Dense e = residual();
      std::vector<double> g(n * r, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < r; ++c) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += e(i, j) * f[j * r + c];
          g[i * r + c] = 2.0 * acc;
        }
      for (std::size_t k = 0; k < f.size(); ++k) f[k] -= step * g[k];
    }
    const double obj = 0.5 * fro(residual()) * fro(residual());
    best = std::min(best, obj);
  }
  return best;
}

/// Principal-axis factoring: L = best rank-r (by |λ|) of Σ − D, D = pdiag(Σ − L),
/// from D = pdiag(Σ). Returns L after each of `steps` iterations.
inline std::vector<Dense> principal_axis_iterates(const Dense& sigma, std::size_t r, int steps) {
  std::vector<Dense> out;
  Dense d = diag_part(sigma);
  for (int k = 0; k < steps; ++k) {
    Eig e = eig(sigma - d);
    std::vector<std::size_t> idx(e.values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return std::abs(e.values[x]) > std::abs(e.values[y]);
    });
    std::vector<double> w(e.values.size(), 0.0);
    for (std::size_t c = 0; c < r; ++c) w[idx[c]] = e.values[idx[c]];
    Dense l = compose(e, w);
    d = diag_part(sigma - l);
    out.push_back(std::move(l));
  }
  return out;
}

/// Relaxed MTFA by projected gradient on L alone (D eliminated in closed
/// form): minimize tau*tr(L) + ½‖poffdiag(Σ − L)‖² over PSD L.
inline Dense rmtfa_projected_gradient(const Dense& sigma, double tau, int iters = 100000) {
  Dense l(sigma.n);
  for (int it = 0; it < iters; ++it) {
    Dense g = offdiag_part(l - sigma);
    for (std::size_t i = 0; i < sigma.n; ++i) g(i, i) += tau;
    Dense step = l;
    for (std::size_t k = 0; k < l.a.size(); ++k) step.a[k] -= 0.5 * g.a[k];
    Dense next = project_psd(step);
    const double change = fro(next - l);
    l = std::move(next);
    if (change < 1e-14) break;
  }
  return l;
}

/// Largest singular value via the eigen oracle on the symmetric input.
inline double spectral_norm(const Dense& m) {
  const Eig e = eig(m);
  double best = 0.0;
  for (double v : e.values) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace oracle
