#include "hetero_spectra/simlab.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hetero_spectra/kernels.hpp"
#include "hetero_spectra/metrics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hs {

// ------------------------------------------------------------------ Rng

std::uint64_t Rng::mix(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(mix(seed)) {}

double Rng::normal() { return normal_(engine_); }

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

bool Rng::bernoulli(double probability) { return uniform(0.0, 1.0) < probability; }

// --------------------------------------------------------------- models

void ModelParams::validate() const {
  std::ostringstream msg;
  if (n < 1 || p < 1) msg << "n and p must be positive; ";
  if (r < 1 || r > std::min(n, p)) msg << "r must lie in [1, min(n, p)]; ";
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) msg << "kappa must be >= 1; ";
  if (!(omega > 0.0) || !std::isfinite(omega)) msg << "omega must be > 0; ";
  if (r == 1 && kappa > 1.0) msg << "r = 1 requires kappa = 1 (spectrum exponent i/(r-1) undefined); ";
  const std::string text = msg.str();
  if (!text.empty()) throw std::invalid_argument("ModelParams: " + text.substr(0, text.size() - 2));
}

bool ModelParams::exceeds_ledermann_bound() const {
  return static_cast<double>(r) > ledermann_bound(p);
}

double signal_strength(std::size_t n, std::size_t p) {
  const double np = static_cast<double>(n) * static_cast<double>(p);
  return std::pow(np, 0.25) + std::sqrt(static_cast<double>(p));
}

std::vector<double> signal_spectrum(const ModelParams& params) {
  params.validate();
  const double sigma_r = signal_strength(params.n, params.p);
  std::vector<double> s(params.r);
  const std::size_t r = params.r;
  for (std::size_t i = 0; i < r; ++i) {
    // s[r-1-i] = σ_{r−i}
    const double expo = r == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(r - 1);
    s[r - 1 - i] = i == 0 ? sigma_r : std::pow(params.kappa, expo) * sigma_r;
  }
  return s;
}

Signal gen_signal(const ModelParams& params, Rng& rng) {
  params.validate();
  const std::size_t p = params.p;
  const std::size_t n = params.n;
  const std::size_t r = params.r;

  Matrix g(p, n);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.normal();

  // Left singular vectors of G are eigenvectors of GGᵀ; right ones follow
  // as Gᵀu/s, re-orthonormalized against rounding.
  const auto eig = eig_sym(kernels::gram(g));
  OrthonormalBasis u = eig.vectors.leading(r);

  Matrix v(n, r);
  for (std::size_t c = 0; c < r; ++c) {
    const double s = std::sqrt(std::max(eig.values[c], 0.0));
    if (!(s > 0.0)) throw std::runtime_error("gen_signal: degenerate Gaussian draw");
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < p; ++i) acc += g(i, j) * u.columns()(i, c);
      v(j, c) = acc / s;
    }
    for (std::size_t prev = 0; prev < c; ++prev) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += v(j, c) * v(j, prev);
      for (std::size_t j = 0; j < n; ++j) v(j, c) -= dot * v(j, prev);
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) norm += v(j, c) * v(j, c);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < n; ++j) v(j, c) /= norm;
  }

  std::vector<double> spectrum = signal_spectrum(params);
  Matrix us(p, r);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t c = 0; c < r; ++c) us(i, c) = u.columns()(i, c) * spectrum[c];
  Matrix m = multiply(us, v.transpose());
  return Signal{std::move(m), std::move(u), std::move(spectrum)};
}

Noise gen_noise(const ModelParams& params, Rng& rng) {
  params.validate();
  Noise out{Matrix(params.p, params.n), std::vector<double>(params.p)};
  for (std::size_t i = 0; i < params.p; ++i) out.row_scales[i] = rng.uniform(0.0, params.omega);
  for (std::size_t i = 0; i < params.p; ++i)
    for (std::size_t j = 0; j < params.n; ++j) out.Z(i, j) = out.row_scales[i] * rng.normal();
  return out;
}

Instance gen_instance(const ModelParams& params) {
  params.validate();
  Rng rng(params.seed);
  Signal signal = gen_signal(params, rng);
  Noise noise = gen_noise(params, rng);
  Matrix y = signal.M;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    auto yr = y.row(i);
    auto zr = noise.Z.row(i);
    for (std::size_t j = 0; j < yr.size(); ++j) yr[j] += zr[j];
  }
  SymMatrix sigma = kernels::gram(y);
  return Instance{std::move(signal.M), std::move(noise.Z), std::move(y), std::move(sigma),
                  std::move(signal.U), std::move(signal.singular_values)};
}

Masked gen_masked(const Matrix& y, double theta, Rng& rng) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("gen_masked: theta must lie in (0, 1)");
  }
  Masked out{y, std::vector<std::uint8_t>(y.rows() * y.cols(), 0)};
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j)
      if (rng.bernoulli(theta)) {
        out.missing[i * y.cols() + j] = 1;
        out.values(i, j) = 0.0;
      }
  return out;
}

// ---------------------------------------------------------- experiments

std::string_view vary_param_name(VaryParam v) {
  switch (v) {
    case VaryParam::n: return "n";
    case VaryParam::p: return "p";
    case VaryParam::r: return "r";
    case VaryParam::kappa: return "kappa";
    case VaryParam::omega: return "omega";
  }
  return "?";
}

std::optional<VaryParam> parse_vary_param(std::string_view name) {
  for (VaryParam v : {VaryParam::n, VaryParam::p, VaryParam::r, VaryParam::kappa, VaryParam::omega})
    if (vary_param_name(v) == name) return v;
  return std::nullopt;
}

double TauRule::resolve(double sigma_r) const {
  return explicit_tau ? *explicit_tau : sigma_r * sigma_r / 16.0;
}

ModelParams ExperimentConfig::params_for(double value, int replicate) const {
  ModelParams params = baseline;
  auto as_count = [&](double v) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
      throw std::invalid_argument("ExperimentConfig: value " + std::to_string(v) + " for '" +
                                  std::string(vary_param_name(vary)) +
                                  "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  switch (vary) {
    case VaryParam::n: params.n = as_count(value); break;
    case VaryParam::p: params.p = as_count(value); break;
    case VaryParam::r: params.r = as_count(value); break;
    case VaryParam::kappa: params.kappa = value; break;
    case VaryParam::omega: params.omega = value; break;
  }
  params.seed = seed + static_cast<std::uint64_t>(replicate);
  return params;
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw std::invalid_argument("ExperimentConfig: methods must be nonempty");
  if (values.empty()) throw std::invalid_argument("ExperimentConfig: vary.values must be nonempty");
  if (replicates < 1) throw std::invalid_argument("ExperimentConfig: replicates must be >= 1");
  if (tau_rule.explicit_tau && !(*tau_rule.explicit_tau > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: explicit tau must be positive");
  }
  for (double v : values) params_for(v, 0).validate();
}

MethodRun run_method(Method method, const SymMatrix& sigma, std::size_t r, double tau) {
  MethodRun run;
  try {
    std::optional<SubspaceEstimate> est;
    bool converged = true;
    switch (method) {
      case Method::svd:
        run.estimate = pca_baseline(sigma, r);
        break;
      case Method::dd:
        est = extract_subspace(diag_deleted_pca(sigma, r), r);
        break;
      case Method::hpca:
        est = extract_subspace(heteropca(sigma, r).L, r);
        break;
      case Method::dhpca:
        est = extract_subspace(deflated_heteropca(sigma, r).L, r);
        break;
      case Method::hpca_plus:
        est = extract_subspace(heteropca_psd(sigma, r).L, r);
        break;
      case Method::rmtfa: {
        auto res = rmtfa(sigma, tau);
        converged = res.trace.converged;
        est = extract_subspace(res.decomposition, r);
        break;
      }
      case Method::si: {
        auto res = soft_impute_diag(sigma, tau);
        converged = res.trace.converged;
        est = extract_subspace(res.L, r);
        break;
      }
    }
    std::string status;
    if (!converged) status = "not_converged";
    if (est) {
      if (est->rank_deficient) status += status.empty() ? "rank_deficient" : "+rank_deficient";
      run.estimate = std::move(est->basis);
    }
    run.status = status.empty() ? "ok" : status;
  } catch (const std::exception& e) {
    run.estimate.reset();
    run.status = std::string("error: ") + e.what();
  }
  return run;
}

namespace {

std::vector<ResultRow> run_task(const ExperimentConfig& config, std::size_t value_index,
                                int replicate) {
  const double value = config.values[value_index];
  std::vector<ResultRow> rows;
  rows.reserve(config.methods.size());
  auto base_row = [&](Method m) {
    ResultRow row;
    row.method = m;
    row.param = config.vary;
    row.value = value;
    row.value_index = value_index;
    row.replicate = replicate;
    return row;
  };

  std::optional<Instance> inst;
  std::string failure;
  try {
    inst = gen_instance(config.params_for(value, replicate));
  } catch (const std::exception& e) {
    failure = std::string("error: ") + e.what();
  }

  for (Method m : config.methods) {
    ResultRow row = base_row(m);
    if (!inst) {
      row.sin_theta = std::numeric_limits<double>::quiet_NaN();
      row.status = failure;
      rows.push_back(std::move(row));
      continue;
    }
    const double tau = config.tau_rule.resolve(inst->singular_values.back());
    const auto start = std::chrono::steady_clock::now();
    MethodRun run = run_method(m, inst->sigma, inst->U_true.rank(), tau);
    const auto stop = std::chrono::steady_clock::now();
    row.sin_theta = run.estimate ? sin_theta(inst->U_true, *run.estimate)
                                 : std::numeric_limits<double>::quiet_NaN();
    if (config.record_timing) {
      row.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    }
    row.status = std::move(run.status);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, Schedule schedule, int jobs) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.replicates);
  const std::size_t tasks = config.values.size() * reps;
  std::vector<std::vector<ResultRow>> slots(tasks);

  auto body = [&](std::size_t t) { slots[t] = run_task(config, t / reps, static_cast<int>(t % reps)); };

  if (schedule == Schedule::parallel) {
    const long long count = static_cast<long long>(tasks);
#ifdef _OPENMP
    const int nt = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
#else
    (void)jobs;
#endif
    for (long long t = 0; t < count; ++t) body(static_cast<std::size_t>(t));
  } else {
    for (std::size_t t = 0; t < tasks; ++t) body(t);
  }

  std::vector<ResultRow> rows;
  rows.reserve(tasks * config.methods.size());
  for (auto& slot : slots)
    for (auto& row : slot) rows.push_back(std::move(row));
  return rows;
}

}  // namespace hs
