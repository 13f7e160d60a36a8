#pragma once

// Synthetic heteroskedastic low-rank models and the Monte-Carlo runner that
// compares decomposition methods on them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hetero_spectra/matcore.hpp"
#include "hetero_spectra/solvers.hpp"

namespace hs {

/// Seedable generator: std::mt19937_64 keyed by splitmix64(seed). Streams are
/// reproducible within one standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  double normal();
  double uniform(double lo, double hi);
  bool bernoulli(double probability);

  static std::uint64_t mix(std::uint64_t seed);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct ModelParams {
  std::size_t n = 200;
  std::size_t p = 50;
  std::size_t r = 5;
  double kappa = 3.0;
  double omega = 1.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument; r = 1 with κ > 1 is rejected because the
  /// spectrum σ_{r−i} = κ^{i/(r−1)} σ_r is undefined there.
  void validate() const;
  /// r above the Ledermann bound φ(p): allowed, but worth a warning.
  bool exceeds_ledermann_bound() const;
};

/// σ_r = (np)^{1/4} + p^{1/2}
double signal_strength(std::size_t n, std::size_t p);

/// σ_1 ≥ … ≥ σ_r with σ_{r−i} = κ^{i/(r−1)} σ_r.
std::vector<double> signal_spectrum(const ModelParams& params);

struct Signal {
  Matrix M;  // p x n
  OrthonormalBasis U;
  std::vector<double> singular_values;
};

/// U, V from the leading singular vectors of an i.i.d. Gaussian p x n draw;
/// M = U diag(σ) Vᵀ.
Signal gen_signal(const ModelParams& params, Rng& rng);

struct Noise {
  Matrix Z;                        // p x n
  std::vector<double> row_scales;  // ω_i ~ U[0, ω]
};

Noise gen_noise(const ModelParams& params, Rng& rng);

struct Instance {
  Matrix M;
  Matrix Z;
  Matrix Y;
  SymMatrix sigma;  // Y Yᵀ
  OrthonormalBasis U_true;
  std::vector<double> singular_values;
};

/// Signal then noise, both drawn from Rng(params.seed).
Instance gen_instance(const ModelParams& params);

struct Masked {
  Matrix values;                     // missing entries zeroed
  std::vector<std::uint8_t> missing;  // row-major, 1 = missing
};

/// Each entry goes missing independently with probability θ ∈ (0, 1).
Masked gen_masked(const Matrix& y, double theta, Rng& rng);

// ------------------------------------------------------------ experiments

enum class VaryParam { n, p, r, kappa, omega };

std::string_view vary_param_name(VaryParam v);
std::optional<VaryParam> parse_vary_param(std::string_view name);

struct TauRule {
  std::optional<double> explicit_tau;  // empty: τ = σ_r² / 16

  double resolve(double sigma_r) const;
};

struct ExperimentConfig {
  ModelParams baseline;
  VaryParam vary = VaryParam::kappa;
  std::vector<double> values;
  std::vector<Method> methods;
  int replicates = 10;
  std::uint64_t seed = 0;
  TauRule tau_rule;
  bool record_timing = false;

  /// Baseline with the varied field set and seed = base seed + replicate.
  ModelParams params_for(double value, int replicate) const;
  void validate() const;
};

struct ResultRow {
  Method method = Method::svd;
  VaryParam param = VaryParam::kappa;
  double value = 0.0;
  std::size_t value_index = 0;
  int replicate = 0;
  double sin_theta = 0.0;
  std::optional<double> wall_ms;
  std::string status = "ok";
};

struct MethodRun {
  std::optional<OrthonormalBasis> estimate;
  std::string status = "ok";
};

/// Runs one method on Σ and extracts its rank-r subspace estimate.
/// Failures are reported in `status`, not thrown.
MethodRun run_method(Method method, const SymMatrix& sigma, std::size_t r, double tau);

enum class Schedule { serial, parallel };

/// Every (value, replicate) draws one instance shared by all methods. Rows
/// come back ordered by value, replicate, then method order in the config,
/// whatever the schedule.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      Schedule schedule = Schedule::serial, int jobs = 1);

}  // namespace hs
