#include <doctest.h>

#include <cmath>
#include <random>

#include "hetero_spectra/metrics.hpp"
#include "hetero_spectra/solvers.hpp"
#include "test_util.hpp"

using namespace hs;

namespace {

SymMatrix diag(std::vector<double> d) { return SymMatrix::diagonal(d); }

double lambda1_offdiag(const SymMatrix& sigma) { return eig_sym(poffdiag(sigma)).values.front(); }

}  // namespace

TEST_CASE("method tags round-trip") {
  for (Method m : kAllMethods) {
    CHECK(parse_method(method_tag(m)) == m);
    CHECK(!method_label(m).empty());
  }
  CHECK(method_label(Method::hpca_plus) == "HPCA+");
  CHECK(method_label(Method::rmtfa) == "rMTFA");
  CHECK(!parse_method("pca").has_value());
  CHECK(method_uses_tau(Method::rmtfa));
  CHECK(method_uses_tau(Method::si));
  CHECK(!method_uses_tau(Method::hpca));
}

TEST_CASE("StopRule validation") {
  CHECK_THROWS_AS((StopRule{0.0, 10}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((StopRule{1e-8, 0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(StopRule{}.validate());
}

TEST_CASE("alternating_solve on diagonal input stops after one iteration") {
  const auto sigma = diag({2, 1, 3});
  for (const auto& prox : {ProxSpec::psd_soft(0.5), ProxSpec::sym_soft(0.5), ProxSpec::rank_r(1),
                           ProxSpec::rank_r_psd(2)}) {
    const auto res = alternating_solve(sigma, prox, pdiag(sigma));
    CHECK(res.L.is_zero());
    CHECK(res.D == sigma);
    CHECK(res.trace.converged);
    CHECK(res.trace.iterations == 1);
  }
}

TEST_CASE("alternating_solve rejects a non-diagonal start") {
  const auto sigma = SymMatrix::from_rows({{2, 1}, {1, 2}});
  CHECK_THROWS_AS(alternating_solve(sigma, ProxSpec::psd_soft(0.1), sigma),
                  std::invalid_argument);
}

TEST_CASE("alternating_solve with psd_soft on a random PSD input descends and converges") {
  std::mt19937_64 gen(1);
  const auto sigma = testutil::random_psd(10, 10, gen);
  const auto res = alternating_solve(sigma, ProxSpec::psd_soft(0.3), pdiag(sigma));
  CHECK(res.trace.converged);
  CHECK(res.trace.iterations <= 1000);
  CHECK(res.trace.monotone());
  CHECK(res.trace.entries.size() == static_cast<std::size_t>(res.trace.iterations));
}

TEST_CASE("zero input returns zeros immediately") {
  const auto res = rmtfa(SymMatrix(4), 0.5);
  CHECK(res.decomposition.L.is_zero());
  CHECK(res.decomposition.D.is_zero());
  CHECK(res.trace.converged);
  CHECK(heteropca(SymMatrix(4), 2).L.is_zero());
  CHECK(heteropca_psd(SymMatrix(4), 2).L.is_zero());
  CHECK(deflated_heteropca(SymMatrix(4), 2).L.is_zero());
}

TEST_CASE("rmtfa threshold boundary on a 2x2") {
  const auto sigma = SymMatrix::from_rows({{2, 1}, {1, 2}});
  const auto res = rmtfa(sigma, 1.0);
  CHECK(res.decomposition.L.is_zero());
  CHECK(res.decomposition.D == diag({2, 2}));
  CHECK_THROWS_AS(rmtfa(sigma, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rmtfa(sigma, -1.0), std::invalid_argument);
}

TEST_CASE("rmtfa at or above lambda_1 of the off-diagonal part returns zero L") {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 5; ++t) {
    const auto sigma = testutil::random_factor_model(8, 2, gen);
    const double l1 = lambda1_offdiag(sigma);
    CHECK(rmtfa(sigma, l1 * (1 + 1e-12)).decomposition.L.is_zero());
    CHECK(!rmtfa(sigma, 0.5 * l1).decomposition.L.is_zero());
  }
}

TEST_CASE("rmtfa recovers a balanced rank-one factor as tau shrinks") {
  const std::vector<double> beta{1.0, 0.8, 1.2, 0.9, 1.1};
  REQUIRE(is_balanced(beta));
  SymMatrix l_star(5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i; j < 5; ++j) l_star.set(i, j, beta[i] * beta[j]);
  const auto sigma = l_star + diag({0.5, 0.7, 0.3, 0.6, 0.4});
  const auto res = rmtfa(sigma, 1e-6, StopRule{1e-12, 20000});
  CHECK((poffdiag(res.decomposition.L) - poffdiag(l_star)).frobenius_norm() < 1e-4);
}

TEST_CASE("rmtfa fixed point on a random 20x20 instance") {
  std::mt19937_64 gen(3);
  const auto sigma = testutil::random_psd(20, 20, gen);
  const auto res = rmtfa(sigma, 0.5);
  CHECK(res.trace.converged);
  CHECK(rmtfa_fixed_point_residual(sigma, res.decomposition.L, 0.5) < 1e-8);
  CHECK(res.decomposition.D == pdiag(res.decomposition.D));
  CHECK(eig_sym(res.decomposition.L).values.back() >= -1e-8);
}

TEST_CASE("rmtfa agrees with an independent projected-gradient solver") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 2; ++t) {
    const auto sigma = testutil::random_factor_model(5, 2, gen);
    const double tau = 0.3;
    const auto ours = rmtfa(sigma, tau, StopRule{1e-13, 100000});
    const auto expect = oracle::rmtfa_projected_gradient(testutil::to_dense(sigma), tau);
    CHECK(testutil::max_abs_diff(ours.decomposition.L, expect) < 1e-6);
  }
}

TEST_CASE("rmtfa is independent of the starting diagonal") {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 3; ++t) {
    const auto sigma = testutil::random_factor_model(12, 3, gen);
    const double tau = 0.2 * lambda1_offdiag(sigma);
    const StopRule tight{1e-13, 20000};
    const auto a = rmtfa(sigma, tau, tight);
    const auto b = rmtfa(sigma, tau, SymMatrix(12), tight);
    CHECK((a.decomposition.L - b.decomposition.L).frobenius_norm() < 1e-6);
  }
}

TEST_CASE("objective_F") {
  std::mt19937_64 gen(6);
  const auto sigma = testutil::random_psd(6, 6, gen);
  const double expect_zero_l = 0.5 * std::pow(poffdiag(sigma).frobenius_norm(), 2);
  CHECK(objective_F(sigma, SymMatrix(6), pdiag(sigma), 0.7) == doctest::Approx(expect_zero_l).epsilon(1e-14));
  CHECK(objective_F(sigma, sigma, SymMatrix(6), 0.0) == 0.0);

  // independent scalar re-evaluation
  const auto l = testutil::random_symmetric(6, gen);
  const auto d = pdiag(testutil::random_symmetric(6, gen));
  const double tau = 0.4;
  double fit = 0.0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const double e = sigma(i, j) - l(i, j) - d(i, j);
      fit += e * e;
    }
  double nuc = 0.0;
  for (double v : oracle::eig(testutil::to_dense(l)).values) nuc += std::abs(v);
  CHECK(std::abs(objective_F(sigma, l, d, tau) - (tau * nuc + 0.5 * fit)) < 1e-12 * (tau * nuc + 0.5 * fit));
}

TEST_CASE("soft_impute_diag") {
  CHECK(soft_impute_diag(diag({1, 2, 3}), 0.5).L.is_zero());
  std::mt19937_64 gen(7);
  const auto sigma = testutil::random_factor_model(10, 3, gen);
  const auto e = eig_sym(poffdiag(sigma)).values;
  const double top = std::max(std::abs(e.front()), std::abs(e.back()));
  CHECK(soft_impute_diag(sigma, top * (1 + 1e-12)).L.is_zero());
  const double tau = 0.2 * top;
  const auto res = soft_impute_diag(sigma, tau);
  CHECK(res.trace.converged);
  CHECK(res.trace.monotone());
  CHECK(soft_impute_fixed_point_residual(sigma, res.L, tau) < 1e-8);
}

TEST_CASE("heteropca basic identities") {
  const auto sigma_diag = diag({3, 1, 2});
  CHECK(heteropca(sigma_diag, 2).L.is_zero());
  CHECK(diag_deleted_pca(sigma_diag, 1).is_zero());

  std::mt19937_64 gen(8);
  const auto sigma = testutil::random_factor_model(8, 2, gen);
  CHECK(diag_deleted_pca(sigma, 2) == heteropca(sigma, 2, 1).L);
  const auto hollow = poffdiag(sigma);
  CHECK(diag_deleted_pca(hollow, 2) == best_rank_r(hollow, 2));
}

TEST_CASE("heteropca iterates match alternating_solve with rank_r") {
  std::mt19937_64 gen(9);
  const auto sigma = testutil::random_factor_model(10, 3, gen);
  std::vector<SymMatrix> hp, alt;
  (void)heteropca_from(poffdiag(sigma), 3, 30, [&](int, const SymMatrix& l) { hp.push_back(l); });
  (void)alternating_solve(sigma, ProxSpec::rank_r(3), pdiag(sigma), StopRule{1e-300, 30},
                          [&](int, const SymMatrix& l) { alt.push_back(l); });
  REQUIRE(hp.size() == 30);
  REQUIRE(alt.size() == 30);
  for (std::size_t k = 0; k < 30; ++k) CHECK((hp[k] - alt[k]).frobenius_norm() < 1e-10);
}

TEST_CASE("heteropca is stationary once it reaches a consistent low-rank point") {
  std::mt19937_64 gen(10);
  const auto l_star = testutil::random_psd(8, 2, gen);
  // G = L*: best_rank_r(L*) = L*, so pdiag is already consistent
  std::vector<SymMatrix> iterates;
  const auto res = heteropca_from(l_star, 2, 5, [&](int, const SymMatrix& l) { iterates.push_back(l); });
  for (const auto& l : iterates) CHECK((l - l_star).frobenius_norm() < 1e-10 * l_star.frobenius_norm());
  CHECK((res.G - l_star).frobenius_norm() < 1e-10 * l_star.frobenius_norm());
}

TEST_CASE("deflation rank rule") {
  // two tiers: 100, 100, 1, 1, 1 -> first stage stops after the top tier
  const std::vector<double> two_tier{100, 100, 1, 1, 1, 0.01};
  CHECK(deflation_next_rank(two_tier, 0, 5) == 2);
  CHECK(deflation_next_rank(two_tier, 2, 5) == 5);
  // single tier within ratio 4 with a clear gap at r
  const std::vector<double> flat{4, 3, 2, 1.5, 1, 0.1};
  CHECK(deflation_next_rank(flat, 0, 5) == 5);
  // no admissible candidate -> r
  const std::vector<double> steep{1000, 100, 10, 1, 0.1};
  CHECK(deflation_next_rank(steep, 0, 1) == 1);
  // r = p uses sigma_{p+1} = 0
  const std::vector<double> full{3, 2, 1};
  CHECK(deflation_next_rank(full, 0, 3) == 3);
}

TEST_CASE("deflated heteropca with r = 1 is plain heteropca") {
  std::mt19937_64 gen(11);
  const auto sigma = testutil::random_factor_model(9, 1, gen);
  const auto a = deflated_heteropca(sigma, 1);
  CHECK(a.stage_ranks == std::vector<std::size_t>{1});
  CHECK((a.L - heteropca(sigma, 1).L).frobenius_norm() == 0.0);
}

TEST_CASE("deflated heteropca stages on a two-tier spectrum") {
  // L* with eigenvalues 100, 100, 1, 1, 1 on a random basis, no noise
  std::mt19937_64 gen(12);
  const std::size_t p = 30;
  const auto eig = eig_sym(testutil::random_symmetric(p, gen));
  std::vector<double> w(p, 0.0);
  w[0] = w[1] = 100.0;
  w[2] = w[3] = w[4] = 1.0;
  const auto l_star = spectral_compose(eig, w);
  const auto res = deflated_heteropca(l_star + SymMatrix::identity(p), 5);
  REQUIRE(!res.stage_ranks.empty());
  CHECK(res.stage_ranks.front() == 2);
  CHECK(res.stage_ranks.back() == 5);
}

TEST_CASE("heteropca_psd keeps L PSD and stays rank r") {
  std::mt19937_64 gen(13);
  const auto sigma = testutil::random_factor_model(10, 3, gen);
  std::vector<SymMatrix> iterates;
  const auto res = heteropca_psd(sigma, 3);
  CHECK(res.trace.iterations == kDefaultHeteroPcaIterations);
  CHECK(res.trace.monotone());
  const auto ev = eig_sym(res.L).values;
  CHECK(ev.back() >= -1e-10 * ev.front());
  CHECK(numerical_rank(res.L) <= 3);
  CHECK(heteropca_psd(diag({1, 2, 3}), 2).L.is_zero());
}

TEST_CASE("heteropca_psd on noiseless low-rank input approaches a self-consistent point") {
  std::mt19937_64 gen(14);
  const auto l_star = testutil::random_psd(12, 2, gen);
  const auto res = heteropca_psd(l_star, 2, 200);
  // fixed point: L = best_rank_r_psd(poffdiag(Σ) + pdiag(L))
  const auto again = best_rank_r_psd(poffdiag(l_star) + pdiag(res.L), 2);
  CHECK((again - res.L).frobenius_norm() < 1e-6 * l_star.frobenius_norm());
}

TEST_CASE("pca_baseline") {
  const auto b = pca_baseline(diag({3, 2, 1}), 2);
  const Matrix expect = Matrix::from_rows({{1, 0}, {0, 1}, {0, 0}});
  CHECK(sin_theta(b, OrthonormalBasis(expect)) < 1e-14);
  const std::vector<double> beta{1, 2, 2};
  SymMatrix s(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) s.set(i, j, beta[i] * beta[j]);
  const auto u = pca_baseline(s, 1);
  CHECK(std::abs(std::abs(u.columns()(1, 0)) - 2.0 / 3.0) < 1e-12);
}

TEST_CASE("extract_subspace flags rank deficiency and completes the basis") {
  SymMatrix l(4);
  l.set(0, 0, 2.0);
  const auto est = extract_subspace(l, 2);
  CHECK(est.rank_deficient);
  CHECK(est.numerical_rank == 1);
  CHECK(est.basis.rank() == 2);

  std::mt19937_64 gen(15);
  const auto m = testutil::random_psd(7, 3, gen);
  const auto e = extract_subspace(m, 3);
  CHECK(!e.rank_deficient);
  const Matrix g = multiply(e.basis.columns().transpose(), e.basis.columns());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(g(i, j) - (i == j)) < 1e-10);
  CHECK(sin_theta(e.basis, eig_sym(m).vectors.leading(3)) < 1e-10);
}

TEST_CASE("extract_subspace orders by signed value or by magnitude") {
  const auto l = diag({1, -5, 3});
  const auto by_value = extract_subspace(l, 1).basis;
  const auto by_mag = extract_subspace(l, 1, SubspaceOrder::magnitude).basis;
  CHECK(std::abs(by_value.columns()(2, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(by_mag.columns()(1, 0)) == doctest::Approx(1.0));
}

TEST_CASE("monotone violation counting") {
  SolverTrace t;
  t.entries = {{1, 5.0, 0, 0}, {2, 4.0, 0, 0}, {3, 4.0 + 1e-14, 0, 0}, {4, 4.5, 0, 0}};
  CHECK(t.monotone_violations() == 1);
}
