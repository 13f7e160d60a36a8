#include <doctest.h>

#include <cmath>
#include <random>

#include "hetero_spectra/shrinkage.hpp"
#include "test_util.hpp"

using namespace hs;

namespace {
SymMatrix diag(std::vector<double> d) { return SymMatrix::diagonal(d); }
}  // namespace

TEST_CASE("soft_threshold_psd on diagonal inputs") {
  CHECK(soft_threshold_psd(diag({3, 1, -2}), 1.0) == diag({2, 0, 0}));
  std::mt19937_64 gen(1);
  const auto m = testutil::random_symmetric(5, gen);
  const double top = eig_sym(m).values.front();
  CHECK(soft_threshold_psd(m, top).is_zero());
  CHECK(soft_threshold_psd(m, top + 1.0).is_zero());
  CHECK_THROWS_AS(soft_threshold_psd(m, -0.1), std::invalid_argument);
}

TEST_CASE("soft_threshold_psd matches the projected-gradient oracle") {
  std::mt19937_64 gen(21);
  for (int t = 0; t < 3; ++t) {
    const auto m = testutil::random_symmetric(3, gen);
    const auto expect = oracle::prox_psd_nuclear(testutil::to_dense(m), 0.5);
    CHECK(testutil::max_abs_diff(soft_threshold_psd(m, 0.5), expect) < 1e-6);
  }
}

TEST_CASE("soft_threshold_sym on diagonal inputs and identity at zero") {
  CHECK(soft_threshold_sym(diag({3, -2}), 1.0) == diag({2, -1}));
  std::mt19937_64 gen(2);
  const auto m = testutil::random_symmetric(6, gen);
  CHECK((soft_threshold_sym(m, 0.0) - m).frobenius_norm() < 1e-12);
  CHECK_THROWS_AS(soft_threshold_sym(m, -1.0), std::invalid_argument);
}

TEST_CASE("soft_threshold_sym matches the split projected-gradient oracle") {
  std::mt19937_64 gen(22);
  for (int t = 0; t < 3; ++t) {
    const auto m = testutil::random_symmetric(3, gen);
    const auto expect = oracle::prox_nuclear(testutil::to_dense(m), 0.7);
    CHECK(testutil::max_abs_diff(soft_threshold_sym(m, 0.7), expect) < 1e-6);
  }
}

TEST_CASE("best_rank_r") {
  CHECK(best_rank_r(diag({5, 3, 1}), 2) == diag({5, 3, 0}));
  CHECK(best_rank_r(diag({1, -4, 2}), 1) == diag({0, -4, 0}));
  std::mt19937_64 gen(3);
  const auto m = testutil::random_symmetric(4, gen);
  CHECK((best_rank_r(m, 4) - m).frobenius_norm() < 1e-12);
  CHECK_THROWS_AS(best_rank_r(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(best_rank_r(m, 5), std::invalid_argument);
}

TEST_CASE("best_rank_r residual equals the dropped eigenvalues") {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 20; ++t) {
    const auto m = testutil::random_symmetric(4, gen);
    auto lam = oracle::eig(testutil::to_dense(m)).values;
    std::sort(lam.begin(), lam.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    const double expect = std::sqrt(lam[2] * lam[2] + lam[3] * lam[3]);
    CHECK(std::abs((m - best_rank_r(m, 2)).frobenius_norm() - expect) < 1e-10);
  }
}

TEST_CASE("best_rank_r_psd") {
  CHECK(best_rank_r_psd(diag({3, -5, 1}), 2) == diag({3, 0, 1}));
  std::mt19937_64 gen(5);
  const auto psd = testutil::random_psd(5, 5, gen);
  CHECK((best_rank_r_psd(psd, 5) - psd).frobenius_norm() < 1e-10 * psd.frobenius_norm());
  CHECK_THROWS_AS(best_rank_r_psd(psd, 6), std::invalid_argument);
}

TEST_CASE("best_rank_r_psd is optimal against factored gradient descent") {
  std::mt19937_64 gen(6);
  for (unsigned t = 0; t < 3; ++t) {
    const auto m = testutil::random_symmetric(4, gen);
    const auto x = best_rank_r_psd(m, 2);
    const double ours = 0.5 * std::pow((m - x).frobenius_norm(), 2);
    const double oracle_best = oracle::rank_r_psd_objective(testutil::to_dense(m), 2, 100 + t);
    CHECK(ours <= oracle_best + 1e-9);
    CHECK(std::abs(ours - oracle_best) < 1e-5);
  }
}

TEST_CASE("apply_prox dispatches") {
  std::mt19937_64 gen(7);
  const auto m = testutil::random_symmetric(5, gen);
  CHECK(apply_prox(ProxSpec::psd_soft(0.3), m) == soft_threshold_psd(m, 0.3));
  CHECK(apply_prox(ProxSpec::sym_soft(0.3), m) == soft_threshold_sym(m, 0.3));
  CHECK(apply_prox(ProxSpec::rank_r(2), m) == best_rank_r(m, 2));
  CHECK(apply_prox(ProxSpec::rank_r_psd(2), m) == best_rank_r_psd(m, 2));
  CHECK((apply_prox(ProxSpec::sym_soft(0.0), m) - m).frobenius_norm() < 1e-12);
  CHECK_THROWS_AS(apply_prox(ProxSpec::rank_r(6), m), std::invalid_argument);
}

TEST_CASE("prox penalty accompanies the prox value") {
  std::mt19937_64 gen(8);
  const auto m = testutil::random_symmetric(5, gen);
  const auto out = apply_prox_with_penalty(ProxSpec::psd_soft(0.4), m);
  CHECK(out.penalty == doctest::Approx(0.4 * nuclear_norm_sym(out.value)).epsilon(1e-12));
  CHECK(prox_penalty(ProxSpec::psd_soft(0.4), m * 0.0) == 0.0);
  CHECK(std::isinf(prox_penalty(ProxSpec::psd_soft(0.4), diag({1, -1, 0, 0, 0}))));
  CHECK(std::isinf(prox_penalty(ProxSpec::rank_r(1), diag({1, 1, 0, 0, 0}))));
  CHECK(prox_penalty(ProxSpec::rank_r(2), diag({1, 1, 0, 0, 0})) == 0.0);
}

TEST_CASE("psd soft-thresholding is nonexpansive") {
  std::mt19937_64 gen(9);
  for (int t = 0; t < 50; ++t) {
    const auto a = testutil::random_symmetric(6, gen);
    const auto b = testutil::random_symmetric(6, gen);
    const double lhs = (soft_threshold_psd(a, 0.3) - soft_threshold_psd(b, 0.3)).frobenius_norm();
    CHECK(lhs <= (a - b).frobenius_norm() + 1e-12);
  }
}

TEST_CASE("psd soft-thresholding of a well-conditioned PSD matrix shifts by tau") {
  std::mt19937_64 gen(10);
  for (int t = 0; t < 10; ++t) {
    auto m = testutil::random_psd(5, 5, gen);
    m += SymMatrix::identity(5) * 1.0;
    const double tau = 0.5;  // below λ_min ≥ 1
    const auto expect = m - SymMatrix::identity(5) * tau;
    CHECK((soft_threshold_psd(m, tau) - expect).frobenius_norm() < 1e-10 * m.frobenius_norm());
  }
}

TEST_CASE("nuclear norm of the shrunk matrix is nonincreasing in tau") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 10; ++t) {
    const auto m = testutil::random_symmetric(6, gen, 2.0);
    double prev = INFINITY;
    for (double tau : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0}) {
      const double nn = nuclear_norm_sym(soft_threshold_psd(m, tau));
      CHECK(nn <= prev + 1e-12);
      prev = nn;
    }
  }
}

TEST_CASE("ProxSpec validation and description") {
  CHECK_THROWS_AS(ProxSpec::psd_soft(-1.0).validate(3), std::invalid_argument);
  CHECK_THROWS_AS(ProxSpec::rank_r(0).validate(3), std::invalid_argument);
  CHECK_THROWS_AS(ProxSpec::rank_r_psd(4).validate(3), std::invalid_argument);
  CHECK_NOTHROW(ProxSpec::rank_r(3).validate(3));
  CHECK(!ProxSpec::sym_soft(0.5).describe().empty());
}
