#include <doctest.h>

#include <rcn/dataset.hpp>
#include <rcn/density.hpp>
#include <rcn/noise_rates.hpp>

#include <cmath>
#include <random>

using namespace rcn;

namespace {

//! Clean posterior on a 1-D grid in [0, 1]: 0 at the left end, 1 at the right.
Vector<double>
clean_grid_posterior(Index n)
{
  Vector<double> p(n);
  for (Index i = 0; i < n; ++i)
    p(i) = static_cast<double>(i) / static_cast<double>(n - 1);
  return p;
}

} // namespace

TEST_CASE("rates from an exact posterior")
{
  const Vector<double> clean = clean_grid_posterior(21);
  SUBCASE("anchor points recover the flip rates")
  {
    const NoisePair truth{ 0.1, 0.3 };
    const Vector<double> noisy = noisy_posterior(clean, truth);
    const auto est = estimate_rates(noisy);
    CHECK(est.rho_minus_hat == 0.3);
    CHECK(est.rho_plus_hat == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(est.provenance == RateEstimate::Provenance::min_posterior);
    CHECK(est.warnings.empty());

    const auto cond = CondProbEstimate<double>::given(noisy, 1e-3);
    const auto via_cond = estimate_rates(cond);
    CHECK(via_cond.rho_minus_hat == 0.3);
  }
  SUBCASE("separable clean data sits at the clamp floor")
  {
    Vector<double> step(10);
    step << 0, 0, 0, 0, 0, 1, 1, 1, 1, 1;
    const double eps = 1e-3;
    const auto est = estimate_rates(CondProbEstimate<double>::given(step, eps));
    CHECK(est.rho_plus_hat <= eps + 1e-15);
    CHECK(est.rho_minus_hat <= eps + 1e-15);
  }
  SUBCASE("many random rate pairs")
  {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 0.49);
    for (int k = 0; k < 100; ++k) {
      const NoisePair truth{ u(gen), u(gen) };
      const auto cond =
        CondProbEstimate<double>::given(noisy_posterior(clean, truth), 1e-3);
      const auto est = estimate_rates(cond);
      CHECK(std::abs(est.rho_plus_hat - truth.rho_plus) <= 1e-3);
      CHECK(std::abs(est.rho_minus_hat - truth.rho_minus) <= 1e-3);
    }
  }
  CHECK_THROWS_AS(estimate_rates(Vector<double>(0)), std::invalid_argument);
}

TEST_CASE("rate estimates are bounded by every posterior")
{
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector<double> p(40);
    for (Index i = 0; i < p.size(); ++i)
      p(i) = 0.05 + 0.4 * u(gen);
    p(0) = 0.6 + 0.3 * u(gen);
    const auto est = estimate_rates(p);
    CHECK(est.warnings.empty());
    for (Index i = 0; i < p.size(); ++i) {
      CHECK(est.rho_minus_hat <= p(i));
      CHECK(est.rho_plus_hat <= 1 - p(i));
    }
    CHECK(est.rho_plus_hat + est.rho_minus_hat < 1);
  }
}

TEST_CASE("rate clamping and rescaling")
{
  Vector<double> mid = Vector<double>::Constant(5, 0.5);
  const auto est = estimate_rates(mid);
  CHECK(est.rho_plus_hat == doctest::Approx(0.49));
  CHECK(est.rho_minus_hat == doctest::Approx(0.49));
  CHECK(est.warnings.size() == 1);
  const auto high = estimate_rates(Vector<double>::Constant(5, 0.7).eval());
  CHECK(high.rho_minus_hat == 0.5);
  CHECK(high.rho_plus_hat == doctest::Approx(0.3));

  const auto big = detail::finish_rates(0.9, 0.8, RateEstimate::Provenance::given, 0);
  CHECK(big.rho_plus_hat + big.rho_minus_hat == doctest::Approx(0.98));
  CHECK(big.rho_plus_hat == big.rho_minus_hat);
  CHECK(big.warnings.size() == 1);
}

TEST_CASE("quantile rate estimates")
{
  Vector<double> v(10);
  v << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0;
  CHECK(lower_quantile(v, 0.05) == 0.1);
  CHECK(lower_quantile(v, 0.0) == 0.1);
  CHECK(lower_quantile(v, 0.1) == 0.1);
  CHECK(lower_quantile(v, 0.11) == 0.2);
  CHECK(estimate_rates_quantile(v, 0.05).rho_minus_hat == 0.1);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector<double> p(200);
  for (Index i = 0; i < p.size(); ++i)
    p(i) = u(gen);
  const auto base = estimate_rates(p);
  const auto q0 = estimate_rates_quantile(p, 0.0);
  CHECK(q0.rho_plus_hat == base.rho_plus_hat);
  CHECK(q0.rho_minus_hat == base.rho_minus_hat);
  CHECK(q0.provenance == RateEstimate::Provenance::quantile);
  double prev_p = -1, prev_m = -1;
  for (double q = 0.0; q <= 0.1 + 1e-12; q += 0.005) {
    const auto e = estimate_rates_quantile(p, std::min(q, 0.1));
    CHECK(e.rho_plus_hat >= prev_p);
    CHECK(e.rho_minus_hat >= prev_m);
    prev_p = e.rho_plus_hat;
    prev_m = e.rho_minus_hat;
  }
  CHECK_THROWS_AS(estimate_rates_quantile(p, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(estimate_rates_quantile(p, -0.01), std::invalid_argument);
  CHECK(to_string(estimate_rates_quantile(p, 0.05)) == "quantile(0.05)");
}

TEST_CASE("kde rate estimates on synthetic data")
{
  int within = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto clean = generate_synthetic(1000, 2, SeededRng(100 + rep));
    const auto noisy = corrupt_labels(clean, { 0.2, 0.2 }, SeededRng(200 + rep));
    const auto cond = estimate_posterior(noisy, PosteriorOptions{}, SeededRng(rep));
    const auto est = estimate_rates(cond);
    within += std::abs(est.rho_plus_hat - 0.2) <= 0.1 &&
              std::abs(est.rho_minus_hat - 0.2) <= 0.1;
  }
  CHECK(within >= 8);
}

TEST_CASE("cross-validated rates")
{
  LearnerConfig cfg;
  const auto clean = generate_synthetic(1000, 2, SeededRng(31));
  const NoisePair truth{ 0.3, 0.1 };
  const auto noisy = corrupt_labels(clean, truth, SeededRng(32));

  SUBCASE("singleton grid")
  {
    const auto est = cv_estimate_rates(noisy, { truth }, 3, cfg, SeededRng(1));
    CHECK(est.rho_plus_hat == truth.rho_plus);
    CHECK(est.rho_minus_hat == truth.rho_minus);
    CHECK(est.provenance == RateEstimate::Provenance::cross_validation);
  }
  SUBCASE("selection beats no correction")
  {
    const std::vector<NoisePair> grid{ { 0.0, 0.0 }, { 0.1, 0.1 }, truth, { 0.2, 0.0 } };
    std::vector<double> scores;
    const auto est = cv_estimate_rates(noisy, grid, 3, cfg, SeededRng(2), &scores);
    REQUIRE(scores.size() == grid.size());
    std::size_t chosen = grid.size();
    for (std::size_t g = 0; g < grid.size(); ++g)
      if (grid[g] == est.pair())
        chosen = g;
    REQUIRE(chosen < grid.size());
    CHECK(scores[chosen] >= scores[0]);
    for (double s : scores)
      CHECK(scores[chosen] >= s);

    const auto again = cv_estimate_rates(noisy, grid, 3, cfg, SeededRng(2));
    CHECK(again.pair() == est.pair());
  }
  SUBCASE("ties prefer the smaller sum, then lexicographic order")
  {
    // every pair classifies well-separated clusters perfectly
    Matrix<double> x(40, 1);
    Labels y(40);
    for (Index i = 0; i < 20; ++i) {
      x(i, 0) = 2.0 + 0.05 * static_cast<double>(i);
      y(i) = 1;
      x(20 + i, 0) = -2.0 - 0.05 * static_cast<double>(i);
      y(20 + i) = -1;
    }
    const std::vector<NoisePair> grid{ { 0.1, 0.05 }, { 0.05, 0.0 }, { 0.0, 0.05 } };
    std::vector<double> scores;
    const auto est = cv_estimate_rates(Dataset(x, y), grid, 3, cfg, SeededRng(4), &scores);
    CHECK(scores == std::vector<double>{ 1.0, 1.0, 1.0 });
    CHECK(est.pair() == NoisePair{ 0.0, 0.05 });
  }
  SUBCASE("fold failures name the fold")
  {
    Matrix<double> x(6, 1);
    x << 0, 1, 2, 3, 4, 5;
    Labels y(6);
    y << 1, -1, -1, -1, -1, -1;
    try {
      cv_estimate_rates(Dataset(x, y), { { 0.0, 0.0 } }, 3, cfg, SeededRng(5));
      FAIL("expected an estimation error");
    } catch (const EstimationError& e) {
      CHECK(std::string(e.what()).find("fold") != std::string::npos);
    }
  }
  CHECK_THROWS_AS(cv_estimate_rates(noisy, {}, 3, cfg, SeededRng(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(cv_estimate_rates(noisy, { truth }, 1, cfg, SeededRng(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(cv_estimate_rates(noisy, { { 0.6, 0.6 } }, 3, cfg, SeededRng(1)),
                  std::invalid_argument);
}

TEST_CASE("default rate grid")
{
  const auto grid = default_rate_grid();
  CHECK(grid.size() == 100);
  for (const auto& p : grid)
    CHECK(p.valid());
  CHECK(grid.front() == NoisePair{ 0.0, 0.0 });
}
