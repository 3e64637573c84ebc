#include <doctest.h>

#include <rcn/density.hpp>
#include <rcn/kernels.hpp>
#include <rcn/noise_rates.hpp>
#include <rcn/posterior_io.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace rcn;

namespace {

Matrix<double>
uniform_points(Index n, Index m, std::uint64_t seed, double lo = 0.0, double hi = 1.0)
{
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix<double> x(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      x(i, j) = u(gen);
  return x;
}

Matrix<double>
normal_points(Index n, Index m, std::uint64_t seed, double mean = 0.0, double sd = 1.0)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(mean, sd);
  Matrix<double> x(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      x(i, j) = g(gen);
  return x;
}

//! Two Gaussian blobs at (+2,+2) and (-2,-2), first half positive.
Dataset
blobs(Index per_class, std::uint64_t seed, double sd = 0.4)
{
  Matrix<double> x(2 * per_class, 2);
  x.topRows(per_class) = normal_points(per_class, 2, seed, 2.0, sd);
  x.bottomRows(per_class) = normal_points(per_class, 2, seed + 1, -2.0, sd);
  Labels y(2 * per_class);
  y.head(per_class).setConstant(1);
  y.tail(per_class).setConstant(-1);
  return Dataset(x, y);
}

void
check_kliep_contract(const RatioModel<double>& r, const Matrix<double>& de)
{
  CHECK((r.alphas.array() >= 0).all());
  CHECK(std::abs(r(de).mean() - 1.0) <= 1e-6);
}

} // namespace

TEST_CASE("gaussian kernel values")
{
  GaussianKernel<double> k(1.0);
  Eigen::Vector2d a(0.3, -1.2), b(1.3, -0.2);
  CHECK(k(a, a) == 1.0);
  CHECK(k(a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(k(a, b) == k(b, a));
  CHECK(k(a, b) == doctest::Approx(0.367879).epsilon(1e-6));
  Eigen::Vector3d c(0, 0, 0);
  CHECK_THROWS_AS(k(a, c), std::invalid_argument);
  CHECK_THROWS_AS(GaussianKernel<double>(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GaussianKernel<double>(-1.0), std::invalid_argument);

  // strictly decreasing in distance
  Eigen::VectorXd o = Eigen::VectorXd::Zero(1), p(1);
  double prev = 1.0;
  for (int i = 1; i <= 50; ++i) {
    p(0) = 0.1 * i;
    const double v = k(o, p);
    CHECK(v < prev);
    CHECK(v > 0.0);
    prev = v;
  }
}

TEST_CASE("gram matrices")
{
  const auto a = uniform_points(30, 3, 1, -2, 2);
  const auto b = uniform_points(20, 3, 2, -2, 2);
  for (double w : { 0.1, 0.5, 1.0, 2.0, 10.0 }) {
    GaussianKernel<double> k(w);
    const auto g = gram(a, a, k);
    CHECK((g.diagonal().array() == 1.0).all());
    Eigen::MatrixXd sym = g;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(gram(a, b, k) == gram(b, a, k).transpose());
    for (Index i = 0; i < 5; ++i)
      for (Index j = 0; j < 5; ++j)
        CHECK(gram(a, b, k)(i, j) ==
              doctest::Approx(k(a.row(i).transpose().eval(), b.row(j).transpose().eval()))
                .epsilon(1e-14));
  }
  CHECK_THROWS_AS(gram(a, uniform_points(3, 2, 1), GaussianKernel<double>(1.0)),
                  std::invalid_argument);
}

TEST_CASE("width selection")
{
  Matrix<double> two(2, 1);
  two << 0, 2;
  CHECK(select_width(two, WidthRule::stddev()).width() == doctest::Approx(1.0));
  Matrix<double> three(3, 1);
  three << 0, 1, 2;
  CHECK(select_width(three, WidthRule::median()).width() == doctest::Approx(1.0));
  CHECK(select_width(three, WidthRule::fixed(1.0)).width() == 1.0);
  CHECK(select_width(three, WidthRule::fixed(0.3)).width() == 0.3);

  Matrix<double> same = Matrix<double>::Constant(4, 2, 1.5);
  CHECK_THROWS_AS(select_width(same, WidthRule::stddev()), std::invalid_argument);
  CHECK_THROWS_AS(select_width(same, WidthRule::median()), std::invalid_argument);
  CHECK_THROWS_AS(select_width(two.topRows(1), WidthRule::median()),
                  std::invalid_argument);

  // subsampled median is seeded
  const auto big = uniform_points(1500, 2, 3);
  CHECK(select_width(big, WidthRule::median(), SeededRng(4)).width() ==
        select_width(big, WidthRule::median(), SeededRng(4)).width());

  CHECK(parse_width_rule("fixed:0.25").value == 0.25);
  CHECK(parse_width_rule(to_string(WidthRule::fixed(0.1))).value == 0.1);
  CHECK_THROWS_AS(parse_width_rule("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_width_rule("fixed:-1"), std::invalid_argument);
}

TEST_CASE("class prior")
{
  Labels all(3);
  all << 1, 1, 1;
  CHECK(class_prior(all).p_plus == 1.0);
  Labels mix(4);
  mix << 1, -1, -1, 1;
  CHECK(class_prior(mix).p_plus == 0.5);
  CHECK(class_prior(mix).p_minus() == 0.5);

  std::mt19937_64 gen(6);
  std::bernoulli_distribution b(0.6);
  Labels many(100000);
  for (Index i = 0; i < many.size(); ++i)
    many(i) = b(gen) ? 1 : -1;
  CHECK(std::abs(class_prior(many).p_plus - 0.6) <= 0.01);
  CHECK_THROWS(class_prior(Labels(0)));
}

TEST_CASE("kernel density estimate")
{
  SUBCASE("single point")
  {
    const auto kde = kde_fit(Matrix<double>(Matrix<double>::Zero(1, 1)), GaussianKernel<double>(1.0));
    CHECK(kde(Matrix<double>::Zero(1, 1))(0) ==
          doctest::Approx(1.0 / std::sqrt(2 * M_PI)).epsilon(1e-12));
    CHECK(kde(Matrix<double>::Zero(1, 1))(0) == doctest::Approx(0.398942).epsilon(1e-6));
  }
  SUBCASE("integrates to one")
  {
    Matrix<double> pts(4, 1);
    pts << -1.0, 0.0, 0.5, 2.0;
    const auto kde = kde_fit(pts, GaussianKernel<double>(0.7));
    const Index steps = 16000;
    const double h = 16.0 / static_cast<double>(steps);
    Matrix<double> grid(steps + 1, 1);
    for (Index i = 0; i <= steps; ++i)
      grid(i, 0) = -8.0 + h * static_cast<double>(i);
    const Vector<double> v = kde(grid);
    CHECK((v.array() > 0).all());
    const double integral = h * (v.sum() - 0.5 * (v(0) + v(steps)));
    CHECK(std::abs(integral - 1.0) <= 1e-3);
  }
  SUBCASE("consistent for a normal sample")
  {
    const auto kde = kde_fit(normal_points(10000, 1, 12), GaussianKernel<double>(0.15));
    CHECK(std::abs(kde(Matrix<double>::Zero(1, 1))(0) - 0.3989) <= 0.02);
  }
  SUBCASE("far queries stay finite")
  {
    const auto kde = kde_fit(normal_points(10, 2, 1), GaussianKernel<double>(0.1));
    Matrix<double> far(1, 2);
    far << 100, 100;
    CHECK(std::isfinite(kde.log_density(far)(0)));
    CHECK(kde(far)(0) >= 0.0);
  }
  CHECK_THROWS_AS(kde_fit(Matrix<double>(0, 1), GaussianKernel<double>(1.0)),
                  std::invalid_argument);
  const auto kde = kde_fit(Matrix<double>(Matrix<double>::Zero(1, 2)), GaussianKernel<double>(1.0));
  CHECK_THROWS_AS(kde(Matrix<double>::Zero(1, 3)), std::invalid_argument);
}

TEST_CASE("kde posterior")
{
  SUBCASE("mirror symmetry")
  {
    const auto half = uniform_points(40, 2, 21, 0.1, 2.0);
    Matrix<double> x(80, 2);
    x.topRows(40) = half;
    x.bottomRows(40) = -half;
    Labels y(80);
    y.head(40).setConstant(1);
    y.tail(40).setConstant(-1);
    const auto cond = cond_prob_kde(Dataset(x, y), GaussianKernel<double>(0.8));
    CHECK(std::abs(cond.positive(Matrix<double>::Zero(1, 2))(0) - 0.5) <= 1e-9);
  }
  SUBCASE("separated blobs")
  {
    const auto d = blobs(200, 31);
    const auto cond = cond_prob_kde(d, GaussianKernel<double>(0.5));
    Matrix<double> core(1, 2);
    core << 2, 2;
    CHECK(cond.positive(core)(0) >= 1 - cond.epsilon() - 0.05);
    core << -2, -2;
    CHECK(cond.positive(core)(0) <= cond.epsilon() + 0.05);
    const auto grid = uniform_points(100, 2, 5, -4, 4);
    const Vector<double> p = cond.positive(grid);
    const Vector<double> q = cond.negative(grid);
    CHECK((p.array() >= cond.epsilon()).all());
    CHECK((p.array() <= 1 - cond.epsilon()).all());
    CHECK(((p + q).array() == 1.0).all());
  }
  SUBCASE("single class")
  {
    const auto x = uniform_points(10, 2, 1);
    CHECK_THROWS_AS(cond_prob_kde(Dataset(x, Labels::Ones(10)), GaussianKernel<double>(1.0)),
                    EstimationError);
  }
}

TEST_CASE("kliep")
{
  SUBCASE("identical samples give a flat ratio")
  {
    const auto s = uniform_points(500, 1, 41);
    const auto centers = choose_centers(s, 100, SeededRng(1));
    const auto kernel = select_width(s, WidthRule::median());
    const auto r = kliep_fit(s, s, centers, kernel);
    check_kliep_contract(r, s);
    CHECK((r(s).array() - 1.0).abs().maxCoeff() <= 0.2);
  }
  SUBCASE("ratio follows the numerator")
  {
    const auto nu = uniform_points(300, 1, 51, 0.5, 1.0);
    const auto de = uniform_points(600, 1, 52, 0.0, 1.0);
    const auto r = kliep_fit(nu, de, choose_centers(nu, 100, SeededRng(2)),
                             GaussianKernel<double>(0.1));
    check_kliep_contract(r, de);
    const auto left = uniform_points(200, 1, 53, 0.0, 0.5);
    const auto right = uniform_points(200, 1, 54, 0.5, 1.0);
    CHECK(r(left).mean() < r(right).mean());
  }
  SUBCASE("contract across widths and shapes")
  {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const auto nu = normal_points(80, 3, 100 + seed, 0.5);
      const auto de = normal_points(150, 3, 200 + seed);
      for (double w : { 0.3, 1.0, 3.0 }) {
        const auto r = kliep_fit(nu, de, nu, GaussianKernel<double>(w));
        check_kliep_contract(r, de);
      }
    }
  }
  SUBCASE("iteration budget")
  {
    const auto nu = normal_points(80, 2, 1, 0.5);
    const auto de = normal_points(150, 2, 2);
    KliepOptions opt;
    opt.max_iter = 1;
    opt.tol = 1e-300;
    try {
      kliep_fit(nu, de, nu, GaussianKernel<double>(0.5), opt);
      FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
      CHECK_FALSE(e.trace().empty());
    }
  }
  CHECK_THROWS_AS(kliep_fit(Matrix<double>(0, 2), normal_points(5, 2, 1),
                            normal_points(5, 2, 1), GaussianKernel<double>(1.0)),
                  std::invalid_argument);
}

TEST_CASE("square-distance ratio fitting")
{
  SUBCASE("identical samples")
  {
    const auto s = uniform_points(2000, 1, 61);
    const auto centers = choose_centers(s, 100, SeededRng(3));
    const auto r = lsif_fit(s, s, centers, select_width(s, WidthRule::median()), 1e-3);
    CHECK((r.alphas.array() >= 0).all());
    CHECK((r(s).array() - 1.0).abs().maxCoeff() <= 0.2);
  }
  SUBCASE("ridge limit")
  {
    const auto nu = normal_points(100, 2, 1, 0.5);
    const auto de = normal_points(100, 2, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (double ridge : { 1e-2, 1.0, 1e2, 1e4, 1e8 }) {
      const auto r = lsif_fit(nu, de, nu, GaussianKernel<double>(1.0), ridge);
      const double norm = r.alphas.norm();
      CHECK(norm <= prev);
      prev = norm;
    }
    CHECK(prev < 1e-6);
  }
  SUBCASE("beats the zero model")
  {
    const auto nu = normal_points(150, 2, 3, 0.7);
    const auto de = normal_points(300, 2, 4);
    const auto centers = choose_centers(nu, 100, SeededRng(5));
    const GaussianKernel<double> k(0.8);
    const auto r = lsif_fit(nu, de, centers, k, 1e-3);
    const RatioModel<double> zero{ centers, Vector<double>::Zero(centers.rows()), k };
    CHECK(bregman_empirical(r, BregmanGenerator::square, nu, de) <
          bregman_empirical(zero, BregmanGenerator::square, nu, de));
    CHECK(bregman_empirical(zero, BregmanGenerator::square, nu, de) ==
          doctest::Approx(0.5));
  }
  SUBCASE("singular without ridge")
  {
    Matrix<double> pts = Matrix<double>::Constant(5, 1, 1.0);
    Matrix<double> centers(2, 1);
    centers << 0.0, 0.0;
    CHECK_THROWS_AS(lsif_fit(pts, pts, centers, GaussianKernel<double>(1.0), 0.0),
                    EstimationError);
  }
}

TEST_CASE("bregman objective")
{
  // Every sample point coincides with the single center, so r == alpha exactly.
  const Matrix<double> pts = Matrix<double>::Constant(6, 2, 0.25);
  const RatioModel<double> one{ pts.topRows(1), Vector<double>::Ones(1),
                                GaussianKernel<double>(1.0) };
  CHECK(bregman_empirical(one, BregmanGenerator::square, pts, pts) == 0.0);
  CHECK(bregman_empirical(one, BregmanGenerator::kl, pts, pts) == doctest::Approx(1.0));

  // direct summation oracle
  const auto nu = normal_points(40, 2, 71, 0.3);
  const auto de = normal_points(60, 2, 72);
  const GaussianKernel<double> k(0.9);
  auto oracle = [&](const Vector<double>& alpha) {
    double de_sum = 0, nu_sum = 0;
    for (Index i = 0; i < de.rows(); ++i) {
      double r = 0;
      for (Index l = 0; l < nu.rows(); ++l)
        r += alpha(l) * k(de.row(i).transpose().eval(), nu.row(l).transpose().eval());
      de_sum += (r - 1) * r - (r - 1) * (r - 1) / 2;
    }
    for (Index i = 0; i < nu.rows(); ++i) {
      double r = 0;
      for (Index l = 0; l < nu.rows(); ++l)
        r += alpha(l) * k(nu.row(i).transpose().eval(), nu.row(l).transpose().eval());
      nu_sum += r - 1;
    }
    return de_sum / double(de.rows()) - nu_sum / double(nu.rows());
  };
  const Vector<double> a1 = Vector<double>::Constant(nu.rows(), 0.05);
  const Vector<double> a2 = uniform_points(nu.rows(), 1, 73).col(0) * 0.1;
  const RatioModel<double> m1{ nu, a1, k }, m2{ nu, a2, k };
  const double b1 = bregman_empirical(m1, BregmanGenerator::square, nu, de);
  const double b2 = bregman_empirical(m2, BregmanGenerator::square, nu, de);
  CHECK(b1 == doctest::Approx(oracle(a1)).epsilon(1e-12));
  CHECK(b1 - b2 == doctest::Approx(oracle(a1) - oracle(a2)).epsilon(1e-10));

  // duplicating both samples
  Matrix<double> nu2(2 * nu.rows(), 2), de2(2 * de.rows(), 2);
  nu2 << nu, nu;
  de2 << de, de;
  CHECK(bregman_empirical(m1, BregmanGenerator::square, nu2, de2) ==
        doctest::Approx(b1).epsilon(1e-12));
}

TEST_CASE("ratio posterior")
{
  for (auto method : { PosteriorMethod::kliep, PosteriorMethod::lsif }) {
    CAPTURE(to_string(method));
    PosteriorOptions opt;
    opt.method = method;
    SUBCASE("separated blobs")
    {
      const auto d = blobs(150, 81);
      opt.ratio_width = WidthRule::fixed(0.5);
      const auto cond = cond_prob_ratio(d, opt, SeededRng(1));
      const auto core = normal_points(50, 2, 82, 2.0, 0.2);
      CHECK(cond.positive(core).minCoeff() >= 0.9);
      const auto neg_core = normal_points(50, 2, 83, -2.0, 0.2);
      CHECK(cond.negative(neg_core).minCoeff() >= 0.9);
      const Vector<double> p = cond.positive(core), q = cond.negative(core);
      CHECK(((p + q).array() == 1.0).all());
      CHECK(((cond.train_positive() + cond.train_negative()).array() == 1.0).all());
    }
    SUBCASE("labels independent of features")
    {
      const auto x = uniform_points(600, 2, 84);
      std::mt19937_64 gen(85);
      std::bernoulli_distribution b(0.4);
      Labels y(600);
      for (Index i = 0; i < 600; ++i)
        y(i) = b(gen) ? 1 : -1;
      const Dataset d(x, y);
      const auto cond = cond_prob_ratio(d, opt, SeededRng(2));
      const auto grid = uniform_points(100, 2, 86, 0.1, 0.9);
      const double prior = cond.prior().p_plus;
      CHECK(((cond.positive(grid).array() - prior).abs() <= 0.1).all());
    }
  }
  SUBCASE("cross-validated width")
  {
    PosteriorOptions opt;
    opt.method = PosteriorMethod::kliep;
    opt.ratio_width = WidthRule::cross_validated();
    const auto d = blobs(100, 87);
    const auto a = cond_prob_ratio(d, opt, SeededRng(3));
    const auto b = cond_prob_ratio(d, opt, SeededRng(3));
    CHECK(a.train_positive() == b.train_positive());
    for (const auto* parts :
         { &std::get<CondProbEstimate<double>::RatioParts>(a.parts()).plus,
           &std::get<CondProbEstimate<double>::RatioParts>(a.parts()).minus })
      check_kliep_contract(*parts, d.features());
  }
}

TEST_CASE("estimated posterior matches the forward model")
{
  const NoisePair rates{ 0.3, 0.1 };
  const auto clean = generate_synthetic(10000, 2, SeededRng(91));
  const auto noisy = corrupt_labels(clean, rates, SeededRng(93));

  PosteriorOptions opt;
  opt.method = PosteriorMethod::kliep;
  opt.ratio_width = WidthRule::cross_validated();
  const auto cond = estimate_posterior(noisy, opt, SeededRng(94));

  Matrix<double> grid(400, 2);
  Vector<double> clean_post(400);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 20; ++j) {
      const double a = (i + 0.5) / 20.0, b = (j + 0.5) / 20.0;
      grid.row(i * 20 + j) << a, b;
      clean_post(i * 20 + j) = a + b >= 1.0 ? 1.0 : 0.0;
    }
  const Vector<double> truth = noisy_posterior(clean_post, rates);
  const double mae = (cond.positive(grid) - truth).cwiseAbs().mean();
  CHECK(mae <= 0.08);
}

TEST_CASE("posterior serialisation")
{
  const auto d = blobs(60, 95);
  PosteriorOptions kde;
  PosteriorOptions kliep;
  kliep.method = PosteriorMethod::kliep;
  for (const auto& opt : { kde, kliep }) {
    const auto cond = estimate_posterior(d, opt, SeededRng(4));
    std::stringstream ss;
    save_posterior(ss, cond);
    const auto back = load_posterior(ss);
    CHECK(back.method() == cond.method());
    CHECK(back.prior().p_plus == cond.prior().p_plus);
    const auto grid = uniform_points(50, 2, 96, -3, 3);
    CHECK((back.positive(grid) - cond.positive(grid)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  std::stringstream bad("rcn-posterior 2\n");
  CHECK_THROWS(load_posterior(bad));
  std::stringstream ss;
  CHECK_THROWS(save_posterior(ss, CondProbEstimate<double>::given(Vector<double>::Ones(3), 1e-3)));
}
