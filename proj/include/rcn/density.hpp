#pragma once

#include "dataset.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "rng.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rcn {

// ---------------------------------------------------------------------------
// Class prior

struct ClassPrior
{
  double p_plus = 0.5;
  double p_minus() const { return 1.0 - p_plus; }
  double of(int label) const { return label > 0 ? p_plus : p_minus(); }
};

inline ClassPrior
class_prior(const Labels& labels)
{
  if (labels.size() < 1)
    throw std::invalid_argument("class prior of an empty label vector");
  const auto pos = (labels.array() == 1).count();
  return { static_cast<double>(pos) / static_cast<double>(labels.size()) };
}

// ---------------------------------------------------------------------------
// Kernel density estimate

//! (1/n) sum_i phi(x - x_i), phi the isotropic Gaussian density with
//! standard deviation equal to the kernel width.
template <typename Scalar = double>
class KdeEstimate
{
public:
  KdeEstimate(Matrix<Scalar> points, GaussianKernel<Scalar> kernel)
    : points_(std::move(points))
    , kernel_(kernel)
  {
    if (points_.rows() < 1)
      throw std::invalid_argument("kernel density estimate needs a point");
    const Scalar w = kernel_.width();
    log_norm_ = -static_cast<Scalar>(points_.cols()) *
                std::log(w * std::sqrt(2 * Scalar(M_PI)));
  }

  const Matrix<Scalar>& points() const { return points_; }
  const GaussianKernel<Scalar>& kernel() const { return kernel_; }
  Index dim() const { return points_.cols(); }
  //! log of the density's normalising constant (2 pi w^2)^(-m/2).
  Scalar log_normalizer() const { return log_norm_; }

  //! Log density at each row of `x`, computed with log-sum-exp so that
  //! far-away queries do not underflow.
  template <typename D>
  Vector<Scalar> log_density(const Eigen::MatrixBase<D>& x) const
  {
    if (x.cols() != points_.cols())
      throw std::invalid_argument("query dimension differs from the sample");
    const Matrix<Scalar> d2 = sq_distances(x, points_);
    const Scalar c = Scalar(-1) / (2 * kernel_.width() * kernel_.width());
    const Scalar log_n = std::log(static_cast<Scalar>(points_.rows()));
    Vector<Scalar> out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      const Scalar top = c * d2.row(i).minCoeff();
      const Scalar s = (c * d2.row(i).array() - top).exp().sum();
      out(i) = top + std::log(s) - log_n + log_norm_;
    }
    return out;
  }

  template <typename D>
  Vector<Scalar> operator()(const Eigen::MatrixBase<D>& x) const
  {
    return log_density(x).array().exp().matrix();
  }

private:
  Matrix<Scalar> points_;
  GaussianKernel<Scalar> kernel_;
  Scalar log_norm_ = 0;
};

template <typename Scalar>
KdeEstimate<Scalar>
kde_fit(const Matrix<Scalar>& points, const GaussianKernel<Scalar>& kernel)
{
  return KdeEstimate<Scalar>(points, kernel);
}

// ---------------------------------------------------------------------------
// Density ratio models

//! r(x) = sum_l alpha_l k(x, c_l) with alpha >= 0.
template <typename Scalar = double>
struct RatioModel
{
  Matrix<Scalar> centers;
  Vector<Scalar> alphas;
  GaussianKernel<Scalar> kernel;

  template <typename D>
  Vector<Scalar> operator()(const Eigen::MatrixBase<D>& x) const
  {
    return gram(x, centers, kernel) * alphas;
  }
};

struct KliepOptions
{
  double tol = 1e-7;
  int max_iter = 5000;
  double initial_step = 1.0;
};

namespace detail {

template <typename Scalar>
void
check_ratio_inputs(const Matrix<Scalar>& nu,
                   const Matrix<Scalar>& de,
                   const Matrix<Scalar>& centers)
{
  if (nu.rows() < 1 || de.rows() < 1 || centers.rows() < 1)
    throw std::invalid_argument(
      "ratio fitting needs nonempty numerator, denominator and centers");
  if (nu.cols() != de.cols() || nu.cols() != centers.cols())
    throw std::invalid_argument("ratio fitting inputs differ in dimension");
}

template <typename Scalar>
constexpr Scalar
tiny()
{
  return std::numeric_limits<Scalar>::min();
}

} // namespace detail

//! KLIEP: maximise the mean log ratio on the numerator sample subject to a
//! unit mean on the denominator sample and alpha >= 0.
//!
//! Projected gradient ascent. Each candidate step is projected onto the
//! feasible set; a step that lowers the objective is halved. Stops when the accepted gain falls below `tol`
//! or no ascent step exists. Throws ConvergenceError after `max_iter`.
template <typename Scalar>
RatioModel<Scalar>
kliep_fit(const Matrix<Scalar>& nu,
          const Matrix<Scalar>& de,
          const Matrix<Scalar>& centers,
          const GaussianKernel<Scalar>& kernel,
          const KliepOptions& opt = {})
{
  detail::check_ratio_inputs(nu, de, centers);
  const Matrix<Scalar> a = gram(nu, centers, kernel);
  const Vector<Scalar> b = gram(de, centers, kernel).colwise().mean().transpose();
  const Scalar bb = b.squaredNorm();
  if (!(bb > 0))
    throw EstimationError("denominator sample puts no kernel mass on centers");
  const auto n1 = static_cast<Scalar>(nu.rows());

  auto objective = [&](const Vector<Scalar>& alpha) {
    const Vector<Scalar> r = a * alpha;
    Scalar s = 0;
    for (Index i = 0; i < r.size(); ++i)
      s += std::log(std::max(r(i), detail::tiny<Scalar>()));
    return s / n1;
  };
  // Euclidean projection onto {alpha >= 0, b.alpha = 1}: alpha = max(0, v - tau b)
  // with tau found by bisection, then an exact renormalisation.
  auto project = [&](Vector<Scalar>& alpha) {
    auto mass_at = [&](Scalar tau) {
      return b.dot((alpha - tau * b).cwiseMax(Scalar(0)));
    };
    Scalar lo = (b.dot(alpha) - 1) / bb;
    Scalar hi = lo;
    for (Index l = 0; l < b.size(); ++l)
      if (b(l) > 0)
        hi = std::max(hi, alpha(l) / b(l));
    for (int k = 0; k < 200 && lo < hi; ++k) {
      const Scalar mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi)
        break;
      (mass_at(mid) >= 1 ? lo : hi) = mid;
    }
    alpha = (alpha - lo * b).cwiseMax(Scalar(0));
    const Scalar mass = b.dot(alpha);
    if (!(mass > 0))
      return false;
    alpha /= mass;
    return true;
  };

  Vector<Scalar> alpha = Vector<Scalar>::Ones(centers.rows());
  alpha /= b.dot(alpha);
  Scalar obj = objective(alpha);
  std::vector<double> trace{ static_cast<double>(obj) };
  Scalar step = static_cast<Scalar>(opt.initial_step);

  for (int it = 0; it < opt.max_iter; ++it) {
    const Vector<Scalar> r = (a * alpha).cwiseMax(detail::tiny<Scalar>());
    const Vector<Scalar> grad = a.transpose() * r.cwiseInverse() / n1;
    Vector<Scalar> cand;
    Scalar cand_obj = 0;
    bool accepted = false;
    for (int halving = 0; halving < 60 && !accepted; ++halving) {
      cand = alpha + step * grad;
      if (project(cand)) {
        cand_obj = objective(cand);
        accepted = cand_obj >= obj;
      }
      if (!accepted)
        step /= 2;
    }
    if (!accepted)
      break;
    const Scalar gain = cand_obj - obj;
    alpha = cand;
    obj = cand_obj;
    trace.push_back(static_cast<double>(obj));
    if (gain < opt.tol)
      return { centers, alpha, kernel };
    step *= 2;
    if (it + 1 == opt.max_iter)
      throw ConvergenceError("KLIEP did not converge in " +
                               std::to_string(opt.max_iter) + " iterations",
                             std::move(trace));
  }
  return { centers, alpha, kernel };
}

//! Square-distance ratio matching: minimise
//! (1/2n2) sum r(de)^2 - (1/n1) sum r(nu) + ridge |alpha|^2
//! in closed form, clip alpha at zero and rescale it by the nonnegative
//! factor that minimises the objective along the clipped direction.
template <typename Scalar>
RatioModel<Scalar>
lsif_fit(const Matrix<Scalar>& nu,
         const Matrix<Scalar>& de,
         const Matrix<Scalar>& centers,
         const GaussianKernel<Scalar>& kernel,
         Scalar ridge)
{
  detail::check_ratio_inputs(nu, de, centers);
  if (!(ridge >= 0))
    throw std::invalid_argument("ridge must be nonnegative");
  const Matrix<Scalar> phi_de = gram(de, centers, kernel);
  const Matrix<Scalar> phi_nu = gram(nu, centers, kernel);
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Dense h = phi_de.transpose() * phi_de / static_cast<Scalar>(de.rows());
  const Vector<Scalar> lin =
    phi_nu.colwise().sum().transpose() / static_cast<Scalar>(nu.rows());
  h.diagonal().array() += 2 * ridge;
  Eigen::LLT<Dense> llt(h);
  if (llt.info() != Eigen::Success || (ridge == 0 && llt.rcond() < 1e-12))
    throw EstimationError(
      "square-distance ratio system is singular; use a nonzero ridge");
  Vector<Scalar> alpha = llt.solve(lin);
  alpha = alpha.cwiseMax(Scalar(0));
  // best nonnegative multiple of the clipped solution
  const Scalar quad = alpha.dot(h * alpha);
  const Scalar gain = lin.dot(alpha);
  alpha *= quad > 0 ? std::max(Scalar(0), gain / quad) : Scalar(0);
  return { centers, alpha, kernel };
}

enum class BregmanGenerator
{
  square, //!< f(t) = (t - 1)^2 / 2
  kl      //!< f(t) = t log t - t
};

//! Empirical Bregman discrepancy between the true ratio and `model`, up to
//! the model-independent constant:
//! mean_de[f'(r) r] - mean_de[f(r)] - mean_nu[f'(r)].
template <typename Scalar>
Scalar
bregman_empirical(const RatioModel<Scalar>& model,
                  BregmanGenerator gen,
                  const Matrix<Scalar>& nu,
                  const Matrix<Scalar>& de)
{
  if (nu.rows() < 1 || de.rows() < 1)
    throw std::invalid_argument("Bregman objective needs nonempty samples");
  const Vector<Scalar> r_de = model(de);
  const Vector<Scalar> r_nu = model(nu);
  auto f = [gen](Scalar t) {
    return gen == BregmanGenerator::square ? (t - 1) * (t - 1) / 2
                                           : t * std::log(t) - t;
  };
  auto df = [gen](Scalar t) {
    return gen == BregmanGenerator::square ? t - 1 : std::log(t);
  };
  Scalar de_term = 0;
  for (Index i = 0; i < r_de.size(); ++i)
    de_term += df(r_de(i)) * r_de(i) - f(r_de(i));
  Scalar nu_term = 0;
  for (Index i = 0; i < r_nu.size(); ++i)
    nu_term += df(r_nu(i));
  return de_term / static_cast<Scalar>(r_de.size()) -
         nu_term / static_cast<Scalar>(r_nu.size());
}

// ---------------------------------------------------------------------------
// Noisy posterior P(observed label | x)

enum class PosteriorMethod
{
  kde,
  kliep,
  lsif,
  given
};

struct PosteriorOptions
{
  PosteriorMethod method = PosteriorMethod::kde;
  WidthRule kde_width = WidthRule::stddev();
  WidthRule ratio_width = WidthRule::median();
  double epsilon = 1e-3;
  KliepOptions kliep;
  double ridge = 1e-3;
  Index max_centers = 100;
  //! Multiples of the median pairwise distance tried by width CV.
  std::vector<double> cv_multipliers{ 0.2, 0.3,  0.4, 0.45, 0.5,
                                      0.55, 0.6, 0.7, 0.8,  1.0 };
  int cv_folds = 5;
};

//! Estimated P(Y_obs = +1 | x) with its evaluator.
//!
//! Values are clamped to [epsilon, 1 - epsilon]; the negative-class
//! posterior is always formed as 1 - positive.
template <typename Scalar = double>
class CondProbEstimate
{
public:
  struct KdeParts
  {
    KdeEstimate<Scalar> plus;
    KdeEstimate<Scalar> minus;
  };
  struct RatioParts
  {
    RatioModel<Scalar> plus;
    RatioModel<Scalar> minus;
  };
  using Parts = std::variant<std::monostate, KdeParts, RatioParts>;

  CondProbEstimate(PosteriorMethod method,
                   ClassPrior prior,
                   Scalar epsilon,
                   Parts parts,
                   Vector<Scalar> train_values)
    : method_(method)
    , prior_(prior)
    , epsilon_(epsilon)
    , parts_(std::move(parts))
    , train_values_(std::move(train_values))
  {
    if (!(epsilon >= 0 && epsilon < 0.5))
      throw std::invalid_argument("posterior clamp must lie in [0, 0.5)");
    train_values_ = clamp(train_values_);
  }

  //! Wraps externally supplied posteriors (e.g. an exact one). Not
  //! evaluable at new points.
  static CondProbEstimate given(Vector<Scalar> values, Scalar epsilon)
  {
    ClassPrior prior{ values.size() ? static_cast<double>(values.mean()) : 0.5 };
    return CondProbEstimate(PosteriorMethod::given, prior, epsilon,
                            std::monostate{}, std::move(values));
  }

  PosteriorMethod method() const { return method_; }
  const ClassPrior& prior() const { return prior_; }
  Scalar epsilon() const { return epsilon_; }
  const Parts& parts() const { return parts_; }

  //! P(+1 | x_i) on the points the estimate was fitted on.
  const Vector<Scalar>& train_positive() const { return train_values_; }
  Vector<Scalar> train_negative() const
  {
    return (Scalar(1) - train_values_.array()).matrix();
  }

  //! Posterior of each example's own observed label.
  Vector<Scalar> train_observed(const Labels& labels) const
  {
    if (labels.size() != train_values_.size())
      throw std::invalid_argument("label count differs from posterior count");
    Vector<Scalar> out(labels.size());
    for (Index i = 0; i < labels.size(); ++i)
      out(i) = labels(i) > 0 ? train_values_(i) : Scalar(1) - train_values_(i);
    return out;
  }

  template <typename D>
  Vector<Scalar> positive(const Eigen::MatrixBase<D>& x) const
  {
    return clamp(std::visit([&](const auto& p) { return raw(p, x); }, parts_));
  }

  template <typename D>
  Vector<Scalar> negative(const Eigen::MatrixBase<D>& x) const
  {
    return (Scalar(1) - positive(x).array()).matrix();
  }

private:
  Vector<Scalar> clamp(Vector<Scalar> v) const
  {
    for (Index i = 0; i < v.size(); ++i)
      v(i) = std::clamp(v(i), epsilon_, Scalar(1) - epsilon_);
    return v;
  }

  template <typename D>
  Vector<Scalar> raw(const std::monostate&, const Eigen::MatrixBase<D>&) const
  {
    throw std::logic_error("a given posterior cannot be evaluated at new points");
  }

  template <typename D>
  Vector<Scalar> raw(const KdeParts& p, const Eigen::MatrixBase<D>& x) const
  {
    const Vector<Scalar> lp = p.plus.log_density(x).array() +
                              static_cast<Scalar>(std::log(prior_.p_plus));
    const Vector<Scalar> lm = p.minus.log_density(x).array() +
                              static_cast<Scalar>(std::log(prior_.p_minus()));
    return (Scalar(1) / (Scalar(1) + (lm - lp).array().exp())).matrix();
  }

  template <typename D>
  Vector<Scalar> raw(const RatioParts& p, const Eigen::MatrixBase<D>& x) const
  {
    const Vector<Scalar> qp = p.plus(x) * static_cast<Scalar>(prior_.p_plus);
    const Vector<Scalar> qm = p.minus(x) * static_cast<Scalar>(prior_.p_minus());
    Vector<Scalar> out(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
      const Scalar total = qp(i) + qm(i);
      out(i) = total < Scalar(1e-12) ? static_cast<Scalar>(prior_.p_plus)
                                     : qp(i) / total;
    }
    return out;
  }

  PosteriorMethod method_;
  ClassPrior prior_;
  Scalar epsilon_;
  Parts parts_;
  Vector<Scalar> train_values_;
};

namespace detail {

template <typename Scalar>
void
require_both_classes(const LabeledDataset<Scalar>& train)
{
  const auto pos = train.count(1);
  if (pos == 0 || pos == train.size())
    throw EstimationError(
      "posterior estimation needs both labels present in the training data");
}

} // namespace detail

//! Bayes rule over class-conditional kernel density estimates.
template <typename Scalar>
CondProbEstimate<Scalar>
cond_prob_kde(const LabeledDataset<Scalar>& train,
              const GaussianKernel<Scalar>& kernel,
              Scalar epsilon = Scalar(1e-3))
{
  detail::require_both_classes(train);
  const ClassPrior prior = class_prior(train.labels());
  typename CondProbEstimate<Scalar>::KdeParts parts{
    kde_fit(train.points_with(1), kernel), kde_fit(train.points_with(-1), kernel)
  };
  CondProbEstimate<Scalar> tmp(PosteriorMethod::kde, prior, epsilon, parts,
                               Vector<Scalar>::Zero(train.size()));
  Vector<Scalar> values = tmp.positive(train.features());
  return CondProbEstimate<Scalar>(PosteriorMethod::kde, prior, epsilon,
                                  std::move(parts), std::move(values));
}

//! At most `max_centers` numerator rows, subsampled with `rng` when needed.
template <typename Scalar>
Matrix<Scalar>
choose_centers(const Matrix<Scalar>& nu, Index max_centers, SeededRng rng)
{
  if (nu.rows() <= max_centers)
    return nu;
  std::vector<Index> rows(static_cast<std::size_t>(nu.rows()));
  std::iota(rows.begin(), rows.end(), Index{ 0 });
  rng.shuffle(rows.begin(), rows.end());
  rows.resize(static_cast<std::size_t>(max_centers));
  std::sort(rows.begin(), rows.end());
  Matrix<Scalar> c(max_centers, nu.cols());
  for (Index k = 0; k < max_centers; ++k)
    c.row(k) = nu.row(rows[static_cast<std::size_t>(k)]);
  return c;
}

template <typename Scalar>
RatioModel<Scalar>
fit_ratio(PosteriorMethod method,
          const Matrix<Scalar>& nu,
          const Matrix<Scalar>& de,
          const Matrix<Scalar>& centers,
          const GaussianKernel<Scalar>& kernel,
          const PosteriorOptions& opt)
{
  if (method == PosteriorMethod::kliep)
    return kliep_fit(nu, de, centers, kernel, opt.kliep);
  if (method == PosteriorMethod::lsif)
    return lsif_fit(nu, de, centers, kernel, static_cast<Scalar>(opt.ridge));
  throw std::invalid_argument("not a ratio-fitting method");
}

//! Chooses the ratio kernel width among multiples of the median pairwise
//! distance of `de` by held-out numerator likelihood (KLIEP) or held-out
//! square-distance objective (LSIF). Ties keep the smaller width.
template <typename Scalar>
GaussianKernel<Scalar>
select_ratio_width_cv(PosteriorMethod method,
                      const Matrix<Scalar>& nu,
                      const Matrix<Scalar>& de,
                      const PosteriorOptions& opt,
                      SeededRng rng)
{
  if (opt.cv_multipliers.empty())
    throw std::invalid_argument("width CV needs at least one multiplier");
  const Scalar base = median_pairwise_distance(de, 1000, rng.derive("median"));
  if (!(base > 0))
    throw EstimationError("all points coincide; cannot scale kernel widths");
  if (nu.rows() < 2)
    return GaussianKernel<Scalar>(base);
  const int folds = std::min<int>(opt.cv_folds, static_cast<int>(nu.rows()));
  const auto parts = fold_indices(nu.rows(), folds, rng.derive("folds"));

  Scalar best_score = -std::numeric_limits<Scalar>::infinity();
  Scalar best_width = 0;
  for (double mult : opt.cv_multipliers) {
    const GaussianKernel<Scalar> kernel(base * static_cast<Scalar>(mult));
    Scalar score = 0;
    bool ok = true;
    for (int k = 0; k < folds && ok; ++k) {
      const auto& held = parts[static_cast<std::size_t>(k)];
      std::vector<Index> keep;
      for (int j = 0; j < folds; ++j)
        if (j != k)
          keep.insert(keep.end(), parts[static_cast<std::size_t>(j)].begin(),
                      parts[static_cast<std::size_t>(j)].end());
      std::sort(keep.begin(), keep.end());
      Matrix<Scalar> nu_fit(static_cast<Index>(keep.size()), nu.cols());
      for (std::size_t i = 0; i < keep.size(); ++i)
        nu_fit.row(static_cast<Index>(i)) = nu.row(keep[i]);
      Matrix<Scalar> nu_held(static_cast<Index>(held.size()), nu.cols());
      for (std::size_t i = 0; i < held.size(); ++i)
        nu_held.row(static_cast<Index>(i)) = nu.row(held[i]);
      try {
        const auto centers = choose_centers(
          nu_fit, opt.max_centers, rng.derive(static_cast<std::uint64_t>(k), "centers"));
        const auto model = fit_ratio(method, nu_fit, de, centers, kernel, opt);
        const Vector<Scalar> r_held = model(nu_held);
        if (method == PosteriorMethod::kliep) {
          score += r_held.array().max(detail::tiny<Scalar>()).log().mean();
        } else {
          const Vector<Scalar> r_de = model(de);
          score -= r_de.squaredNorm() / (2 * static_cast<Scalar>(de.rows())) -
                   r_held.mean();
        }
      } catch (const ConvergenceError&) {
        ok = false;
      } catch (const EstimationError&) {
        ok = false;
      }
    }
    if (ok && score > best_score) {
      best_score = score;
      best_width = kernel.width();
    }
  }
  if (!(best_width > 0))
    throw EstimationError("no candidate kernel width produced a ratio fit");
  return GaussianKernel<Scalar>(best_width);
}

//! Ratio-matching posterior: r+ = p(x|+1)/p(x) and r- = p(x|-1)/p(x) are
//! fitted separately against the pooled sample, then
//! P(+1|x) = r+(x) P(+1) / (r+(x) P(+1) + r-(x) P(-1)).
template <typename Scalar>
CondProbEstimate<Scalar>
cond_prob_ratio(const LabeledDataset<Scalar>& train,
                const PosteriorOptions& opt,
                SeededRng rng)
{
  if (opt.method != PosteriorMethod::kliep && opt.method != PosteriorMethod::lsif)
    throw std::invalid_argument("cond_prob_ratio needs method kliep or lsif");
  detail::require_both_classes(train);
  const ClassPrior prior = class_prior(train.labels());
  const Matrix<Scalar>& de = train.features();

  auto fit_class = [&](int label) {
    const Matrix<Scalar> nu = train.points_with(label);
    const std::string tag = label > 0 ? "plus" : "minus";
    GaussianKernel<Scalar> kernel =
      opt.ratio_width.kind == WidthRule::Kind::cross_validated
        ? select_ratio_width_cv(opt.method, nu, de, opt, rng.derive("cv-" + tag))
        : select_width(de, opt.ratio_width, rng.derive("width"));
    const auto centers =
      choose_centers(nu, opt.max_centers, rng.derive("centers-" + tag));
    return fit_ratio(opt.method, nu, de, centers, kernel, opt);
  };

  typename CondProbEstimate<Scalar>::RatioParts parts{ fit_class(1),
                                                       fit_class(-1) };
  const auto eps = static_cast<Scalar>(opt.epsilon);
  CondProbEstimate<Scalar> tmp(opt.method, prior, eps, parts,
                               Vector<Scalar>::Zero(train.size()));
  Vector<Scalar> values = tmp.positive(de);
  return CondProbEstimate<Scalar>(opt.method, prior, eps, std::move(parts),
                                  std::move(values));
}

//! Dispatches on `opt.method`.
template <typename Scalar>
CondProbEstimate<Scalar>
estimate_posterior(const LabeledDataset<Scalar>& train,
                   const PosteriorOptions& opt,
                   SeededRng rng)
{
  switch (opt.method) {
    case PosteriorMethod::kde: {
      detail::require_both_classes(train);
      const auto kernel =
        select_width(train.features(), opt.kde_width, rng.derive("width"));
      return cond_prob_kde(train, kernel, static_cast<Scalar>(opt.epsilon));
    }
    case PosteriorMethod::kliep:
    case PosteriorMethod::lsif:
      return cond_prob_ratio(train, opt, rng);
    case PosteriorMethod::given:
      break;
  }
  throw std::invalid_argument("a given posterior cannot be estimated");
}

inline std::string
to_string(PosteriorMethod m)
{
  switch (m) {
    case PosteriorMethod::kde:
      return "kde";
    case PosteriorMethod::kliep:
      return "kliep";
    case PosteriorMethod::lsif:
      return "lsif";
    case PosteriorMethod::given:
      return "given";
  }
  return "?";
}

inline PosteriorMethod
parse_posterior_method(const std::string& s)
{
  if (s == "kde")
    return PosteriorMethod::kde;
  if (s == "kliep")
    return PosteriorMethod::kliep;
  if (s == "lsif")
    return PosteriorMethod::lsif;
  throw std::invalid_argument("unknown posterior method '" + s +
                              "' (expected kde, kliep, lsif)");
}

} // namespace rcn
