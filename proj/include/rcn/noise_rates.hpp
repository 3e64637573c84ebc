#pragma once

#include "dataset.hpp"
#include "density.hpp"
#include "errors.hpp"
#include "losses.hpp"
#include "metrics.hpp"
#include "trainer.hpp"
#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace rcn {

struct RateEstimate
{
  enum class Provenance
  {
    min_posterior,
    quantile,
    cross_validation,
    given
  };

  double rho_plus_hat = 0.0;
  double rho_minus_hat = 0.0;
  Provenance provenance = Provenance::min_posterior;
  //! Quantile level for Provenance::quantile.
  double q = 0.0;
  std::vector<std::string> warnings;

  NoisePair pair() const { return { rho_plus_hat, rho_minus_hat }; }
};

inline std::string
to_string(const RateEstimate& e)
{
  switch (e.provenance) {
    case RateEstimate::Provenance::min_posterior:
      return "min-posterior";
    case RateEstimate::Provenance::quantile: {
      char buf[48];
      std::snprintf(buf, sizeof buf, "quantile(%g)", e.q);
      return buf;
    }
    case RateEstimate::Provenance::cross_validation:
      return "cross-validation";
    case RateEstimate::Provenance::given:
      return "given";
  }
  return "?";
}

//! P(observed +1 | x) = (1 - rho_+ - rho_-) P(+1 | x) + rho_-.
template <typename Scalar>
Vector<Scalar>
noisy_posterior(const Vector<Scalar>& clean_positive, const NoisePair& rates)
{
  rates.validate();
  const auto s = static_cast<Scalar>(1 - rates.rho_plus - rates.rho_minus);
  return (s * clean_positive.array() + static_cast<Scalar>(rates.rho_minus))
    .matrix();
}

namespace detail {

//! Clamps each rate to [0, 0.5] and rescales a pair summing to 1 or more
//! down to a sum of 0.98.
inline RateEstimate
finish_rates(double rho_plus, double rho_minus, RateEstimate::Provenance prov, double q)
{
  RateEstimate e;
  e.provenance = prov;
  e.q = q;
  e.rho_plus_hat = std::clamp(rho_plus, 0.0, 0.5);
  e.rho_minus_hat = std::clamp(rho_minus, 0.0, 0.5);
  const double sum = e.rho_plus_hat + e.rho_minus_hat;
  if (sum >= 1.0) {
    e.rho_plus_hat *= 0.98 / sum;
    e.rho_minus_hat *= 0.98 / sum;
    e.warnings.push_back("estimated rates summed to " + std::to_string(sum) +
                         "; rescaled to 0.98");
  }
  return e;
}

} // namespace detail

//! Lower empirical quantile: the value at sorted position ceil(q n) - 1,
//! floored at the first. q = 0 gives the minimum.
template <typename D>
typename D::Scalar
lower_quantile(const Eigen::MatrixBase<D>& values, double q)
{
  if (values.size() == 0)
    throw std::invalid_argument("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::vector<typename D::Scalar> v(values.derived().data(),
                                    values.derived().data() + values.size());
  const auto n = static_cast<double>(v.size());
  const auto k = std::max<long>(0, static_cast<long>(std::ceil(q * n)) - 1);
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[static_cast<std::size_t>(k)];
}

//! Rates from P(+1 | x_i) on the training points: rho_minus is the smallest
//! positive posterior, rho_plus the smallest negative posterior. Estimates
//! never exceed any posterior value they were computed from.
template <typename Scalar>
RateEstimate
estimate_rates(const Vector<Scalar>& positive_posterior)
{
  if (positive_posterior.size() == 0)
    throw std::invalid_argument("rate estimation needs a nonempty training set");
  const double rm = static_cast<double>(positive_posterior.minCoeff());
  const double rp = 1.0 - static_cast<double>(positive_posterior.maxCoeff());
  return detail::finish_rates(rp, rm, RateEstimate::Provenance::min_posterior, 0.0);
}

template <typename Scalar>
RateEstimate
estimate_rates(const CondProbEstimate<Scalar>& cond)
{
  return estimate_rates(cond.train_positive());
}

//! As estimate_rates with the minimum replaced by the lower q-quantile.
template <typename Scalar>
RateEstimate
estimate_rates_quantile(const Vector<Scalar>& positive_posterior, double q)
{
  if (!(q >= 0.0 && q <= 0.1))
    throw std::invalid_argument("rate quantile must lie in [0, 0.1]");
  if (positive_posterior.size() == 0)
    throw std::invalid_argument("rate estimation needs a nonempty training set");
  const Vector<Scalar> neg = (Scalar(1) - positive_posterior.array()).matrix();
  const double rm = static_cast<double>(lower_quantile(positive_posterior, q));
  const double rp = static_cast<double>(lower_quantile(neg, q));
  return detail::finish_rates(rp, rm, RateEstimate::Provenance::quantile, q);
}

template <typename Scalar>
RateEstimate
estimate_rates_quantile(const CondProbEstimate<Scalar>& cond, double q)
{
  return estimate_rates_quantile(cond.train_positive(), q);
}

//! {0, 0.05, ..., 0.45}^2 with pairs summing below 1.
inline std::vector<NoisePair>
default_rate_grid()
{
  std::vector<NoisePair> grid;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const NoisePair p{ 0.05 * i, 0.05 * j };
      if (p.rho_plus + p.rho_minus < 1.0)
        grid.push_back(p);
    }
  return grid;
}

//! Everything needed to fit an importance-reweighted classifier.
struct LearnerConfig
{
  Loss loss = Loss::logistic;
  ModelSpec model;
  TrainConfig train;
  PosteriorOptions posterior;
};

//! Importance-reweighted training with given rates and posterior.
template <typename Scalar>
TrainResult<Scalar>
train_reweighted(const LabeledDataset<Scalar>& train,
                 const CondProbEstimate<Scalar>& cond,
                 const NoisePair& rates,
                 const LearnerConfig& cfg)
{
  const Vector<Scalar> beta =
    compute_beta(train.labels(), cond.train_observed(train.labels()), rates);
  return train_weighted_erm(train, beta, cfg.loss, cfg.model, cfg.train);
}

//! Picks the grid pair whose reweighted classifier has the best mean
//! validation accuracy (against the observed labels) over seeded folds.
//! Posteriors are refitted on each fold's training part. Ties go to the
//! smaller rate sum, then the smaller (rho_plus, rho_minus). `scores`, when
//! given, receives the mean validation accuracy of every grid pair.
template <typename Scalar>
RateEstimate
cv_estimate_rates(const LabeledDataset<Scalar>& train,
                  const std::vector<NoisePair>& grid,
                  int folds,
                  const LearnerConfig& cfg,
                  SeededRng rng,
                  std::vector<double>* scores = nullptr)
{
  if (grid.empty())
    throw std::invalid_argument("rate grid is empty");
  if (folds < 2)
    throw std::invalid_argument("rate cross-validation needs at least 2 folds");
  for (const auto& p : grid)
    p.validate();

  const auto parts = fold_indices(train.size(), folds, rng.derive("folds"));
  std::vector<double> score(grid.size(), 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::vector<Index> rest;
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (j != k)
        rest.insert(rest.end(), parts[j].begin(), parts[j].end());
    std::sort(rest.begin(), rest.end());
    const auto fit = train.subset(rest);
    const auto val = train.subset(parts[k]);
    const std::string where = "rate cross-validation fold " + std::to_string(k);
    try {
      const auto cond = estimate_posterior(
        fit, cfg.posterior, rng.derive(k, "posterior"));
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto res = train_reweighted(fit, cond, grid[g], cfg);
        score[g] += accuracy(res.model, val);
      }
    } catch (const TrainingError& e) {
      throw TrainingError(where + ": " + e.what(), e.trace());
    } catch (const std::runtime_error& e) {
      throw EstimationError(where + ": " + e.what());
    }
  }

  if (scores) {
    scores->resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
      (*scores)[g] = score[g] / static_cast<double>(parts.size());
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const auto& a = grid[g];
    const auto& b = grid[best];
    if (score[g] > score[best] ||
        (score[g] == score[best] &&
         (a.rho_plus + a.rho_minus < b.rho_plus + b.rho_minus ||
          (a.rho_plus + a.rho_minus == b.rho_plus + b.rho_minus &&
           std::pair(a.rho_plus, a.rho_minus) < std::pair(b.rho_plus, b.rho_minus)))))
      best = g;
  }
  return detail::finish_rates(grid[best].rho_plus, grid[best].rho_minus,
                              RateEstimate::Provenance::cross_validation, 0.0);
}

} // namespace rcn
