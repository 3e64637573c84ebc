#pragma once

#include "dataset.hpp"
#include "types.hpp"

#include <stdexcept>

namespace rcn {

//! Importance weights from the noisy posterior and flip rates:
//! beta = (P(y_obs|x) - rho_{-y_obs}) / ((1 - rho_+ - rho_-) P(y_obs|x)).
//!
//! `observed_posterior(i)` is the posterior of example i's own observed
//! label. A negative numerator (posterior below the rate, which only happens
//! under estimation error) and a zero posterior both give weight 0.
template <typename Scalar>
Vector<Scalar>
compute_beta(const Labels& labels,
             const Vector<Scalar>& observed_posterior,
             const NoisePair& rates)
{
  if (!(rates.rho_plus >= 0 && rates.rho_minus >= 0 &&
        rates.rho_plus + rates.rho_minus < 1))
    throw std::invalid_argument(
      "importance weights need nonnegative rates summing below 1");
  if (labels.size() != observed_posterior.size())
    throw std::invalid_argument("labels and posteriors differ in length");
  const auto scale = static_cast<Scalar>(1 - rates.rho_plus - rates.rho_minus);
  Vector<Scalar> beta(labels.size());
  for (Index i = 0; i < labels.size(); ++i) {
    const Scalar p = observed_posterior(i);
    if (!(p >= 0 && p <= 1))
      throw std::invalid_argument("posterior outside [0, 1]");
    if (p == 0) {
      beta(i) = 0;
      continue;
    }
    const Scalar num = p - static_cast<Scalar>(rates.opposite(labels(i)));
    beta(i) = num > 0 ? num / (scale * p) : Scalar(0);
  }
  return beta;
}

//! Weights from the inversed rates:
//! beta = ((1 - pi_- - pi_+) P(y_obs|x) + pi_{-y_obs}) / P(y_obs|x),
//! with beta = 0 where the posterior is 0.
template <typename Scalar>
Vector<Scalar>
compute_beta_inversed(const Labels& labels,
                      const Vector<Scalar>& observed_posterior,
                      const InversedRates& inversed)
{
  inversed.validate();
  if (labels.size() != observed_posterior.size())
    throw std::invalid_argument("labels and posteriors differ in length");
  const auto scale = static_cast<Scalar>(1 - inversed.pi_plus - inversed.pi_minus);
  Vector<Scalar> beta(labels.size());
  for (Index i = 0; i < labels.size(); ++i) {
    const Scalar p = observed_posterior(i);
    if (!(p >= 0 && p <= 1))
      throw std::invalid_argument("posterior outside [0, 1]");
    beta(i) = p == 0 ? Scalar(0)
                     : (scale * p + static_cast<Scalar>(inversed.opposite(labels(i)))) / p;
  }
  return beta;
}

} // namespace rcn
