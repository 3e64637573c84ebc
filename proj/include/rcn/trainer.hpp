#pragma once

#include "dataset.hpp"
#include "errors.hpp"
#include "kernels.hpp"
#include "losses.hpp"
#include "model.hpp"
#include "types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcn {

struct TrainConfig
{
  double lambda = 1e-3;
  double initial_step = 1.0;
  int max_iter = 1000;
  //! Relative objective change that counts as converged.
  double tol = 1e-7;
  //! Armijo sufficient-decrease constant.
  double armijo = 1e-4;

  void validate() const
  {
    if (!(lambda >= 0))
      throw std::invalid_argument("regularisation must be nonnegative");
    if (!(tol > 0))
      throw std::invalid_argument("tolerance must be positive");
    if (max_iter < 1)
      throw std::invalid_argument("max_iter must be at least 1");
  }
};

struct ModelSpec
{
  ModelKind kind = ModelKind::linear;
  double kernel_width = 1.0;
};

template <typename Scalar = double>
struct TrainResult
{
  ClassifierModel<Scalar> model;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  //! The per-example objective is not convex in the decision value.
  bool nonconvex = false;
  //! Objective after each accepted step, starting from the initial model.
  std::vector<double> trace;
};

namespace detail {

//! Full-batch (sub)gradient descent with Armijo backtracking on
//! (1/n) sum_i loss_i(f(x_i)) + (lambda/2) |f|^2, starting from f = 0.
//!
//! `loss_i` is given by `value(i, t)` and `grad(i, t)`. Kernel models use
//! the RKHS gradient (coefficient step g/n + lambda c) whose directional
//! derivative is d'Kd, so the Gram matrix is never inverted. Every accepted
//! step lowers the objective.
template <typename Scalar, typename PerExample>
TrainResult<Scalar>
minimize_risk(const Matrix<Scalar>& x,
              const PerExample& loss,
              const ModelSpec& spec,
              const TrainConfig& cfg)
{
  cfg.validate();
  const Index n = x.rows();
  if (n < 1)
    throw std::invalid_argument("training set is empty");
  const auto inv_n = Scalar(1) / static_cast<Scalar>(n);
  const auto lambda = static_cast<Scalar>(cfg.lambda);
  const bool kernel = spec.kind == ModelKind::kernel;

  Matrix<Scalar> k;
  GaussianKernel<Scalar> kern(static_cast<Scalar>(spec.kernel_width));
  if (kernel)
    k = gram(x, x, kern);

  // Linear: theta = w (m). Kernel: theta = c (n). Bias kept apart.
  Vector<Scalar> theta = Vector<Scalar>::Zero(kernel ? n : x.cols());
  Scalar bias = 0;

  auto decision = [&](const Vector<Scalar>& th, Scalar b) -> Vector<Scalar> {
    return ((kernel ? k * th : x * th).array() + b).matrix();
  };
  auto regulariser = [&](const Vector<Scalar>& th) -> Scalar {
    return kernel ? th.dot(k * th) : th.squaredNorm();
  };
  auto objective = [&](const Vector<Scalar>& f, const Vector<Scalar>& th) {
    Scalar s = 0;
    for (Index i = 0; i < n; ++i)
      s += loss.value(i, f(i));
    return s * inv_n + lambda / 2 * regulariser(th);
  };

  Vector<Scalar> f = decision(theta, bias);
  Scalar obj = objective(f, theta);
  std::vector<double> trace{ static_cast<double>(obj) };
  if (!std::isfinite(static_cast<double>(obj)))
    throw TrainingError("initial objective is not finite", trace);

  Scalar step = static_cast<Scalar>(cfg.initial_step);
  bool converged = false;
  int iter = 0;
  Vector<Scalar> g(n);
  for (; iter < cfg.max_iter; ++iter) {
    for (Index i = 0; i < n; ++i)
      g(i) = loss.grad(i, f(i)) * inv_n;
    Vector<Scalar> dir;
    Scalar slope;
    if (kernel) {
      dir = g + lambda * theta;
      slope = dir.dot(k * dir);
    } else {
      dir = x.transpose() * g + lambda * theta;
      slope = dir.squaredNorm();
    }
    const Scalar dbias = g.sum();
    slope += dbias * dbias;
    if (!(slope > Scalar(1e-30))) {
      converged = true;
      break;
    }

    bool accepted = false;
    Vector<Scalar> cand_theta, cand_f;
    Scalar cand_bias = 0, cand_obj = 0;
    while (step > Scalar(1e-14)) {
      cand_theta = theta - step * dir;
      cand_bias = bias - step * dbias;
      cand_f = decision(cand_theta, cand_bias);
      cand_obj = objective(cand_f, cand_theta);
      if (!std::isfinite(static_cast<double>(cand_obj))) {
        trace.push_back(static_cast<double>(cand_obj));
        throw TrainingError("training objective diverged", trace);
      }
      if (cand_obj <= obj - static_cast<Scalar>(cfg.armijo) * step * slope) {
        accepted = true;
        break;
      }
      step /= 2;
    }
    if (!accepted) {
      // no sufficient decrease along the (sub)gradient at any step size
      converged = true;
      break;
    }
    const Scalar change = obj - cand_obj;
    theta = std::move(cand_theta);
    bias = cand_bias;
    f = std::move(cand_f);
    obj = cand_obj;
    trace.push_back(static_cast<double>(obj));
    step *= 2;
    if (change <= static_cast<Scalar>(cfg.tol) * std::max(Scalar(1), std::abs(obj))) {
      converged = true;
      ++iter;
      break;
    }
  }

  ClassifierModel<Scalar> model =
    kernel ? ClassifierModel<Scalar>(KernelModel<Scalar>{ x, theta, kern, bias })
           : ClassifierModel<Scalar>(LinearModel<Scalar>{ theta, bias });
  return { std::move(model), static_cast<double>(obj), iter, converged, false,
           std::move(trace) };
}

inline void
require_trainable(Loss loss)
{
  if (loss == Loss::zero_one)
    throw std::invalid_argument("the zero-one loss is for evaluation only");
}

template <typename Scalar>
struct WeightedLoss
{
  Loss loss;
  const Labels& y;
  const Vector<Scalar>& w;
  Scalar value(Index i, Scalar t) const
  {
    return w(i) == 0 ? Scalar(0) : w(i) * loss_value(loss, t, y(i));
  }
  Scalar grad(Index i, Scalar t) const
  {
    return w(i) == 0 ? Scalar(0) : w(i) * loss_grad(loss, t, y(i));
  }
};

} // namespace detail

//! Minimises (1/n) sum beta_i l(f(x_i), y_i) + (lambda/2) |f|^2.
template <typename Scalar>
TrainResult<Scalar>
train_weighted_erm(const LabeledDataset<Scalar>& train,
                   const Vector<Scalar>& weights,
                   Loss loss,
                   const ModelSpec& spec = {},
                   const TrainConfig& cfg = {})
{
  detail::require_trainable(loss);
  if (weights.size() != train.size())
    throw std::invalid_argument("weight count differs from example count");
  if ((weights.array() < 0).any() || !weights.allFinite())
    throw std::invalid_argument("weights must be finite and nonnegative");
  detail::WeightedLoss<Scalar> per{ loss, train.labels(), weights };
  auto res = detail::minimize_risk(train.features(), per, spec, cfg);
  res.nonconvex = !is_convex(loss);
  return res;
}

//! Ordinary regularised ERM: weights all one.
template <typename Scalar>
TrainResult<Scalar>
train_erm(const LabeledDataset<Scalar>& train,
          Loss loss,
          const ModelSpec& spec = {},
          const TrainConfig& cfg = {})
{
  return train_weighted_erm(train, Vector<Scalar>::Ones(train.size()).eval(),
                            loss, spec, cfg);
}

//! Noise-corrected loss
//! ((1 - rho_{-y}) l(t, y) - rho_y l(t, -y)) / (1 - rho_+ - rho_-),
//! whose expectation over label flips equals the clean loss.
template <typename Scalar>
Scalar
unbiased_loss_value(Loss loss, Scalar t, int y, const NoisePair& rates)
{
  const auto denom = static_cast<Scalar>(1 - rates.rho_plus - rates.rho_minus);
  return (static_cast<Scalar>(1 - rates.opposite(y)) * loss_value(loss, t, y) -
          static_cast<Scalar>(rates.of(y)) * loss_value(loss, t, -y)) /
         denom;
}

template <typename Scalar>
Scalar
unbiased_loss_grad(Loss loss, Scalar t, int y, const NoisePair& rates)
{
  const auto denom = static_cast<Scalar>(1 - rates.rho_plus - rates.rho_minus);
  return (static_cast<Scalar>(1 - rates.opposite(y)) * loss_grad(loss, t, y) -
          static_cast<Scalar>(rates.of(y)) * loss_grad(loss, t, -y)) /
         denom;
}

//! ERM on the unbiased noise-corrected loss. The corrected hinge loss is not
//! convex; the result is flagged and the descent still only accepts
//! decreasing steps.
template <typename Scalar>
TrainResult<Scalar>
train_unbiased(const LabeledDataset<Scalar>& train,
               const NoisePair& rates,
               Loss loss,
               const ModelSpec& spec = {},
               const TrainConfig& cfg = {})
{
  detail::require_trainable(loss);
  rates.validate();
  struct PerExample
  {
    Loss loss;
    const Labels& y;
    NoisePair rates;
    Scalar value(Index i, Scalar t) const
    {
      return unbiased_loss_value(loss, t, y(i), rates);
    }
    Scalar grad(Index i, Scalar t) const
    {
      return unbiased_loss_grad(loss, t, y(i), rates);
    }
  } per{ loss, train.labels(), rates };
  auto res = detail::minimize_risk(train.features(), per, spec, cfg);
  res.nonconvex = !is_convex(loss) || loss == Loss::hinge;
  return res;
}

//! alpha = (1 - rho_+ + rho_-) / 2 for the label-dependent cost model.
inline double
label_dependent_alpha(const NoisePair& rates)
{
  return (1.0 - rates.rho_plus + rates.rho_minus) / 2.0;
}

//! Per-example costs: 1 - alpha on positives, alpha on negatives.
template <typename Scalar = double>
Vector<Scalar>
label_dependent_costs(const Labels& labels, const NoisePair& rates)
{
  const auto alpha = static_cast<Scalar>(label_dependent_alpha(rates));
  Vector<Scalar> c(labels.size());
  for (Index i = 0; i < labels.size(); ++i)
    c(i) = labels(i) > 0 ? 1 - alpha : alpha;
  return c;
}

//! ERM with label-dependent costs. The costs are doubled so that zero
//! rates (alpha = 1/2) reproduce plain ERM exactly under the same
//! regulariser.
template <typename Scalar>
TrainResult<Scalar>
train_label_dependent(const LabeledDataset<Scalar>& train,
                      const NoisePair& rates,
                      Loss loss,
                      const ModelSpec& spec = {},
                      const TrainConfig& cfg = {})
{
  rates.validate();
  const Vector<Scalar> costs =
    2 * label_dependent_costs<Scalar>(train.labels(), rates);
  return train_weighted_erm(train, costs, loss, spec, cfg);
}

} // namespace rcn
