#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rcn {

enum class Loss
{
  logistic,
  hinge,
  square,
  asymmetric_exponential,
  zero_one
};

//! Surrogate loss l(t, y) for decision value t and label y in {-1, +1}.
template <typename Scalar>
Scalar
loss_value(Loss loss, Scalar t, int y)
{
  const Scalar yt = static_cast<Scalar>(y) * t;
  switch (loss) {
    case Loss::logistic: {
      // log(1 + exp(-yt)) without overflow
      const Scalar z = -yt;
      return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    case Loss::hinge:
      return yt < 1 ? 1 - yt : Scalar(0);
    case Loss::square: {
      const Scalar d = t - static_cast<Scalar>(y);
      return d * d;
    }
    case Loss::asymmetric_exponential:
      return t <= 0 ? std::exp(-2 * yt) : std::exp(-yt);
    case Loss::zero_one:
      return ((t >= 0 ? 1 : -1) != y) ? Scalar(1) : Scalar(0);
  }
  return 0;
}

//! d l(t, y) / dt. Hinge uses the subgradient 0 at the kink; zero-one is
//! flat almost everywhere and returns 0.
template <typename Scalar>
Scalar
loss_grad(Loss loss, Scalar t, int y)
{
  const auto ys = static_cast<Scalar>(y);
  const Scalar yt = ys * t;
  switch (loss) {
    case Loss::logistic:
      return -ys / (1 + std::exp(yt));
    case Loss::hinge:
      return yt < 1 ? -ys : Scalar(0);
    case Loss::square:
      return 2 * (t - ys);
    case Loss::asymmetric_exponential:
      return t <= 0 ? -2 * ys * std::exp(-2 * yt) : -ys * std::exp(-yt);
    case Loss::zero_one:
      return 0;
  }
  return 0;
}

//! Losses that are convex in t for both labels.
inline bool
is_convex(Loss loss)
{
  return loss == Loss::logistic || loss == Loss::hinge || loss == Loss::square;
}

inline std::string
to_string(Loss loss)
{
  switch (loss) {
    case Loss::logistic:
      return "logistic";
    case Loss::hinge:
      return "hinge";
    case Loss::square:
      return "square";
    case Loss::asymmetric_exponential:
      return "asym-exp";
    case Loss::zero_one:
      return "zero-one";
  }
  return "?";
}

inline Loss
parse_loss(const std::string& s)
{
  if (s == "logistic")
    return Loss::logistic;
  if (s == "hinge")
    return Loss::hinge;
  if (s == "square")
    return Loss::square;
  if (s == "asym-exp")
    return Loss::asymmetric_exponential;
  if (s == "zero-one")
    return Loss::zero_one;
  throw std::invalid_argument(
    "unknown loss '" + s +
    "' (expected logistic, hinge, square, asym-exp, zero-one)");
}

} // namespace rcn
