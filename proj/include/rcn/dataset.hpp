#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcn {

//! Class-conditional flip probabilities.
//! rho_plus = P(observed -1 | clean +1), rho_minus = P(observed +1 | clean -1).
struct NoisePair
{
  double rho_plus = 0.0;
  double rho_minus = 0.0;

  bool valid() const
  {
    return rho_plus >= 0.0 && rho_plus < 1.0 && rho_minus >= 0.0 &&
           rho_minus < 1.0 && rho_plus + rho_minus < 1.0;
  }

  void validate() const
  {
    if (!valid())
      throw std::invalid_argument(
        "invalid noise rates (" + std::to_string(rho_plus) + ", " +
        std::to_string(rho_minus) +
        "): each must lie in [0, 1) and their sum must be below 1");
  }

  //! Flip rate of the class opposite to `label`, i.e. rho_{-label}.
  double opposite(int label) const { return label > 0 ? rho_minus : rho_plus; }
  //! Flip rate of `label` itself, rho_{label}.
  double of(int label) const { return label > 0 ? rho_plus : rho_minus; }

  bool operator==(const NoisePair&) const = default;
};

//! Inversed rates: pi_plus = P(clean -1 | observed +1),
//! pi_minus = P(clean +1 | observed -1).
struct InversedRates
{
  double pi_plus = 0.0;
  double pi_minus = 0.0;

  void validate() const
  {
    if (!(pi_plus >= 0.0 && pi_minus >= 0.0 && pi_plus + pi_minus <= 1.0))
      throw std::invalid_argument(
        "invalid inversed noise rates: each must be >= 0 and their sum <= 1");
  }

  double opposite(int label) const { return label > 0 ? pi_minus : pi_plus; }
};

//! Feature matrix with index-aligned +/-1 labels.
template <typename Scalar = double>
class LabeledDataset
{
public:
  LabeledDataset() = default;

  LabeledDataset(Matrix<Scalar> features, Labels labels)
    : features_(std::move(features))
    , labels_(std::move(labels))
  {
    if (features_.rows() < 1 || features_.cols() < 1)
      throw std::invalid_argument("dataset needs at least one row and column");
    if (features_.rows() != labels_.size())
      throw std::invalid_argument("feature rows and labels differ in count");
    for (Index i = 0; i < labels_.size(); ++i)
      if (labels_(i) != 1 && labels_(i) != -1)
        throw std::invalid_argument("label at row " + std::to_string(i) +
                                    " is not -1 or +1");
  }

  const Matrix<Scalar>& features() const { return features_; }
  const Labels& labels() const { return labels_; }
  Index size() const { return labels_.size(); }
  Index dim() const { return features_.cols(); }
  bool empty() const { return labels_.size() == 0; }

  Index count(int label) const { return (labels_.array() == label).count(); }

  LabeledDataset with_labels(Labels labels) const
  {
    return LabeledDataset(features_, std::move(labels));
  }

  LabeledDataset subset(const std::vector<Index>& rows) const
  {
    Matrix<Scalar> x(static_cast<Index>(rows.size()), dim());
    Labels y(static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      x.row(static_cast<Index>(k)) = features_.row(rows[k]);
      y(static_cast<Index>(k)) = labels_(rows[k]);
    }
    return LabeledDataset(std::move(x), std::move(y));
  }

  //! Rows carrying `label`.
  Matrix<Scalar> points_with(int label) const
  {
    std::vector<Index> rows;
    for (Index i = 0; i < size(); ++i)
      if (labels_(i) == label)
        rows.push_back(i);
    Matrix<Scalar> x(static_cast<Index>(rows.size()), dim());
    for (std::size_t k = 0; k < rows.size(); ++k)
      x.row(static_cast<Index>(k)) = features_.row(rows[k]);
    return x;
  }

private:
  Matrix<Scalar> features_;
  Labels labels_;
};

using Dataset = LabeledDataset<double>;

//! Uniform points on the unit cube, labelled by the side of the hyperplane
//! sum(x) = m/2 they fall on (ties go to +1). Classes are balanced.
template <typename Scalar = double>
LabeledDataset<Scalar>
generate_synthetic(Index n, Index m, SeededRng rng)
{
  if (n < 1 || m < 1)
    throw std::invalid_argument("synthetic data needs n >= 1 and m >= 1");
  Matrix<Scalar> x(n, m);
  Labels y(n);
  const Scalar half = static_cast<Scalar>(m) / 2;
  for (Index i = 0; i < n; ++i) {
    Scalar s = 0;
    for (Index j = 0; j < m; ++j) {
      x(i, j) = static_cast<Scalar>(rng.uniform());
      s += x(i, j);
    }
    y(i) = (s - half >= 0) ? 1 : -1;
  }
  return LabeledDataset<Scalar>(std::move(x), std::move(y));
}

//! Flips each label independently under the asymmetric noise model.
//! One uniform draw is consumed per example whatever the outcome.
template <typename Scalar>
LabeledDataset<Scalar>
corrupt_labels(const LabeledDataset<Scalar>& data,
               const NoisePair& noise,
               SeededRng rng)
{
  noise.validate();
  Labels y = data.labels();
  for (Index i = 0; i < y.size(); ++i) {
    const double u = rng.uniform();
    if (u < noise.of(y(i)))
      y(i) = -y(i);
  }
  return data.with_labels(std::move(y));
}

template <typename Scalar>
struct Split
{
  LabeledDataset<Scalar> train;
  LabeledDataset<Scalar> test;
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
};

//! Random partition with round(train_frac * n) training rows. Row order
//! inside each side follows the original order.
template <typename Scalar>
Split<Scalar>
split(const LabeledDataset<Scalar>& data, double train_frac, SeededRng rng)
{
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  const Index n = data.size();
  const auto n_train = static_cast<Index>(std::lround(train_frac * n));
  if (n_train < 1 || n_train >= n)
    throw std::invalid_argument("split of " + std::to_string(n) +
                                " rows leaves an empty side");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{ 0 });
  rng.shuffle(perm.begin(), perm.end());
  std::vector<Index> tr(perm.begin(), perm.begin() + n_train);
  std::vector<Index> te(perm.begin() + n_train, perm.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  auto train = data.subset(tr);
  auto test = data.subset(te);
  return { std::move(train), std::move(test), std::move(tr), std::move(te) };
}

//! Assigns rows to `folds` groups of near-equal size in a seeded order.
inline std::vector<std::vector<Index>>
fold_indices(Index n, int folds, SeededRng rng)
{
  if (folds < 2 || folds > n)
    throw std::invalid_argument("fold count must lie in [2, n]");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{ 0 });
  rng.shuffle(perm.begin(), perm.end());
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(folds));
  for (std::size_t k = 0; k < perm.size(); ++k)
    out[k % static_cast<std::size_t>(folds)].push_back(perm[k]);
  for (auto& f : out)
    std::sort(f.begin(), f.end());
  return out;
}

} // namespace rcn
