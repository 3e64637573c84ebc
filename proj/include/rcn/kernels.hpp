#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcn {

//! Gaussian RBF kernel exp(-|x1 - x2|^2 / (2 width^2)).
template <typename Scalar = double>
class GaussianKernel
{
public:
  explicit GaussianKernel(Scalar width = 1)
    : width_(width)
  {
    if (!(width > 0) || !std::isfinite(static_cast<double>(width)))
      throw std::invalid_argument("kernel width must be positive and finite");
  }

  Scalar width() const { return width_; }

  //! Value for a squared distance.
  Scalar from_sq_dist(Scalar d2) const
  {
    return std::exp(-d2 / (2 * width_ * width_));
  }

  template <typename D1, typename D2>
  Scalar operator()(const Eigen::MatrixBase<D1>& x1,
                    const Eigen::MatrixBase<D2>& x2) const
  {
    if (x1.size() != x2.size())
      throw std::invalid_argument("kernel arguments differ in dimension");
    Scalar d2 = 0;
    for (Index j = 0; j < x1.size(); ++j) {
      const Scalar d = x1(j) - x2(j);
      d2 += d * d;
    }
    return from_sq_dist(d2);
  }

private:
  Scalar width_;
};

//! Squared Euclidean distances between the rows of `a` and `b`.
//! Differences are formed explicitly, so entry (i,j) is bit-identical to
//! entry (j,i) of the swapped call and the diagonal of a self-call is 0.
template <typename DA, typename DB>
Matrix<typename DA::Scalar>
sq_distances(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b)
{
  using Scalar = typename DA::Scalar;
  if (a.cols() != b.cols())
    throw std::invalid_argument("point sets differ in dimension");
  Matrix<Scalar> d(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.rows(); ++j) {
      Scalar s = 0;
      for (Index k = 0; k < a.cols(); ++k) {
        const Scalar t = a(i, k) - b(j, k);
        s += t * t;
      }
      d(i, j) = s;
    }
  return d;
}

//! Gram matrix with entry (i,j) = k(a_i, b_j).
template <typename DA, typename DB, typename Scalar>
Matrix<Scalar>
gram(const Eigen::MatrixBase<DA>& a,
     const Eigen::MatrixBase<DB>& b,
     const GaussianKernel<Scalar>& k)
{
  Matrix<Scalar> g = sq_distances(a, b);
  const Scalar c = Scalar(-1) / (2 * k.width() * k.width());
  g = (g.array() * c).exp().matrix();
  return g;
}

//! How a kernel width is chosen from data.
struct WidthRule
{
  enum class Kind
  {
    stddev,          //!< pooled per-coordinate population standard deviation
    median,          //!< median pairwise distance
    fixed,           //!< `value` as given
    cross_validated  //!< likelihood cross-validation (ratio fitting only)
  };
  Kind kind = Kind::stddev;
  double value = 1.0;

  static WidthRule stddev() { return { Kind::stddev, 0.0 }; }
  static WidthRule median() { return { Kind::median, 0.0 }; }
  static WidthRule fixed(double w) { return { Kind::fixed, w }; }
  static WidthRule cross_validated() { return { Kind::cross_validated, 0.0 }; }
};

//! sqrt of the mean over coordinates of the 1/n variance.
template <typename D>
typename D::Scalar
pooled_stddev(const Eigen::MatrixBase<D>& points)
{
  using Scalar = typename D::Scalar;
  const auto n = static_cast<Scalar>(points.rows());
  Scalar acc = 0;
  for (Index j = 0; j < points.cols(); ++j) {
    const Scalar mean = points.col(j).sum() / n;
    acc += (points.col(j).array() - mean).square().sum() / n;
  }
  return std::sqrt(acc / static_cast<Scalar>(points.cols()));
}

//! Median pairwise distance over at most `max_points` rows (seeded subsample
//! when there are more). Even counts average the two middle values.
template <typename D>
typename D::Scalar
median_pairwise_distance(const Eigen::MatrixBase<D>& points,
                         Index max_points = 1000,
                         SeededRng rng = SeededRng(0))
{
  using Scalar = typename D::Scalar;
  std::vector<Index> rows(static_cast<std::size_t>(points.rows()));
  std::iota(rows.begin(), rows.end(), Index{ 0 });
  if (points.rows() > max_points) {
    rng.shuffle(rows.begin(), rows.end());
    rows.resize(static_cast<std::size_t>(max_points));
    std::sort(rows.begin(), rows.end());
  }
  std::vector<Scalar> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j)
      dist.push_back((points.row(rows[i]) - points.row(rows[j])).norm());
  if (dist.empty())
    return 0;
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + mid, dist.end());
  Scalar med = dist[mid];
  if (dist.size() % 2 == 0) {
    const Scalar lower = *std::max_element(dist.begin(), dist.begin() + mid);
    med = (med + lower) / 2;
  }
  return med;
}

//! Picks a kernel width. Data-driven rules need two or more distinct points.
//! Cross-validated widths are a ratio-fitting concern; see density.hpp.
template <typename D>
GaussianKernel<typename D::Scalar>
select_width(const Eigen::MatrixBase<D>& points,
             const WidthRule& rule,
             SeededRng rng = SeededRng(0))
{
  using Scalar = typename D::Scalar;
  if (rule.kind == WidthRule::Kind::fixed)
    return GaussianKernel<Scalar>(static_cast<Scalar>(rule.value));
  if (rule.kind == WidthRule::Kind::cross_validated)
    throw std::invalid_argument(
      "cross-validated widths are selected by the ratio fitter");
  if (points.rows() < 2)
    throw std::invalid_argument("width selection needs at least two points");
  const Scalar w = rule.kind == WidthRule::Kind::stddev
                     ? pooled_stddev(points)
                     : median_pairwise_distance(points, 1000, rng);
  if (!(w > 0))
    throw std::invalid_argument(
      "all points coincide; a data-driven kernel width is undefined");
  return GaussianKernel<Scalar>(w);
}

inline std::string
to_string(const WidthRule& rule)
{
  switch (rule.kind) {
    case WidthRule::Kind::stddev:
      return "stddev";
    case WidthRule::Kind::median:
      return "median";
    case WidthRule::Kind::cross_validated:
      return "cv";
    case WidthRule::Kind::fixed: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "fixed:%.17g", rule.value);
      return buf;
    }
  }
  return "?";
}

inline WidthRule
parse_width_rule(const std::string& text)
{
  if (text == "stddev")
    return WidthRule::stddev();
  if (text == "median")
    return WidthRule::median();
  if (text == "cv")
    return WidthRule::cross_validated();
  if (text.rfind("fixed:", 0) == 0) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 6 || !(v > 0))
      throw std::invalid_argument("bad fixed width in '" + text + "'");
    return WidthRule::fixed(v);
  }
  throw std::invalid_argument("unknown width rule '" + text +
                              "' (expected stddev, median, cv, fixed:<w>)");
}

} // namespace rcn
