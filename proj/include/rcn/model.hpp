#pragma once

#include "kernels.hpp"
#include "types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

namespace rcn {

enum class ModelKind
{
  linear,
  kernel
};

inline std::string
to_string(ModelKind k)
{
  return k == ModelKind::linear ? "linear" : "kernel";
}

inline ModelKind
parse_model_kind(const std::string& s)
{
  if (s == "linear")
    return ModelKind::linear;
  if (s == "kernel")
    return ModelKind::kernel;
  throw std::invalid_argument("unknown model kind '" + s +
                              "' (expected linear, kernel)");
}

//! f(x) = w.x + b
template <typename Scalar = double>
struct LinearModel
{
  Vector<Scalar> weights;
  Scalar bias = 0;
};

//! f(x) = sum_i c_i k(x, s_i) + b over the training inputs s_i.
template <typename Scalar = double>
struct KernelModel
{
  Matrix<Scalar> support;
  Vector<Scalar> coefficients;
  GaussianKernel<Scalar> kernel;
  Scalar bias = 0;
};

//! Decision function with sign prediction, sign(0) = +1.
template <typename Scalar = double>
class ClassifierModel
{
public:
  using Variant = std::variant<LinearModel<Scalar>, KernelModel<Scalar>>;

  explicit ClassifierModel(LinearModel<Scalar> m)
    : model_(std::move(m))
  {}
  explicit ClassifierModel(KernelModel<Scalar> m)
    : model_(std::move(m))
  {
    const auto& k = std::get<KernelModel<Scalar>>(model_);
    if (k.support.rows() != k.coefficients.size())
      throw std::invalid_argument("support and coefficient counts differ");
  }

  static ClassifierModel zero(Index dim)
  {
    return ClassifierModel(LinearModel<Scalar>{ Vector<Scalar>::Zero(dim), 0 });
  }

  ModelKind kind() const
  {
    return std::holds_alternative<LinearModel<Scalar>>(model_) ? ModelKind::linear
                                                               : ModelKind::kernel;
  }

  Index dim() const
  {
    if (auto* lin = std::get_if<LinearModel<Scalar>>(&model_))
      return lin->weights.size();
    return std::get<KernelModel<Scalar>>(model_).support.cols();
  }

  const Variant& variant() const { return model_; }
  const LinearModel<Scalar>& linear() const
  {
    return std::get<LinearModel<Scalar>>(model_);
  }
  const KernelModel<Scalar>& kernel() const
  {
    return std::get<KernelModel<Scalar>>(model_);
  }

  template <typename D>
  Vector<Scalar> decision_values(const Eigen::MatrixBase<D>& x) const
  {
    if (x.cols() != dim())
      throw std::invalid_argument("input dimension " + std::to_string(x.cols()) +
                                  " differs from model dimension " +
                                  std::to_string(dim()));
    if (auto* lin = std::get_if<LinearModel<Scalar>>(&model_))
      return (x * lin->weights).array() + lin->bias;
    const auto& k = std::get<KernelModel<Scalar>>(model_);
    return (gram(x, k.support, k.kernel) * k.coefficients).array() + k.bias;
  }

  template <typename D>
  Labels predict(const Eigen::MatrixBase<D>& x) const
  {
    const Vector<Scalar> f = decision_values(x);
    Labels y(f.size());
    for (Index i = 0; i < f.size(); ++i)
      y(i) = f(i) >= 0 ? 1 : -1;
    return y;
  }

private:
  Variant model_;
};

template <typename Scalar, typename D>
Vector<Scalar>
decision_values(const ClassifierModel<Scalar>& model,
                const Eigen::MatrixBase<D>& x)
{
  return model.decision_values(x);
}

template <typename Scalar, typename D>
Labels
predict(const ClassifierModel<Scalar>& model, const Eigen::MatrixBase<D>& x)
{
  return model.predict(x);
}

//! Training metadata written alongside a model.
struct ModelInfo
{
  std::string method = "plain";
  std::string loss = "logistic";
  bool converged = true;
  bool nonconvex = false;
  int iterations = 0;
  double objective = 0.0;
};

//! Plain-text model form:
//!
//!     rcn-model 1
//!     kind linear|kernel
//!     dim <m>
//!     bias <b>
//!     meta <key> <value>          (zero or more)
//!     weights <w_1> ... <w_m>     (linear)
//!     width <w>                   (kernel)
//!     support <n>                 (kernel, then n lines "<c_i> <x_i1> ... <x_im>")
void
save_model(std::ostream& out,
           const ClassifierModel<double>& model,
           const ModelInfo& info = {});
ClassifierModel<double>
load_model(std::istream& in, ModelInfo* info = nullptr);

} // namespace rcn
