#pragma once

#include "dataset.hpp"
#include "model.hpp"

#include <stdexcept>

namespace rcn {

//! Fraction of examples whose predicted sign matches the label.
template <typename Scalar>
double
accuracy(const ClassifierModel<Scalar>& model, const LabeledDataset<Scalar>& test)
{
  if (test.size() == 0)
    throw std::invalid_argument("accuracy of an empty test set is undefined");
  const Labels pred = model.predict(test.features());
  return static_cast<double>((pred.array() == test.labels().array()).count()) /
         static_cast<double>(test.size());
}

} // namespace rcn
