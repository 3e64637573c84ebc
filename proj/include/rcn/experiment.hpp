#pragma once

#include "dataset.hpp"
#include "density.hpp"
#include "losses.hpp"
#include "model.hpp"
#include "noise_rates.hpp"
#include "trainer.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rcn {

enum class Method
{
  plain, //!< ERM on the noisy labels
  ld,    //!< label-dependent costs
  ub,    //!< unbiased loss correction
  iw,    //!< importance reweighting with the true rates
  iw_cv, //!< importance reweighting with cross-validated rates
  eiw    //!< importance reweighting with min-posterior rate estimates
};

std::string
to_string(Method m);
Method
parse_method(const std::string& s);

enum class RateMethod
{
  min_posterior,
  quantile,
  cv
};

std::string
to_string(RateMethod m);
RateMethod
parse_rate_method(const std::string& s);

//! Where the data of one experiment comes from.
struct DataSource
{
  std::string name;
  //! Synthetic hyperplane data of n points in m dimensions when path is empty.
  std::string path;
  Index n = 0;
  Index m = 0;

  bool synthetic() const { return path.empty(); }
  //! "synthetic:<n>x<m>" or a CSV path (relative paths resolved against
  //! `base_dir`).
  static DataSource parse(const std::string& text, const std::string& base_dir = "");
};

struct ExperimentSpec
{
  enum class Kind
  {
    classification,
    rates
  };

  std::string name = "experiment";
  Kind kind = Kind::classification;
  std::vector<DataSource> datasets;
  std::vector<NoisePair> noise_pairs;
  std::vector<Method> methods{ Method::plain, Method::iw };
  std::vector<Loss> losses{ Loss::logistic };
  ModelSpec model;
  int repetitions = 10;
  std::uint64_t seed = 0;
  double train_frac = 0.75;
  PosteriorOptions posterior;
  //! Use KDE up to `auto_kde_max_dim` dimensions and KLIEP above.
  bool posterior_auto = false;
  Index auto_kde_max_dim = 5;
  std::vector<NoisePair> rate_grid = default_rate_grid();
  int cv_folds = 3;
  TrainConfig train;
  std::vector<RateMethod> rate_methods{ RateMethod::min_posterior };
  double rate_quantile = 0.0;

  void validate() const;
  PosteriorOptions posterior_for(Index dim) const;
};

//! Mean and sample standard deviation over the finite entries.
struct Summary
{
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

Summary
summarize(const std::vector<double>& values);

struct ClassificationRow
{
  std::string dataset;
  NoisePair rates;
  Method method = Method::plain;
  Loss loss = Loss::logistic;
  ModelKind model_kind = ModelKind::linear;
  //! Test accuracy per repetition; NaN where that repetition failed.
  std::vector<double> accuracies;
  std::vector<std::string> errors;
};

struct RateRow
{
  std::string dataset;
  NoisePair rates;
  RateMethod method = RateMethod::min_posterior;
  PosteriorMethod posterior = PosteriorMethod::kde;
  std::vector<double> rho_plus_hat;
  std::vector<double> rho_minus_hat;
  std::vector<std::string> errors;
};

struct ResultTable
{
  ExperimentSpec::Kind kind = ExperimentSpec::Kind::classification;
  std::vector<ClassificationRow> classification;
  std::vector<RateRow> rates;
  //! Non-fatal messages in deterministic order.
  std::vector<std::string> warnings;
};

//! Splits, corrupts the training labels, trains every method and scores it
//! on the clean test labels, for every repetition, noise pair and loss.
//! Repetitions run on up to `jobs` threads; output does not depend on it.
ResultTable
run_classification_experiment(const ExperimentSpec& spec, int jobs = 1);

//! Corrupts each dataset and estimates the flip rates per repetition.
ResultTable
run_rate_experiment(const ExperimentSpec& spec, int jobs = 1);

ResultTable
run_experiment(const ExperimentSpec& spec, int jobs = 1);

//! CSV with 6 significant digits and a header line.
void
write_csv(std::ostream& out, const ResultTable& table);

//! Human-readable summary lines.
void
write_summary(std::ostream& out, const ResultTable& table);

Dataset
load_data(const DataSource& src, std::uint64_t seed);

struct RiskIdentityReport
{
  //! Weighted noisy risk minus clean risk, per repetition.
  std::vector<double> differences;
  double mean = 0.0;
  //! Half-width of a normal 95% interval for the mean difference.
  double ci_half_width = 0.0;
};

//! Compares the clean empirical risk of a fixed model with the
//! beta-weighted risk on corrupted copies of the same sample, where beta
//! comes from the exact clean posterior `clean_positive` = P(+1 | x_i)
//! and the true rates.
RiskIdentityReport
risk_identity_check(const Dataset& clean,
                    const Vector<double>& clean_positive,
                    const NoisePair& rates,
                    const ClassifierModel<double>& model,
                    Loss loss,
                    int repetitions,
                    SeededRng rng);

} // namespace rcn
